#include "trilocrab/patch.hpp"

#include <algorithm>
#include <set>

namespace trilocrab {

std::vector<CellCoord> Window::cells() const {
    std::vector<CellCoord> out;
    for (int x = x0; x < x1; ++x)
        for (int y = y0; y < y1; ++y) out.push_back({x, y});
    return out;
}

const char* status_name(CornerStatus s) {
    switch (s) {
    case CornerStatus::SATISFIED: return "SATISFIED";
    case CornerStatus::VIOLATED: return "VIOLATED";
    case CornerStatus::UNCOVERABLE: return "UNCOVERABLE";
    default: return "UNDETERMINED";
    }
}

std::string PlaceError::message() const {
    switch (kind) {
    case PlaceErrorKind::OVERLAP: return "OVERLAP" + to_string(cell);
    case PlaceErrorKind::OUT_OF_WINDOW: return "OUT_OF_WINDOW" + to_string(cell);
    case PlaceErrorKind::IMMEDIATE_CORNER_VIOLATION: return "IMMEDIATE_CORNER_VIOLATION" + to_string(corner);
    default: return "PARITY_VIOLATION" + to_string(cell);
    }
}

Patch::Patch(const Atlas& atlas, std::optional<Window> window, BoundaryPolicy policy, bool strict_corners)
    : atlas_(&atlas), window_(window), policy_(policy), strict_(strict_corners) {}

std::optional<int> Patch::owner(CellCoord c) const {
    auto it = cells_.find(c);
    if (it == cells_.end()) return std::nullopt;
    return it->second;
}

const Placement* Patch::at(CellCoord c) const {
    auto it = cells_.find(c);
    return it == cells_.end() ? nullptr : &placements_.at(it->second);
}

bool Patch::exempt(CornerCoord c) const {
    if (strict_ || policy_ != BoundaryPolicy::CLOSED || !window_) return false;
    for (CellCoord cell : incident_cells(c))
        if (!window_->contains(cell)) return true;
    return false;
}

Label Patch::label_at(CornerCoord c, int quadrant) const {
    const Placement* p = at(incident_cell(c, quadrant));
    if (!p) return UNKNOWN_LABEL;
    const auto& marks = atlas_->tile(p->kind).corner_marks[p->rot.quarter_turns];
    auto it = marks.find({c.x - p->anchor.x, c.y - p->anchor.y});
    return it == marks.end() ? BLANK : it->second;
}

bool tuple_completable_scan(const Atlas& a, const CornerTuple& partial) {
    for (const CornerTuple& t : a.corner_rule.allowed) {
        bool ok = true;
        for (int q = 0; q < 4 && ok; ++q) ok = partial[q] == UNKNOWN_LABEL || partial[q] == t[q];
        if (ok) return true;
    }
    return false;
}

CornerState Patch::corner_state(CornerCoord c) const {
    CornerState s;
    s.corner = c;
    bool complete = true;
    for (int q = 0; q < 4; ++q) {
        s.tuple_so_far[q] = label_at(c, q);
        complete &= s.tuple_so_far[q] != UNKNOWN_LABEL;
    }
    if (exempt(c)) s.status = CornerStatus::UNCOVERABLE;
    else if (complete) s.status = atlas_->corner_tuple_allowed(s.tuple_so_far) ? CornerStatus::SATISFIED : CornerStatus::VIOLATED;
    else s.status = tuple_completable_scan(*atlas_, s.tuple_so_far) ? CornerStatus::UNDETERMINED : CornerStatus::VIOLATED;
    return s;
}

std::optional<CellCoord> ray_violation(const Patch& p, int id) {
    const Atlas& a = p.atlas();
    const Placement& t = p.placements().at(id);
    if (t.kind != Kind::TRILOBITE || !a.parity.enabled) return std::nullopt;
    bool closed = p.policy() == BoundaryPolicy::CLOSED && p.window();
    for (const Segment& s : a.parity.segments) {
        CellCoord c = t.anchor + rotate_point(s.start, t.rot);
        CellCoord d = rotate_point(s.step, t.rot);
        while (true) {
            if (closed && !p.window()->contains(c)) break;
            const Placement* q = p.at(c);
            if (!q) break;
            if (q->kind == Kind::CRAB) {
                c = c + d;
                continue;
            }
            if (!a.parity.allows(t.rot.quarter_turns, q->rot.quarter_turns, parity(q->anchor - t.anchor))) return c;
            break;
        }
    }
    return std::nullopt;
}

std::optional<PlaceError> Patch::check(const Placement& pl) const {
    auto cells = atlas_->cells_of(pl);
    std::sort(cells.begin(), cells.end());
    for (CellCoord c : cells) {
        if (policy_ == BoundaryPolicy::CLOSED && window_ && !window_->contains(c))
            return PlaceError{PlaceErrorKind::OUT_OF_WINDOW, c, {}};
        if (covered(c)) return PlaceError{PlaceErrorKind::OVERLAP, c, {}};
    }
    Patch next = *this;
    int id = next.next_id_++;
    next.placements_[id] = pl;
    for (CellCoord c : cells) next.cells_[c] = id;
    std::set<CornerCoord> corners;
    for (CellCoord c : cells)
        for (CornerCoord k : cell_corners(c)) corners.insert(k);
    for (CornerCoord k : corners)
        if (next.corner_state(k).status == CornerStatus::VIOLATED)
            return PlaceError{PlaceErrorKind::IMMEDIATE_CORNER_VIOLATION, {}, k};
    std::optional<CellCoord> bad;
    if (!next.rays_consistent(&bad)) return PlaceError{PlaceErrorKind::PARITY_VIOLATION, *bad, {}};
    return std::nullopt;
}

bool Patch::rays_consistent(std::optional<CellCoord>* bad) const {
    for (auto& [id, p] : placements_) {
        if (p.kind != Kind::TRILOBITE) continue;
        if (auto c = ray_violation(*this, id)) {
            *bad = c;
            return false;
        }
    }
    return true;
}

Patch Patch::place(const Placement& pl) const {
    if (auto err = check(pl)) throw PlaceException(*err);
    Patch next = *this;
    int id = next.next_id_++;
    next.placements_[id] = pl;
    for (CellCoord c : atlas_->cells_of(pl)) next.cells_[c] = id;
    return next;
}

Patch Patch::assemble(const Atlas& atlas, std::optional<Window> window, BoundaryPolicy policy,
                      const std::vector<Placement>& placements, bool strict_corners) {
    Patch p(atlas, window, policy, strict_corners);
    for (const Placement& pl : placements) {
        auto cells = atlas.cells_of(pl);
        std::sort(cells.begin(), cells.end());
        for (CellCoord c : cells) {
            if (policy == BoundaryPolicy::CLOSED && window && !window->contains(c))
                throw PlaceException({PlaceErrorKind::OUT_OF_WINDOW, c, {}});
            if (p.covered(c)) throw PlaceException({PlaceErrorKind::OVERLAP, c, {}});
        }
        int id = p.next_id_++;
        p.placements_[id] = pl;
        for (CellCoord c : cells) p.cells_[c] = id;
    }
    return p;
}

Patch Patch::remove(int id) const {
    Patch next = *this;
    auto it = next.placements_.find(id);
    if (it == next.placements_.end()) return next;
    for (CellCoord c : atlas_->cells_of(it->second)) next.cells_.erase(c);
    next.placements_.erase(it);
    return next;
}

Patch Patch::with_window(std::optional<Window> w, BoundaryPolicy policy) const {
    Patch next = *this;
    next.window_ = w;
    next.policy_ = policy;
    return next;
}

Patch Patch::with_strict(bool strict) const {
    Patch next = *this;
    next.strict_ = strict;
    return next;
}

std::vector<Placement> Patch::sorted() const {
    std::vector<Placement> out;
    for (auto& [id, p] : placements_) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace trilocrab
