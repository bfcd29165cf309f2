#include "trilocrab/hierarchy.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace trilocrab {

namespace {

CellCoord block_fix(int scale, Rotation r) {
    int m = (scale - 1) / 2;
    return CellCoord{m, m} - rotate_point({m, m}, r);
}

struct Bounds {
    int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
    void grow(CellCoord c) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x + 1);
        y1 = std::max(y1, c.y + 1);
    }
};

Window extent(const Patch& p) {
    if (p.window()) return *p.window();
    Bounds b;
    for (auto& [c, id] : p.cell_index()) b.grow(c);
    if (b.x0 == INT_MAX) return {};
    return {b.x0, b.y0, b.x1, b.y1};
}

bool interior(const Atlas& a, const Placement& pl, const Window& w, int margin) {
    for (CellCoord c : a.cells_of(pl))
        if (c.x < w.x0 + margin || c.x >= w.x1 - margin || c.y < w.y0 + margin || c.y >= w.y1 - margin) return false;
    return true;
}

int placement_id(const Patch& p, const Placement& pl) {
    auto id = p.owner(pl.anchor);
    if (!id || p.placements().at(*id) != pl) return -1;
    return *id;
}

// Super placement whose template member `member` lands on `base`, if the offset is integral.
std::optional<Placement> super_of(const Atlas& a, Kind kind, const Placement& member, const Placement& base) {
    int s = a.supertile.scale;
    Rotation r = base.rot + member.rot.inverse();
    CellCoord d = base.anchor - rotate_point(member.anchor, r) - block_fix(s, r);
    if (floor_mod(d.x, s) || floor_mod(d.y, s)) return std::nullopt;
    return Placement{kind, r, {floor_div(d.x, s), floor_div(d.y, s)}};
}

} // namespace

std::vector<Placement> expand_supertile(const Atlas& a, const Placement& super) {
    const SupertileTemplate& t = a.supertile;
    if (!t.present[int(super.kind)])
        throw HierarchyError(std::string("template mismatch: no template for ") + kind_name(super.kind));
    CellCoord shift = block_fix(t.scale, super.rot) + CellCoord{t.scale * super.anchor.x, t.scale * super.anchor.y};
    std::vector<Placement> out;
    for (const Placement& m : t.body[int(super.kind)])
        out.push_back({m.kind, m.rot + super.rot, rotate_point(m.anchor, super.rot) + shift});
    return out;
}

Patch inflate(const Patch& p, int levels) {
    Patch cur = p;
    for (int l = 0; l < levels; ++l) {
        const Atlas& a = cur.atlas();
        int s = a.supertile.scale;
        std::vector<Placement> next;
        for (const Placement& pl : cur.sorted())
            for (const Placement& q : expand_supertile(a, pl)) next.push_back(q);
        std::sort(next.begin(), next.end());
        std::optional<Window> w;
        if (cur.window()) w = Window{s * cur.window()->x0, s * cur.window()->y0, s * cur.window()->x1, s * cur.window()->y1};
        cur = Patch::assemble(a, w, cur.policy(), next, cur.strict_corners());
    }
    return cur;
}

Patch inflate_tile(const Atlas& a, Kind kind, int levels) {
    Bounds b;
    for (CellCoord c : a.tile(kind).footprint) b.grow(c);
    Patch p = Patch::assemble(a, Window{b.x0, b.y0, b.x1, b.y1}, BoundaryPolicy::CLOSED,
                              {Placement{kind, Rotation(0), {0, 0}}});
    return inflate(p, levels);
}

SuperPatch compose(const Patch& p, const ComposeOptions& opt) {
    const Atlas& a = p.atlas();
    const SupertileTemplate& t = a.supertile;
    if (!t.present[0] || !t.present[1] || t.core < 0) throw HierarchyError("template mismatch: incomplete template");
    Window w = extent(p);
    int margin = opt.margin >= 0 ? opt.margin : 2 * t.scale;

    for (auto& [id, pl] : p.placements()) {
        if (pl.kind != Kind::TRILOBITE || !interior(a, pl, w, opt.census_margin)) continue;
        NeighborCode c = classify_trilobite(p, id);
        if (c != NeighborCode::TTT && c != NeighborCode::OTO && c != NeighborCode::OOO)
            throw HierarchyError(std::string("PRECONDITION_CENSUS(") + code_name(c) + " at " + to_string(pl.anchor) + ")");
    }

    std::set<int> claimed;
    SuperPatch out;
    std::vector<std::pair<Placement, std::vector<Placement>>> groups;
    auto try_claim = [&](Kind kind, const Placement& member, const Placement& base) {
        auto super = super_of(a, kind, member, base);
        if (!super) return false;
        std::vector<Placement> owned;
        std::vector<int> ids;
        for (const Placement& q : expand_supertile(a, *super)) {
            bool inside = true;
            for (CellCoord c : a.cells_of(q)) inside &= w.contains(c);
            if (!inside) continue;
            int id = placement_id(p, q);
            if (id < 0 || claimed.count(id)) return false;
            owned.push_back(q);
            ids.push_back(id);
        }
        claimed.insert(ids.begin(), ids.end());
        groups.push_back({*super, owned});
        return true;
    };

    const Placement& core = t.body[int(Kind::TRILOBITE)][t.core];
    for (auto& [id, pl] : p.placements()) {
        if (pl.kind != Kind::TRILOBITE || claimed.count(id)) continue;
        if (classify_trilobite(p, id) != NeighborCode::TTT) continue;
        try_claim(Kind::TRILOBITE, core, pl);
    }
    if (t.kernel >= 0) {
        const Placement& kernel = t.body[int(Kind::CRAB)][t.kernel];
        for (auto& [id, pl] : p.placements())
            if (pl.kind == Kind::TRILOBITE && !claimed.count(id)) try_claim(Kind::CRAB, kernel, pl);
    }
    for (auto& [id, pl] : p.placements()) {
        if (pl.kind != Kind::TRILOBITE || claimed.count(id)) continue;
        if (interior(a, pl, w, margin))
            throw HierarchyError("UNCOMPOSABLE(" + to_string(pl.anchor) + ": no complete supertile group)");
        out.unwitnessed.push_back(pl);
    }
    std::sort(groups.begin(), groups.end());
    std::vector<Placement> supers;
    for (auto& g : groups) supers.push_back(g.first);
    out.supertiles = Patch::assemble(a, std::nullopt, BoundaryPolicy::OPEN, supers);
    for (auto& [sid, sp] : out.supertiles.placements()) {
        auto it = std::lower_bound(groups.begin(), groups.end(), sp,
                                   [](const auto& g, const Placement& x) { return g.first < x; });
        out.witness[sid] = it->second;
    }
    std::sort(out.unwitnessed.begin(), out.unwitnessed.end());
    return out;
}

ValidityReport verify_super_axioms(const SuperPatch& s) {
    const Patch& sp = s.supertiles;
    const Atlas& a = sp.atlas();
    std::set<CellCoord> cells;
    for (auto& [c, id] : sp.cell_index()) cells.insert(c);
    ValidityReport rep = validate_region(sp, cells);
    const SupertileTemplate& t = a.supertile;
    for (auto& [sid, super] : sp.placements()) {
        auto expected = expand_supertile(a, super);
        std::set<Placement> exp(expected.begin(), expected.end());
        auto wit = s.witness.find(sid);
        bool ok = wit != s.witness.end();
        if (ok) {
            for (const Placement& q : wit->second) ok &= exp.count(q) > 0;
            int anchor_index = super.kind == Kind::TRILOBITE ? t.core : t.kernel;
            if (anchor_index >= 0) {
                const Placement& designated = expected[anchor_index];
                ok &= std::find(wit->second.begin(), wit->second.end(), designated) != wit->second.end();
            }
        }
        if (!ok) rep.violations.push_back({"alignment violation", super.anchor, std::nullopt});
    }
    std::sort(rep.violations.begin(), rep.violations.end());
    return rep;
}

namespace {

bool chain_code(NeighborCode c) { return c == NeighborCode::TTO || c == NeighborCode::OTT; }

struct ChainGraph {
    std::map<int, NeighborCode> code;
    std::map<int, std::set<int>> adj;
};

ChainGraph chain_graph(const Patch& p) {
    ChainGraph g;
    const auto& tiles = p.atlas().tile(Kind::TRILOBITE).rotated_tips;
    for (auto& [id, pl] : p.placements()) {
        if (pl.kind != Kind::TRILOBITE) continue;
        NeighborCode c = classify_trilobite(p, id);
        if (chain_code(c)) g.code[id] = c;
    }
    for (auto& [id, c] : g.code) {
        const Placement& pl = p.placements().at(id);
        g.adj[id];
        for (const Tip& tip : tiles[pl.rot.quarter_turns]) {
            auto other = p.owner(pl.anchor + tip.contact);
            if (other && g.code.count(*other) && *other != id) {
                g.adj[id].insert(*other);
                g.adj[*other].insert(id);
            }
        }
    }
    return g;
}

CellCoord unit_diagonal(CellCoord d) {
    return {d.x > 0 ? 1 : d.x < 0 ? -1 : 0, d.y > 0 ? 1 : d.y < 0 ? -1 : 0};
}

} // namespace

std::vector<ChainDescriptor> detect_chains(const Patch& p, int margin) {
    const Atlas& a = p.atlas();
    Window w = extent(p);
    ChainGraph g = chain_graph(p);
    std::set<int> seen;
    std::vector<ChainDescriptor> out;
    for (auto& [start, c] : g.code) {
        if (seen.count(start)) continue;
        std::vector<int> comp;
        std::vector<int> stack{start};
        seen.insert(start);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int u : g.adj[v])
                if (seen.insert(u).second) stack.push_back(u);
        }
        bool any_interior = false;
        for (int v : comp) any_interior |= interior(a, p.placements().at(v), w, margin);
        if (!any_interior) continue;
        // Walk from an end of the path when there is one.
        int first = *std::min_element(comp.begin(), comp.end(), [&](int x, int y) {
            return p.placements().at(x) < p.placements().at(y);
        });
        for (int v : comp)
            if (g.adj[v].size() <= 1) {
                first = v;
                break;
            }
        std::vector<int> order{first};
        std::set<int> used{first};
        while (true) {
            int next = -1;
            for (int u : g.adj[order.back()])
                if (!used.count(u)) {
                    next = u;
                    break;
                }
            if (next < 0) break;
            order.push_back(next);
            used.insert(next);
        }
        for (int v : comp)
            if (!used.count(v)) order.push_back(v);
        if (order.size() > 1 && p.placements().at(order.back()) < p.placements().at(order.front()))
            std::reverse(order.begin(), order.end());
        ChainDescriptor d;
        for (int v : order) {
            d.members.push_back(p.placements().at(v));
            d.tags.push_back(g.code[v]);
        }
        d.direction = unit_diagonal(d.members.back().anchor - d.members.front().anchor);
        out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(), [](const ChainDescriptor& x, const ChainDescriptor& y) {
        return x.members.front() < y.members.front();
    });
    return out;
}

std::optional<std::string> chain_violation(const Patch& p, int margin) {
    const Atlas& a = p.atlas();
    Window w = extent(p);
    for (const ChainDescriptor& c : detect_chains(p, margin)) {
        std::string where = "chain at " + to_string(c.members.front().anchor);
        for (size_t i = 1; i < c.tags.size(); ++i)
            if (c.tags[i] == c.tags[i - 1]) return where + ": tags do not alternate";
        if (c.direction.x == 0 || c.direction.y == 0) return where + ": not diagonal";
        if (interior(a, c.members.front(), w, margin) || interior(a, c.members.back(), w, margin))
            return where + ": ends inside the window";
    }
    return std::nullopt;
}

Patch shift_halfplane(const Patch& p, const ChainDescriptor& c, int margin) {
    const Atlas& a = p.atlas();
    Window w = extent(p);
    if (c.members.size() < 2 || c.direction.x == 0 || c.direction.y == 0 ||
        interior(a, c.members.front(), w, margin) || interior(a, c.members.back(), w, margin))
        throw HierarchyError("CHAIN_NOT_SPANNING");
    CellCoord d = c.direction;
    CellCoord o = c.members.front().anchor;
    auto side = [&](CellCoord x) { return d.x * (x.y - o.y) - d.y * (x.x - o.x); };
    Window nw{w.x0 + 1, w.y0 + 1, w.x1 - 1, w.y1 - 1};
    std::vector<Placement> moved;
    for (const Placement& pl : p.sorted()) {
        bool left = true;
        for (CellCoord x : a.cells_of(pl)) left &= side(x) > 0;
        Placement q = left ? Placement{pl.kind, pl.rot, pl.anchor + d} : pl;
        bool inside = true;
        for (CellCoord x : a.cells_of(q)) inside &= nw.contains(x);
        if (inside) moved.push_back(q);
    }
    Patch out(a);
    try {
        out = Patch::assemble(a, nw, BoundaryPolicy::CLOSED, moved);
    } catch (const PlaceException& e) {
        throw HierarchyError("SHIFT_INVALID(" + e.error.message() + ")");
    }
    ValidityReport r = validate(out);
    if (!r.ok()) throw HierarchyError("SHIFT_INVALID(" + r.violations.front().text() + ")");
    return out;
}

} // namespace trilocrab
