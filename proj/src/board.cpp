#include "trilocrab/board.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace trilocrab {

namespace {

// Returns g = gcd(a,b) >= 0 with s*a + t*b = g.
long long ext_gcd(long long a, long long b, long long& s, long long& t) {
    long long s0 = 1, t0 = 0, s1 = 0, t1 = 1;
    while (b != 0) {
        long long q = a / b;
        std::tie(a, b) = std::make_pair(b, a - q * b);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    if (a < 0) {
        a = -a;
        s0 = -s0;
        t0 = -t0;
    }
    s = s0;
    t = t0;
    return a;
}

} // namespace

Domain Domain::planar(Window w, bool strict) {
    Domain d;
    d.type = Type::PLANAR;
    d.window = w;
    d.strict = strict;
    return d;
}

Domain Domain::torus(CellCoord u, CellCoord v) {
    long long det = (long long)u.x * v.y - (long long)u.y * v.x;
    if (det == 0) throw std::invalid_argument("degenerate torus basis");
    long long s, t;
    long long g = ext_gcd(u.y, v.y, s, t);
    Domain d;
    d.type = Type::TORUS;
    d.strict = true;
    d.c = int(g);
    d.a = int(std::llabs(det) / g);
    long long wx = s * u.x + t * v.x;
    d.b = int(((wx % d.a) + d.a) % d.a);
    return d;
}

int Domain::size() const {
    return type == Type::PLANAR ? window.width() * window.height() : a * c;
}

int Domain::slot(CellCoord p) const {
    if (type == Type::PLANAR) {
        if (!window.contains(p)) return -1;
        return (p.x - window.x0) * window.height() + (p.y - window.y0);
    }
    int q = floor_div(p.y, c);
    int y0 = p.y - q * c;
    int x0 = floor_mod(p.x - q * b, a);
    return x0 * c + y0;
}

CellCoord Domain::coord(int s) const {
    if (type == Type::PLANAR) return {window.x0 + s / window.height(), window.y0 + s % window.height()};
    return {s / c, s % c};
}

Board::Board(const Atlas& atlas, const Domain& domain) : atlas_(&atlas), domain_(domain) {
    n_ = domain_.size();
    limit_ = n_ + 1;
    if (domain_.type == Domain::Type::PLANAR) ncorners_ = (domain_.window.width() + 1) * (domain_.window.height() + 1);
    else ncorners_ = n_;

    exempt_.assign(ncorners_, 0);
    if (domain_.type == Domain::Type::PLANAR && !domain_.strict) {
        const Window& w = domain_.window;
        for (int X = w.x0; X <= w.x1; ++X)
            for (int Y = w.y0; Y <= w.y1; ++Y) {
                bool out = false;
                for (CellCoord c : incident_cells({X, Y})) out |= !w.contains(c);
                exempt_[corner_slot({X, Y})] = out;
            }
    }

    int np = n_ * 8;
    pvalid_.assign(np, 0);
    pcount_.assign(np, 0);
    pcells_.assign(size_t(np) * 4, -1);
    poffsets_.assign(size_t(np) * 4, {});
    pupd_begin_.assign(np + 1, 0);
    for (int s = 0; s < n_; ++s) {
        CellCoord anchor = coord(s);
        for (int k = 0; k < KIND_COUNT; ++k)
            for (int r = 0; r < 4; ++r) {
                int pid = s * 8 + k * 4 + r;
                pupd_begin_[pid] = int(updates_.size());
                const TileKind& t = atlas_->tiles[k];
                bool ok = t.cells[r].size() <= 4;
                int cnt = 0;
                for (CellCoord f : t.cells[r]) {
                    if (!ok) break;
                    int cs = slot(anchor + f);
                    if (cs < 0) ok = false;
                    for (int i = 0; i < cnt && ok; ++i) ok = pcells_[size_t(pid) * 4 + i] != cs;
                    if (!ok) break;
                    pcells_[size_t(pid) * 4 + cnt] = cs;
                    poffsets_[size_t(pid) * 4 + cnt] = f;
                    ++cnt;
                }
                pcount_[pid] = uint8_t(cnt);
                if (ok) {
                    std::vector<CornerUpdate> ups;
                    for (const Contribution& c : t.contributions[r]) {
                        int cs = corner_slot({anchor.x + c.corner.x, anchor.y + c.corner.y});
                        if (cs < 0) {
                            ok = false;
                            break;
                        }
                        uint64_t lane = uint64_t(0xFFFF) << (16 * c.quadrant);
                        uint64_t val = uint64_t(c.label) << (16 * c.quadrant);
                        auto it = std::find_if(ups.begin(), ups.end(), [&](const CornerUpdate& u) { return u.corner == cs; });
                        if (it == ups.end()) {
                            ups.push_back({cs, lane, val});
                        } else if (it->mask & lane) {
                            if ((it->value & lane) != val) ok = false;
                        } else {
                            it->mask |= lane;
                            it->value |= val;
                        }
                    }
                    if (ok) updates_.insert(updates_.end(), ups.begin(), ups.end());
                }
                pvalid_[pid] = ok;
                if (!ok) updates_.resize(pupd_begin_[pid]);
            }
    }
    pupd_begin_[np] = int(updates_.size());

    cover_.assign(n_, {});
    for (int s = 0; s < n_; ++s) {
        CellCoord c = coord(s);
        for (int k = 0; k < KIND_COUNT; ++k)
            for (int r = 0; r < 4; ++r)
                for (CellCoord f : atlas_->tiles[k].cells[r]) {
                    int as = slot(c - f);
                    if (as < 0) continue;
                    int pid = as * 8 + k * 4 + r;
                    if (pvalid_[pid]) cover_[s].push_back(pid);
                }
        std::sort(cover_[s].begin(), cover_[s].end(),
                  [&](int x, int y) { return placement(x) < placement(y); });
    }

    for (int r = 0; r < 4; ++r)
        for (const Segment& seg : atlas_->parity.segments)
            seg_pred_.push_back(rotate_point(seg.start - seg.step, Rotation(r)));

    owner_.assign(n_, -1);
    owner_off_.assign(n_, {});
    corners_.assign(ncorners_, UNKNOWN_TUPLE);
}

int Board::corner_slot(CornerCoord c) const {
    if (domain_.type == Domain::Type::TORUS) return domain_.slot({c.x, c.y});
    const Window& w = domain_.window;
    if (c.x < w.x0 || c.x > w.x1 || c.y < w.y0 || c.y > w.y1) return -1;
    return (c.x - w.x0) * (w.height() + 1) + (c.y - w.y0);
}

uint64_t Board::corner_value(CornerCoord c) const {
    int cs = corner_slot(c);
    return cs < 0 ? UNKNOWN_TUPLE : corners_[cs];
}

int Board::pid_of(const Placement& p) const {
    int s = slot(p.anchor);
    if (s < 0) return -1;
    if (domain_.type == Domain::Type::TORUS && coord(s) != p.anchor) return -1;
    int pid = s * 8 + int(p.kind) * 4 + p.rot.quarter_turns;
    return pvalid_[pid] ? pid : -1;
}

Placement Board::placement(int pid) const {
    return {Kind((pid >> 2) & 1), Rotation(pid & 3), coord(pid >> 3)};
}

Board::Occ Board::occ(int s, int pv) const {
    if (pv >= 0) {
        const int* cs = cells(pv);
        for (int i = 0; i < pcount_[pv]; ++i)
            if (cs[i] == s) return {pv, (pv >> 2) & 1, pv & 3, poffsets_[size_t(pv) * 4 + i]};
    }
    int o = owner_[s];
    if (o < 0) return {};
    return {o, (o >> 2) & 1, o & 3, owner_off_[s]};
}

bool Board::parity_ok(int pid) const {
    const ParityTable& pt = atlas_->parity;
    if (!pt.enabled || pt.segments.empty()) return true;
    const int nseg = int(pt.segments.size());
    const int kind = (pid >> 2) & 1, rot = pid & 3;
    const CellCoord A = coord(pid >> 3);
    const int TRI = int(Kind::TRILOBITE), CRAB = int(Kind::CRAB);

    if (kind == TRI) {
        for (const Segment& seg : pt.segments) {
            CellCoord c = A + rotate_point(seg.start, Rotation(rot));
            CellCoord d = rotate_point(seg.step, Rotation(rot));
            for (int k = 0; k < limit_; ++k, c = c + d) {
                int s = slot(c);
                if (s < 0) break;
                Occ o = occ(s, pid);
                if (o.pid < 0) break;
                if (o.kind == CRAB) continue;
                if (!pt.allows(rot, o.rot, parity(c - o.offset - A))) return false;
                break;
            }
        }
    }

    for (int i = 0; i < pcount_[pid]; ++i) {
        CellCoord cp = A + poffsets_[size_t(pid) * 4 + i];
        for (int r = 0; r < 4; ++r)
            for (int si = 0; si < nseg; ++si) {
                CellCoord d = rotate_point(pt.segments[si].step, Rotation(r));
                CellCoord x = cp - d;
                Occ obs;
                CellCoord obs_anchor;
                for (int k = 0; k < limit_; ++k, x = x - d) {
                    int s = slot(x);
                    if (s < 0) break;
                    Occ o = occ(s, pid);
                    if (o.pid < 0) break;
                    if (o.kind == CRAB) continue;
                    if (o.rot == r && o.offset == seg_pred_[size_t(r) * nseg + si] && o.pid != pid) {
                        obs = o;
                        obs_anchor = x - o.offset;
                    }
                    break;
                }
                if (obs.pid < 0) continue;
                if (kind == TRI) {
                    if (!pt.allows(r, rot, parity(A - obs_anchor))) return false;
                    continue;
                }
                CellCoord y = cp + d;
                for (int k = 0; k < limit_; ++k, y = y + d) {
                    int s = slot(y);
                    if (s < 0) break;
                    Occ o = occ(s, pid);
                    if (o.pid < 0) break;
                    if (o.kind == CRAB) continue;
                    if (!pt.allows(r, o.rot, parity(y - o.offset - obs_anchor))) return false;
                    break;
                }
            }
    }
    return true;
}

bool Board::legal(int pid) const {
    if (pid < 0 || !pvalid_[pid]) return false;
    const int* cs = cells(pid);
    for (int i = 0; i < pcount_[pid]; ++i)
        if (owner_[cs[i]] >= 0) return false;
    for (int u = pupd_begin_[pid]; u < pupd_begin_[pid + 1]; ++u) {
        const CornerUpdate& up = updates_[u];
        if (exempt_[up.corner]) continue;
        uint64_t v = (corners_[up.corner] & ~up.mask) | up.value;
        if (!atlas_->corner_completable(v)) return false;
    }
    return parity_ok(pid);
}

void Board::place(int pid) {
    const int* cs = cells(pid);
    for (int i = 0; i < pcount_[pid]; ++i) {
        owner_[cs[i]] = pid;
        owner_off_[cs[i]] = poffsets_[size_t(pid) * 4 + i];
    }
    covered_ += pcount_[pid];
    saved_mark_.push_back(saved_.size());
    for (int u = pupd_begin_[pid]; u < pupd_begin_[pid + 1]; ++u) {
        const CornerUpdate& up = updates_[u];
        saved_.push_back({up.corner, corners_[up.corner]});
        corners_[up.corner] = (corners_[up.corner] & ~up.mask) | up.value;
    }
    trail_.push_back(pid);
}

void Board::undo() {
    int pid = trail_.back();
    trail_.pop_back();
    const int* cs = cells(pid);
    for (int i = 0; i < pcount_[pid]; ++i) owner_[cs[i]] = -1;
    covered_ -= pcount_[pid];
    size_t mark = saved_mark_.back();
    saved_mark_.pop_back();
    while (saved_.size() > mark) {
        corners_[saved_.back().first] = saved_.back().second;
        saved_.pop_back();
    }
}

} // namespace trilocrab
