#include "trilocrab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace trilocrab {

const char* step_kind_name(StepKind k) {
    switch (k) {
    case StepKind::GIVEN: return "GIVEN";
    case StepKind::FORCED: return "FORCED";
    case StepKind::SUBCASE_OPEN: return "SUBCASE_OPEN";
    case StepKind::SUBCASE_CLOSE: return "SUBCASE_CLOSE";
    case StepKind::REDUCED_TO: return "REDUCED_TO";
    default: return "CONTRADICTION";
    }
}

std::optional<StepKind> parse_step_kind(std::string_view s) {
    for (StepKind k : {StepKind::GIVEN, StepKind::FORCED, StepKind::SUBCASE_OPEN, StepKind::SUBCASE_CLOSE,
                       StepKind::REDUCED_TO, StepKind::CONTRADICTION})
        if (s == step_kind_name(k)) return k;
    return std::nullopt;
}

void DeductionTrace::add(StepKind kind, std::optional<Placement> p, std::optional<CellCoord> target,
                         std::string case_id) {
    steps.push_back({next_no(), kind, p, target, std::move(case_id)});
}

const char* search_status_name(SearchStatus s) {
    switch (s) {
    case SearchStatus::REFUTED: return "REFUTED";
    case SearchStatus::FOUND: return "FOUND";
    case SearchStatus::COMPLETE: return "COMPLETE";
    default: return "BUDGET_EXHAUSTED";
    }
}

std::string Violation::text() const {
    std::string s = what;
    if (cell) s += " at " + to_string(*cell);
    if (corner) s += " at " + to_string(*corner);
    return s;
}

Board make_board(const Patch& p, const std::vector<CellCoord>& extra) {
    if (p.policy() == BoundaryPolicy::CLOSED && p.window()) {
        Board b(p.atlas(), Domain::planar(*p.window(), p.strict_corners()));
        for (const Placement& pl : p.sorted()) b.place(b.pid_of(pl));
        return b;
    }
    int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
    auto grow = [&](CellCoord c) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x + 1);
        y1 = std::max(y1, c.y + 1);
    };
    for (auto& [c, id] : p.cell_index()) grow(c);
    for (CellCoord c : extra) grow(c);
    if (x0 == INT_MAX) grow({0, 0});
    const int margin = 3;
    Board b(p.atlas(), Domain::planar({x0 - margin, y0 - margin, x1 + margin, y1 + margin}, true));
    for (const Placement& pl : p.sorted()) b.place(b.pid_of(pl));
    return b;
}

std::vector<Placement> legal_completions(const Patch& p, CellCoord target) {
    if (p.covered(target)) return {};
    if (p.policy() == BoundaryPolicy::CLOSED && p.window() && !p.window()->contains(target)) return {};
    Board b = make_board(p, {target});
    std::vector<Placement> out;
    for (int pid : b.covering(b.slot(target)))
        if (b.legal(pid)) out.push_back(b.placement(pid));
    return out;
}

std::vector<Placement> legal_completions(const Patch& p, CornerCoord target) {
    std::set<Placement> all;
    for (CellCoord c : incident_cells(target))
        for (const Placement& pl : legal_completions(p, c)) all.insert(pl);
    return {all.begin(), all.end()};
}

std::vector<Placement> legal_completions_reference(const Patch& p, CellCoord target) {
    std::vector<Placement> out;
    if (p.covered(target)) return out;
    for (const Placement& pl : p.atlas().placements_covering(target))
        if (!p.check(pl)) out.push_back(pl);
    return out;
}

PropagateResult propagate_board(Board& b, const std::vector<int>& region, DeductionTrace* trace,
                                const PropagateOptions& opt) {
    PropagateResult res;
    std::vector<int> order = region;
    bool changed = true;
    while (changed) {
        changed = false;
        if (opt.shuffle) std::shuffle(order.begin(), order.end(), *opt.shuffle);
        for (int s : order) {
            if (b.covered(s)) continue;
            int first = -1, n = 0;
            for (int pid : b.covering(s)) {
                if (!b.legal(pid)) continue;
                if (n++ == 0) first = pid;
                if (n == 2) break;
            }
            if (n == 0) {
                res.contradiction = true;
                res.dead_cell = b.coord(s);
                if (trace) trace->add(StepKind::CONTRADICTION, std::nullopt, b.coord(s));
                return res;
            }
            if (n == 1) {
                b.place(first);
                ++res.forced;
                changed = true;
                if (trace) trace->add(StepKind::FORCED, b.placement(first), b.coord(s));
            }
        }
    }
    return res;
}

namespace {

std::vector<int> region_slots(const Board& b, const std::vector<CellCoord>& region) {
    std::vector<int> out;
    for (CellCoord c : region) {
        int s = b.slot(c);
        if (s >= 0) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Step> given_steps(const Patch& p) {
    DeductionTrace t;
    for (const Placement& pl : p.sorted()) t.add(StepKind::GIVEN, pl);
    return t.steps;
}

} // namespace

Propagated propagate(const Patch& p, const std::vector<CellCoord>& region, const PropagateOptions& opt) {
    Board b = make_board(p, region);
    Propagated out{p, {}, false};
    out.trace.steps = given_steps(p);
    PropagateResult r = propagate_board(b, region_slots(b, region), &out.trace, opt);
    out.contradiction = r.contradiction;
    for (const Step& s : out.trace.steps)
        if (s.kind == StepKind::FORCED) out.patch = out.patch.place(*s.placement);
    return out;
}

namespace {

enum class Res { NONE, FOUND, EXHAUSTED };

struct Ctx {
    const std::vector<int>* region = nullptr;
    SearchMode mode = SearchMode::REFUTE;
    uint64_t budget = 0;
    uint64_t nodes = 0;
    uint64_t count = 0;
    int subcases = 0;
    std::vector<std::vector<Placement>> solutions;
    std::vector<std::string> reductions;
    const Reducer* reducer = nullptr;
    const std::function<bool(const Board&)>* accept = nullptr;
    // Parallel children: abandon the subtree once the merge is known to stop before `index`.
    const std::atomic<size_t>* cutoff = nullptr;
    size_t index = 0;
    bool leaf_ok(const Board& b) const { return !accept || !*accept || (*accept)(b); }
    bool stop_on_found() const { return mode == SearchMode::FIRST || mode == SearchMode::REFUTE; }
    bool keep_solutions() const { return mode != SearchMode::COUNT; }
};

std::vector<Placement> board_solution(const Board& b) {
    std::vector<Placement> out;
    for (int pid : b.trail()) out.push_back(b.placement(pid));
    std::sort(out.begin(), out.end());
    return out;
}

struct Branch {
    int slot = -1;
    std::vector<int> pids;
};

Branch choose_branch(const Board& b, const std::vector<int>& region) {
    Branch best;
    size_t bestn = SIZE_MAX;
    std::vector<int> cand;
    for (int s : region) {
        if (b.covered(s)) continue;
        cand.clear();
        for (int pid : b.covering(s))
            if (b.legal(pid)) cand.push_back(pid);
        if (cand.size() < bestn) {
            bestn = cand.size();
            best.slot = s;
            best.pids = cand;
        }
    }
    return best;
}

Res dfs(Board& b, Ctx& ctx, DeductionTrace* tr) {
    if (++ctx.nodes > ctx.budget) return Res::EXHAUSTED;
    if (ctx.cutoff && ctx.cutoff->load(std::memory_order_relaxed) < ctx.index) return Res::EXHAUSTED;
    size_t mark = b.depth();
    auto restore = [&] {
        while (b.depth() > mark) b.undo();
    };
    PropagateResult pr = propagate_board(b, *ctx.region, tr);
    if (pr.contradiction) {
        restore();
        return Res::NONE;
    }
    if (ctx.reducer && *ctx.reducer) {
        if (auto id = (*ctx.reducer)(b)) {
            if (tr) tr->add(StepKind::REDUCED_TO, std::nullopt, std::nullopt, *id);
            ctx.reductions.push_back(*id);
            restore();
            return Res::NONE;
        }
    }
    Branch br = choose_branch(b, *ctx.region);
    if (br.slot < 0) {
        if (!ctx.leaf_ok(b)) {
            restore();
            return Res::NONE;
        }
        ++ctx.count;
        if (ctx.keep_solutions()) ctx.solutions.push_back(board_solution(b));
        restore();
        return Res::FOUND;
    }
    bool any = false;
    for (int pid : br.pids) {
        ++ctx.subcases;
        if (tr) tr->add(StepKind::SUBCASE_OPEN, b.placement(pid), b.coord(br.slot));
        b.place(pid);
        Res r = dfs(b, ctx, tr);
        b.undo();
        if (tr) tr->add(StepKind::SUBCASE_CLOSE);
        if (r == Res::EXHAUSTED) {
            restore();
            return r;
        }
        if (r == Res::FOUND) {
            any = true;
            if (ctx.stop_on_found()) {
                restore();
                return r;
            }
        }
    }
    restore();
    return any ? Res::FOUND : Res::NONE;
}

// Canonical order of completed patches: the placement met at each region cell, in cell order.
void sort_solutions(const Board& b, const std::vector<int>& region, std::vector<std::vector<Placement>>& sols) {
    auto key = [&](const std::vector<Placement>& sol) {
        std::vector<Placement> k(region.size());
        std::vector<int> owner(b.num_cells(), -1);
        for (size_t i = 0; i < sol.size(); ++i) {
            int pid = b.pid_of(sol[i]);
            for (int j = 0; j < b.cell_count(pid); ++j) owner[b.cells(pid)[j]] = int(i);
        }
        for (size_t i = 0; i < region.size(); ++i)
            if (owner[region[i]] >= 0) k[i] = sol[owner[region[i]]];
        return k;
    };
    std::vector<std::pair<std::vector<Placement>, size_t>> keyed;
    for (size_t i = 0; i < sols.size(); ++i) keyed.push_back({key(sols[i]), i});
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::vector<Placement>> out;
    for (auto& [k, i] : keyed) out.push_back(std::move(sols[i]));
    sols = std::move(out);
}

void renumber(DeductionTrace& t) {
    int n = 0;
    for (Step& s : t.steps) s.step_no = ++n;
}

SearchStatus final_status(SearchMode mode, Res r) {
    if (r == Res::EXHAUSTED) return SearchStatus::BUDGET_EXHAUSTED;
    if (mode == SearchMode::ALL || mode == SearchMode::COUNT) return SearchStatus::COMPLETE;
    return r == Res::FOUND ? SearchStatus::FOUND : SearchStatus::REFUTED;
}

struct ChildResult {
    Res res = Res::NONE;
    Ctx ctx;
    DeductionTrace trace;
};

} // namespace

SearchOutcome search_board(Board& b, const std::vector<int>& region, const SearchOptions& opt,
                           const std::vector<Step>& given) {
    SearchOutcome out;
    Ctx ctx;
    ctx.region = &region;
    ctx.mode = opt.mode;
    ctx.budget = opt.budget;
    ctx.reducer = &opt.reducer;
    ctx.accept = &opt.accept;
    DeductionTrace trace;
    trace.steps = given;
    DeductionTrace* tr = opt.record_proof && opt.mode == SearchMode::REFUTE ? &trace : nullptr;

    Res res;
    if (opt.workers <= 1) {
        res = dfs(b, ctx, tr);
    } else {
        // The root is expanded here; its subtrees run on worker threads and are merged in
        // canonical order with the node accounting a sequential run would have produced.
        res = Res::NONE;
        size_t mark = b.depth();
        ctx.nodes = 1;
        bool done = false;
        if (ctx.nodes > ctx.budget) {
            res = Res::EXHAUSTED;
            done = true;
        }
        if (!done) {
            PropagateResult pr = propagate_board(b, region, tr);
            if (pr.contradiction) done = true;
        }
        if (!done && opt.reducer) {
            if (auto id = opt.reducer(b)) {
                if (tr) tr->add(StepKind::REDUCED_TO, std::nullopt, std::nullopt, *id);
                ctx.reductions.push_back(*id);
                done = true;
            }
        }
        Branch br;
        if (!done) {
            br = choose_branch(b, region);
            if (br.slot < 0) {
                if (ctx.leaf_ok(b)) {
                    ++ctx.count;
                    if (ctx.keep_solutions()) ctx.solutions.push_back(board_solution(b));
                    res = Res::FOUND;
                }
                done = true;
            }
        }
        if (!done) {
            std::vector<ChildResult> kids(br.pids.size());
            std::vector<bool> finished(kids.size());
            size_t next = 0, prefix = 0;
            uint64_t prefix_nodes = ctx.nodes;
            std::atomic<size_t> cutoff{SIZE_MAX};
            std::mutex mu;
            // Same stopping rule as the merge below, applied as children finish.
            auto finish = [&](size_t i) {
                std::lock_guard<std::mutex> lock(mu);
                finished[i] = true;
                const ChildResult& k = kids[i];
                if (k.res == Res::EXHAUSTED || (k.res == Res::FOUND && ctx.stop_on_found()))
                    cutoff = std::min(cutoff.load(), i);
                for (; prefix < kids.size() && finished[prefix]; ++prefix) {
                    prefix_nodes += kids[prefix].ctx.nodes;
                    if (prefix_nodes > ctx.budget) cutoff = std::min(cutoff.load(), prefix);
                }
            };
            auto work = [&] {
                while (true) {
                    size_t i;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= kids.size() || next > cutoff.load()) return;
                        i = next++;
                    }
                    Board local = b;
                    local.place(br.pids[i]);
                    ChildResult& k = kids[i];
                    k.ctx = Ctx();
                    k.ctx.region = &region;
                    k.ctx.mode = opt.mode;
                    k.ctx.budget = opt.budget - 1;
                    k.ctx.reducer = &opt.reducer;
                    k.ctx.accept = &opt.accept;
                    k.ctx.cutoff = &cutoff;
                    k.ctx.index = i;
                    k.res = dfs(local, k.ctx, tr ? &k.trace : nullptr);
                    finish(i);
                }
            };
            std::vector<std::thread> pool;
            int nthreads = std::min<int>(opt.workers, int(kids.size()));
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
            for (auto& t : pool) t.join();

            bool any = false;
            for (size_t i = 0; i < kids.size(); ++i) {
                ChildResult& k = kids[i];
                ctx.nodes += k.ctx.nodes;
                if (k.res == Res::EXHAUSTED || ctx.nodes > ctx.budget) {
                    res = Res::EXHAUSTED;
                    break;
                }
                ++ctx.subcases;
                ctx.subcases += k.ctx.subcases;
                ctx.count += k.ctx.count;
                for (auto& s : k.ctx.solutions) ctx.solutions.push_back(std::move(s));
                for (auto& r : k.ctx.reductions) ctx.reductions.push_back(std::move(r));
                if (tr) {
                    tr->add(StepKind::SUBCASE_OPEN, b.placement(br.pids[i]), b.coord(br.slot));
                    for (Step& s : k.trace.steps) tr->steps.push_back(s);
                    tr->add(StepKind::SUBCASE_CLOSE);
                }
                if (k.res == Res::FOUND) {
                    any = true;
                    if (ctx.stop_on_found()) break;
                }
            }
            if (res != Res::EXHAUSTED) res = any ? Res::FOUND : Res::NONE;
        }
        while (b.depth() > mark) b.undo();
    }

    out.status = final_status(opt.mode, res);
    out.nodes = res == Res::EXHAUSTED ? opt.budget + 1 : ctx.nodes;
    // Partial statistics of an exhausted search depend on where it stopped; drop them.
    out.count = res == Res::EXHAUSTED ? 0 : ctx.count;
    out.subcases = res == Res::EXHAUSTED ? 0 : ctx.subcases;
    if (res != Res::EXHAUSTED) {
        out.solutions = std::move(ctx.solutions);
        sort_solutions(b, region, out.solutions);
        out.reductions = std::move(ctx.reductions);
        if (tr && out.status == SearchStatus::REFUTED) {
            renumber(trace);
            out.proof = std::move(trace);
        }
    }
    return out;
}

SearchOutcome search_region(const Patch& p, const std::vector<CellCoord>& region, const SearchOptions& opt) {
    Board b = make_board(p, region);
    return search_board(b, region_slots(b, region), opt, given_steps(p));
}

namespace {

void check_rays(const Patch& p, const std::set<CellCoord>& cells, std::vector<Violation>& out) {
    const Atlas& a = p.atlas();
    if (!a.parity.enabled) return;
    for (auto& [id, t] : p.placements()) {
        if (t.kind != Kind::TRILOBITE) continue;
        for (const Segment& s : a.parity.segments) {
            CellCoord c = t.anchor + rotate_point(s.start, t.rot);
            CellCoord d = rotate_point(s.step, t.rot);
            while (cells.count(c)) {
                const Placement* q = p.at(c);
                if (!q) break;
                if (q->kind == Kind::CRAB) {
                    c = c + d;
                    continue;
                }
                if (!a.parity.allows(t.rot.quarter_turns, q->rot.quarter_turns, parity(q->anchor - t.anchor)))
                    out.push_back({"parity violation", t.anchor, std::nullopt});
                break;
            }
        }
    }
}

} // namespace

ValidityReport validate_region(const Patch& p, const std::set<CellCoord>& cells) {
    ValidityReport rep;
    std::set<CornerCoord> corners;
    for (CellCoord c : cells) {
        if (!p.covered(c)) rep.violations.push_back({"uncovered cell", c, std::nullopt});
        for (CornerCoord k : cell_corners(c)) corners.insert(k);
    }
    for (CornerCoord k : corners) {
        bool interior = true;
        for (CellCoord c : incident_cells(k)) interior &= cells.count(c) > 0;
        if (!interior) continue;
        CornerTuple t;
        bool complete = true;
        for (int q = 0; q < 4; ++q) {
            const Placement* pl = p.at(incident_cell(k, q));
            if (!pl) {
                complete = false;
                break;
            }
            const auto& marks = p.atlas().tile(pl->kind).corner_marks[pl->rot.quarter_turns];
            auto it = marks.find({k.x - pl->anchor.x, k.y - pl->anchor.y});
            t[q] = it == marks.end() ? BLANK : it->second;
        }
        if (complete && !p.atlas().corner_tuple_allowed(t))
            rep.violations.push_back({"corner violation", std::nullopt, k});
    }
    check_rays(p, cells, rep.violations);
    std::sort(rep.violations.begin(), rep.violations.end());
    return rep;
}

ValidityReport validate(const Patch& p) {
    if (p.policy() != BoundaryPolicy::CLOSED || !p.window())
        throw std::invalid_argument("validate requires a CLOSED window");
    auto cells = p.window()->cells();
    return validate_region(p, {cells.begin(), cells.end()});
}

const char* code_name(NeighborCode c) {
    static const char* names[] = {"TTT", "TTO", "OTT", "OTO", "OOT", "TOT", "TOO", "OOO", "UNDETERMINED"};
    return names[int(c)];
}

std::optional<NeighborCode> parse_code(std::string_view s) {
    for (int i = 0; i <= int(NeighborCode::UNDETERMINED); ++i)
        if (s == code_name(NeighborCode(i))) return NeighborCode(i);
    return std::nullopt;
}

NeighborCode code_from_letters(char a, char b, char c) {
    char s[4] = {a, b, c, 0};
    return parse_code(s).value_or(NeighborCode::UNDETERMINED);
}

NeighborCode classify_trilobite(const Patch& p, int id) {
    auto it = p.placements().find(id);
    if (it == p.placements().end() || it->second.kind != Kind::TRILOBITE)
        throw std::invalid_argument("NOT_A_TRILOBITE");
    const Placement& t = it->second;
    const auto& tips = p.atlas().tile(Kind::TRILOBITE).rotated_tips[t.rot.quarter_turns];
    if (tips.size() != 3) return NeighborCode::UNDETERMINED;
    char l[3];
    for (int i = 0; i < 3; ++i) {
        const Placement* q = p.at(t.anchor + tips[i].contact);
        if (!q) return NeighborCode::UNDETERMINED;
        l[i] = q->kind == Kind::TRILOBITE ? 'T' : 'O';
    }
    return code_from_letters(l[0], l[1], l[2]);
}

std::map<NeighborCode, int> interior_census(const Patch& p, int margin) {
    int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
    if (p.window()) {
        x0 = p.window()->x0;
        y0 = p.window()->y0;
        x1 = p.window()->x1;
        y1 = p.window()->y1;
    } else {
        for (auto& [c, id] : p.cell_index()) {
            x0 = std::min(x0, c.x);
            y0 = std::min(y0, c.y);
            x1 = std::max(x1, c.x + 1);
            y1 = std::max(y1, c.y + 1);
        }
    }
    std::map<NeighborCode, int> out;
    for (auto& [id, t] : p.placements()) {
        if (t.kind != Kind::TRILOBITE) continue;
        bool inside = true;
        for (CellCoord c : p.atlas().cells_of(t))
            inside &= c.x >= x0 + margin && c.x < x1 - margin && c.y >= y0 + margin && c.y < y1 - margin;
        if (inside) ++out[classify_trilobite(p, id)];
    }
    return out;
}

bool census_within(const std::map<NeighborCode, int>& census, const std::set<NeighborCode>& allowed) {
    for (auto& [c, n] : census)
        if (n > 0 && !allowed.count(c)) return false;
    return true;
}

const char* torus_status_name(TorusStatus s) {
    switch (s) {
    case TorusStatus::SAT: return "SAT";
    case TorusStatus::UNSAT: return "UNSAT";
    default: return "BUDGET_EXHAUSTED";
    }
}

TorusOutcome torus_search(const Atlas& a, CellCoord u, CellCoord v, uint64_t budget, int workers) {
    Board b(a, Domain::torus(u, v));
    std::vector<int> region(b.num_cells());
    for (int i = 0; i < b.num_cells(); ++i) region[i] = i;
    SearchOptions opt;
    opt.mode = SearchMode::FIRST;
    opt.budget = budget;
    opt.workers = workers;
    opt.record_proof = false;
    SearchOutcome r = search_board(b, region, opt);
    TorusOutcome out;
    out.nodes = r.nodes;
    if (r.status == SearchStatus::BUDGET_EXHAUSTED) out.status = TorusStatus::BUDGET_EXHAUSTED;
    else if (r.status == SearchStatus::FOUND) {
        out.status = TorusStatus::SAT;
        out.tiling = r.solutions.front();
    } else {
        out.status = TorusStatus::UNSAT;
    }
    return out;
}

std::vector<LatticeBasis> lattices_up_to(int max_area) {
    std::vector<LatticeBasis> out;
    for (int area = 1; area <= max_area; ++area)
        for (int a = 1; a <= area; ++a) {
            if (area % a) continue;
            int c = area / a;
            for (int b = 0; b < a; ++b) out.push_back({{a, 0}, {b, c}});
        }
    return out;
}

} // namespace trilocrab
