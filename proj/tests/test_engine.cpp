#include "trilocrab/engine.hpp"
#include "trilocrab/lemmas.hpp"

#include <gtest/gtest.h>

#include <climits>
#include <random>

using namespace trilocrab;

namespace {

const Atlas& atlas() {
    static Atlas a = load_atlas_file(std::string(TRILOCRAB_DATA_DIR) + "/trilobite_crab.atlas");
    return a;
}

// Random legal partial tiling of a window, grown through the reference model.
Patch random_patch(std::mt19937& rng, const Window& w, bool strict, int attempts) {
    const Atlas& a = atlas();
    Patch p(a, w, BoundaryPolicy::CLOSED, strict);
    auto cells = w.cells();
    std::uniform_int_distribution<size_t> pick(0, cells.size() - 1);
    for (int i = 0; i < attempts; ++i) {
        CellCoord c = cells[pick(rng)];
        if (p.covered(c)) continue;
        auto cand = a.placements_covering(c);
        std::shuffle(cand.begin(), cand.end(), rng);
        for (const Placement& pl : cand)
            if (!p.check(pl)) {
                p = p.place(pl);
                break;
            }
    }
    return p;
}

Board board_of(const Patch& p) {
    Board b(p.atlas(), Domain::planar(*p.window(), p.strict_corners()));
    for (const Placement& pl : p.sorted()) b.place(b.pid_of(pl));
    return b;
}

std::vector<int> all_slots(const Board& b) {
    std::vector<int> v(b.num_cells());
    for (int i = 0; i < b.num_cells(); ++i) v[i] = i;
    return v;
}

Window bbox(const std::vector<CellCoord>& cells) {
    int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
    for (CellCoord c : cells) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x + 1);
        y1 = std::max(y1, c.y + 1);
    }
    return {x0, y0, x1, y1};
}

Patch rotated(const Patch& p, Rotation r) {
    std::vector<CellCoord> cells;
    for (CellCoord c : p.window()->cells()) cells.push_back(rotate_point(c, r));
    Transform t{r, {0, 0}};
    std::vector<Placement> pls;
    for (const Placement& q : p.sorted()) pls.push_back(apply_transform(t, q));
    return Patch::assemble(p.atlas(), bbox(cells), BoundaryPolicy::CLOSED, pls, p.strict_corners());
}

} // namespace

TEST(Patch, PlacementErrors) {
    const Atlas& a = atlas();
    Patch p(a, Window{0, 0, 4, 4}, BoundaryPolicy::CLOSED);
    Patch q = p.place({Kind::TRILOBITE, Rotation(0), {0, 0}});
    auto overlap = q.check({Kind::CRAB, Rotation(0), {1, 1}});
    ASSERT_TRUE(overlap);
    EXPECT_EQ(overlap->kind, PlaceErrorKind::OVERLAP);
    auto outside = q.check({Kind::TRILOBITE, Rotation(0), {3, 3}});
    ASSERT_TRUE(outside);
    EXPECT_EQ(outside->kind, PlaceErrorKind::OUT_OF_WINDOW);
    EXPECT_THROW(q.place({Kind::CRAB, Rotation(0), {1, 1}}), PlaceException);
}

TEST(Patch, ImmediateCornerViolationDetected) {
    // Some crab orientation next to a trilobite breaks a corner at once.
    const Atlas& a = atlas();
    Patch p = Patch(a).place({Kind::TRILOBITE, Rotation(0), {0, 0}});
    int corner_errors = 0;
    for (const Placement& pl : a.placements_covering({2, 0}))
        if (auto e = p.check(pl)) corner_errors += e->kind == PlaceErrorKind::IMMEDIATE_CORNER_VIOLATION;
    EXPECT_GT(corner_errors, 0);
}

TEST(Patch, CornerStatusOfEmptyAndFullCorners) {
    const Atlas& a = atlas();
    Patch p(a);
    EXPECT_EQ(p.corner_state({0, 0}).status, CornerStatus::UNDETERMINED);
    Patch w(a, Window{0, 0, 2, 2}, BoundaryPolicy::CLOSED);
    EXPECT_EQ(w.corner_state({0, 0}).status, CornerStatus::UNCOVERABLE);
    Patch s(a, Window{0, 0, 2, 2}, BoundaryPolicy::CLOSED, true);
    EXPECT_EQ(s.corner_state({0, 0}).status, CornerStatus::UNDETERMINED);
}

// Board (incremental) against Patch (reference) on random partial tilings.
TEST(Property, BoardLegalityMatchesReference) {
    std::mt19937 rng(2024);
    const Atlas& a = atlas();
    std::uniform_int_distribution<int> side(3, 8), fill(0, 40);
    long cases = 0, legal = 0;
    for (int round = 0; round < 120; ++round) {
        Window w{0, 0, side(rng), side(rng)};
        bool strict = round % 2 == 1;
        Patch p = random_patch(rng, w, strict, fill(rng));
        Board b = board_of(p);
        for (CellCoord c : w.cells()) {
            for (const Placement& pl : a.placements_covering(c)) {
                int pid = b.pid_of(pl);
                auto err = p.check(pl);
                if (pid < 0) {
                    // Overlap is reported before window containment.
                    ASSERT_TRUE(err && (err->kind == PlaceErrorKind::OUT_OF_WINDOW || err->kind == PlaceErrorKind::OVERLAP))
                        << to_string(pl);
                    continue;
                }
                ASSERT_EQ(b.legal(pid), !err) << to_string(pl) << " strict " << strict << " round " << round;
                ++cases;
                legal += !err;
            }
        }
    }
    EXPECT_GE(cases, 10000);
    EXPECT_GT(legal, 0);
    EXPECT_LT(legal, cases);
}

TEST(Property, BoardUndoRestoresState) {
    std::mt19937 rng(5);
    Window w{0, 0, 6, 6};
    Patch p = random_patch(rng, w, true, 10);
    Board b = board_of(p);
    std::vector<bool> legal_before;
    for (int s = 0; s < b.num_cells(); ++s)
        for (int pid : b.covering(s)) legal_before.push_back(b.legal(pid));
    size_t depth = b.depth();
    for (int s = 0; s < b.num_cells(); ++s) {
        if (b.covered(s)) continue;
        for (int pid : b.covering(s))
            if (b.legal(pid)) {
                b.place(pid);
                break;
            }
    }
    while (b.depth() > depth) b.undo();
    std::vector<bool> legal_after;
    for (int s = 0; s < b.num_cells(); ++s)
        for (int pid : b.covering(s)) legal_after.push_back(b.legal(pid));
    EXPECT_EQ(legal_before, legal_after);
}

TEST(Property, PropagationIsConfluent) {
    std::mt19937 rng(99);
    for (int round = 0; round < 60; ++round) {
        Window w{0, 0, 6, 6};
        Patch p = random_patch(rng, w, true, 6);
        auto region = w.cells();
        Propagated base = propagate(p, region);
        for (int k = 0; k < 4; ++k) {
            std::mt19937 order(round * 10 + k);
            PropagateOptions opt;
            opt.shuffle = &order;
            Propagated other = propagate(p, region, opt);
            ASSERT_EQ(other.contradiction, base.contradiction);
            // Forced placements before a contradiction may differ in order, not in the closure.
            if (!base.contradiction) ASSERT_EQ(other.patch.sorted(), base.patch.sorted());
        }
    }
}

TEST(Property, ForcedStepsAreUniqueCompletions) {
    std::mt19937 rng(8);
    int forced = 0;
    for (int round = 0; round < 40; ++round) {
        Window w{0, 0, 6, 6};
        Patch p = random_patch(rng, w, true, 8);
        Propagated r = propagate(p, w.cells());
        Patch cur = p;
        for (const Step& s : r.trace.steps) {
            if (s.kind != StepKind::FORCED) continue;
            auto c = legal_completions_reference(cur, *s.target);
            ASSERT_EQ(c.size(), 1u);
            ASSERT_EQ(c[0], *s.placement);
            cur = cur.place(*s.placement);
            ++forced;
        }
    }
    EXPECT_GT(forced, 0);
}

TEST(Property, LegalCompletionsMatchReference) {
    std::mt19937 rng(31);
    for (int round = 0; round < 80; ++round) {
        Window w{0, 0, 5, 7};
        Patch p = random_patch(rng, w, round % 2 == 0, 12);
        for (CellCoord c : w.cells()) {
            auto fast = legal_completions(p, c);
            auto ref = legal_completions_reference(p, c);
            std::sort(fast.begin(), fast.end());
            std::sort(ref.begin(), ref.end());
            ASSERT_EQ(fast, ref) << to_string(c);
        }
    }
}

TEST(Property, ValidateIsRotationEquivariant) {
    std::mt19937 rng(41);
    for (int round = 0; round < 40; ++round) {
        Window w{0, 0, 5, 5};
        Patch p = random_patch(rng, w, true, 30);
        size_t n = validate(p).violations.size();
        for (int r = 1; r < 4; ++r) EXPECT_EQ(validate(rotated(p, Rotation(r))).violations.size(), n);
    }
}

TEST(Property, SearchCountsAreRotationEquivariant) {
    std::mt19937 rng(43);
    int nonzero = 0;
    for (int round = 0; round < 12; ++round) {
        Window w{0, 0, 4, 4};
        Patch p = random_patch(rng, w, true, 3);
        SearchOptions opt;
        opt.mode = SearchMode::COUNT;
        opt.budget = 5'000'000;
        auto base = search_region(p, w.cells(), opt);
        ASSERT_EQ(base.status, SearchStatus::COMPLETE);
        nonzero += base.count > 0;
        for (int r = 1; r < 4; ++r) {
            Patch q = rotated(p, Rotation(r));
            auto o = search_region(q, q.window()->cells(), opt);
            ASSERT_EQ(o.count, base.count) << "round " << round << " rotation " << r;
        }
    }
    EXPECT_GT(nonzero, 0);
}

TEST(Property, RefuteAgreesWithExhaustiveCount) {
    std::mt19937 rng(47);
    int refuted = 0, found = 0;
    for (int round = 0; round < 40; ++round) {
        Window w{0, 0, 4, 5};
        Patch p = random_patch(rng, w, true, 4);
        SearchOptions all;
        all.mode = SearchMode::ALL;
        all.budget = 5'000'000;
        SearchOptions ref = all;
        ref.mode = SearchMode::REFUTE;
        auto a = search_region(p, w.cells(), all);
        auto r = search_region(p, w.cells(), ref);
        ASSERT_EQ(a.status, SearchStatus::COMPLETE);
        ASSERT_EQ(r.status == SearchStatus::REFUTED, a.count == 0);
        refuted += a.count == 0;
        found += a.count > 0;
        // Every solution ALL returns validates under the reference model.
        for (const auto& sol : a.solutions) {
            Patch s = Patch::assemble(atlas(), w, BoundaryPolicy::CLOSED, sol, true);
            ASSERT_TRUE(validate(s).ok());
        }
    }
    EXPECT_GT(refuted, 0);
    EXPECT_GT(found, 0);
}

TEST(Property, RefutationTracesReplay) {
    std::mt19937 rng(53);
    int replayed = 0;
    for (int round = 0; round < 200 && replayed < 15; ++round) {
        Window w{0, 0, 5, 5};
        Patch p = random_patch(rng, w, true, 5);
        SearchOptions opt;
        opt.mode = SearchMode::REFUTE;
        opt.budget = 2'000'000;
        auto r = search_region(p, w.cells(), opt);
        if (r.status != SearchStatus::REFUTED) continue;
        auto rep = replay_refutation(atlas(), w, true, r.proof, {});
        ASSERT_TRUE(rep.ok) << rep.error;
        ++replayed;
        // Tampering: dropping the last contradiction must break the replay.
        DeductionTrace t = r.proof;
        for (size_t i = t.steps.size(); i-- > 0;)
            if (t.steps[i].kind == StepKind::CONTRADICTION) {
                t.steps.erase(t.steps.begin() + long(i));
                break;
            }
        EXPECT_FALSE(replay_refutation(atlas(), w, true, t, {}).ok);
    }
    EXPECT_GE(replayed, 15);
}

TEST(Property, ParallelSearchMatchesSequential) {
    std::mt19937 rng(59);
    for (int round = 0; round < 10; ++round) {
        Window w{0, 0, 5, 5};
        Patch p = random_patch(rng, w, true, 4);
        for (SearchMode m : {SearchMode::REFUTE, SearchMode::COUNT}) {
            SearchOptions one;
            one.mode = m;
            one.budget = 3'000'000;
            SearchOptions many = one;
            many.workers = 4;
            auto a = search_region(p, w.cells(), one);
            auto b = search_region(p, w.cells(), many);
            ASSERT_EQ(a.status, b.status);
            ASSERT_EQ(a.nodes, b.nodes);
            ASSERT_EQ(a.count, b.count);
            ASSERT_EQ(a.subcases, b.subcases);
            ASSERT_EQ(a.proof, b.proof);
        }
    }
}

TEST(Property, ParallelSearchMatchesSequentialUnderCutoffs) {
    // FIRST stops at the first solving child and small budgets stop mid-way; the
    // parallel run abandons later children and must still agree exactly.
    std::mt19937 rng(61);
    for (int round = 0; round < 10; ++round) {
        Window w{0, 0, 6, 6};
        Patch p = random_patch(rng, w, true, 3);
        for (uint64_t budget : {uint64_t(20), uint64_t(200), uint64_t(3'000'000)})
            for (SearchMode m : {SearchMode::FIRST, SearchMode::REFUTE, SearchMode::ALL}) {
                SearchOptions one;
                one.mode = m;
                one.budget = budget;
                SearchOptions many = one;
                many.workers = 3;
                auto a = search_region(p, w.cells(), one);
                auto b = search_region(p, w.cells(), many);
                ASSERT_EQ(a.status, b.status) << round << " " << budget;
                ASSERT_EQ(a.nodes, b.nodes);
                ASSERT_EQ(a.count, b.count);
                ASSERT_EQ(a.subcases, b.subcases);
                ASSERT_EQ(a.solutions, b.solutions);
                ASSERT_EQ(a.proof, b.proof);
            }
    }
}

TEST(Search, BudgetExhaustionIsReported) {
    Patch p(atlas(), Window{0, 0, 8, 8}, BoundaryPolicy::CLOSED, true);
    SearchOptions opt;
    opt.mode = SearchMode::COUNT;
    opt.budget = 1;
    auto r = search_region(p, p.window()->cells(), opt);
    EXPECT_EQ(r.status, SearchStatus::BUDGET_EXHAUSTED);
    EXPECT_TRUE(r.solutions.empty());
}

TEST(Classify, CodesOfTheInflatedCore) {
    // The core of a level-1 supertile meets trilobites at all three tips.
    const Atlas& a = atlas();
    const auto& body = a.supertile.body[int(Kind::TRILOBITE)];
    Patch p = Patch::assemble(a, std::nullopt, BoundaryPolicy::OPEN, body);
    int core = -1;
    for (auto& [id, q] : p.placements())
        if (q == body[size_t(a.supertile.core)]) core = id;
    ASSERT_GE(core, 0);
    EXPECT_EQ(classify_trilobite(p, core), NeighborCode::TTT);
    for (auto& [id, q] : p.placements())
        if (q.kind == Kind::CRAB) EXPECT_THROW(classify_trilobite(p, id), std::invalid_argument);
}

TEST(Classify, UndeterminedWhenATipIsOpen) {
    Patch p = Patch(atlas()).place({Kind::TRILOBITE, Rotation(0), {0, 0}});
    EXPECT_EQ(classify_trilobite(p, p.placements().begin()->first), NeighborCode::UNDETERMINED);
}

TEST(Torus, SingleCellIsUnsat) {
    auto o = torus_search(atlas(), {1, 0}, {0, 1}, 1000);
    EXPECT_EQ(o.status, TorusStatus::UNSAT);
}

TEST(Torus, DegenerateBasisRejected) {
    EXPECT_THROW(torus_search(atlas(), {1, 1}, {2, 2}, 10), std::invalid_argument);
}

TEST(Torus, LatticeEnumeration) {
    // Sublattices of index n number sigma(n); 1+3+4+7+6+12+8+15 = 56 up to 8.
    EXPECT_EQ(lattices_up_to(8).size(), 56u);
}

// Values from the independent SAT oracle (tools/oracle/sat_oracle.py torus).
TEST(Torus, SmallLatticesUnsat) {
    for (const LatticeBasis& l : lattices_up_to(12)) {
        auto o = torus_search(atlas(), l.u, l.v, 50'000'000);
        ASSERT_EQ(o.status, TorusStatus::UNSAT) << l.u.x << " " << l.v.x << " " << l.v.y;
    }
}

TEST(Torus, AreaEighteenPeriodicTilingValidates) {
    auto o = torus_search(atlas(), {3, 0}, {0, 6}, 50'000'000);
    ASSERT_EQ(o.status, TorusStatus::SAT);
    // Unroll the periodic tiling over a window and check it with the reference model.
    const Atlas& a = atlas();
    Window w{0, 0, 12, 12};
    std::vector<Placement> pls;
    for (int i = -2; i < 6; ++i)
        for (int j = -2; j < 4; ++j)
            for (const Placement& p : o.tiling) {
                Placement q{p.kind, p.rot, p.anchor + CellCoord{3 * i, 6 * j}};
                bool inside = true;
                for (CellCoord c : a.cells_of(q)) inside &= w.contains(c);
                if (inside) pls.push_back(q);
            }
    Patch big = Patch::assemble(a, std::nullopt, BoundaryPolicy::OPEN, pls);
    Window inner{2, 2, 10, 10};
    std::set<CellCoord> cells;
    for (CellCoord c : inner.cells()) cells.insert(c);
    auto rep = validate_region(big, cells);
    EXPECT_TRUE(rep.ok()) << (rep.ok() ? "" : rep.violations.front().text());
}
