#include "trilocrab/lemmas.hpp"

#include <gtest/gtest.h>

using namespace trilocrab;

namespace {

const Atlas& atlas() {
    static Atlas a = load_atlas_file(std::string(TRILOCRAB_DATA_DIR) + "/trilobite_crab.atlas");
    return a;
}

const Suite& bundled() {
    static Suite s = load_suite_file(std::string(TRILOCRAB_DATA_DIR) + "/lemmas.suite");
    return s;
}

const LemmaSpec& lemma(const std::string& name) {
    for (const LemmaSpec& l : bundled().lemmas)
        if (l.name == name) return l;
    throw std::out_of_range(name);
}

int line_of_error(const std::string& text) {
    try {
        parse_suite(text);
    } catch (const SuiteError& e) {
        return e.line;
    }
    return -1;
}

// Brute force: all placements of the given candidates that Patch accepts next to `base`.
size_t legal_extensions(const Patch& base, const std::vector<Placement>& candidates) {
    size_t n = 0;
    for (const Placement& p : candidates) n += !base.check(p);
    return n;
}

} // namespace

TEST(Suite, RowsRunTopToBottom) {
    Pattern p = parse_rows(default_legend(), {"0.", ".a"}, {5, 7});
    ASSERT_EQ(p.cells.size(), 2u);
    EXPECT_EQ(p.cells.at({5, 7}).spec, CellSpec::EXACT);
    EXPECT_EQ(p.cells.at({6, 6}).classes.front(), (OrientedClass{Kind::CRAB, Rotation(0)}));
    EXPECT_THROW(parse_rows(default_legend(), {"0%"}, {0, 0}), std::invalid_argument);
}

TEST(Suite, BundledSuiteParses) {
    const Suite& s = bundled();
    EXPECT_GE(s.lemmas.size(), 20u);
    EXPECT_EQ(lemma("E1").alternatives.size(), 4u);
    EXPECT_EQ(lemma("E1").seed.frontier(), (CellCoord{-1, -1}));
    EXPECT_EQ(lemma("OOT").reduces_to.size(), 5u);
    EXPECT_EQ(lemma("initial-cases").classified.size(), 5u);
    EXPECT_EQ(lemma("chain-TTO").window, 18);
}

TEST(Suite, ErrorsCarryLineNumbers) {
    EXPECT_EQ(line_of_error("[lemma a]\nexpect sometimes\n"), 2);
    EXPECT_EQ(line_of_error("[lemma a]\nrow 0\n[lemma b]\nreduces-to c\n"), 4);
    EXPECT_EQ(line_of_error("[lemma a]\nrow 0\n[lemma a]\n"), 3);
    EXPECT_EQ(line_of_error("[lemma a]\nradii 3 2\n"), 2);
    EXPECT_EQ(line_of_error("[lemma a]\nrow 0%\nexpect forbidden\n"), 3);
    EXPECT_EQ(line_of_error("[legend]\nglyph x EXACT TRILOBITE\n"), 2);
    EXPECT_EQ(line_of_error("[notes]\n"), 1);
    EXPECT_EQ(line_of_error("row 0\n"), 1);
}

TEST(Suite, DeclaredLegendReplacesDefaults) {
    Suite s = parse_suite("[legend]\nglyph X EXACT CRAB 2\nglyph - FREE\n[lemma a]\nrow X-\n");
    ASSERT_EQ(s.lemmas.size(), 1u);
    EXPECT_EQ(s.lemmas[0].seed.cells.size(), 1u);
    EXPECT_EQ(line_of_error("[legend]\nglyph X EXACT CRAB 2\n[lemma a]\nrow 0\n"), 4);
}

TEST(Suite, ExpectationsNeedTheirData) {
    EXPECT_THROW(parse_suite("[lemma a]\nexpect alternatives\nrow 0@\n"), SuiteError);
    EXPECT_THROW(parse_suite("[lemma a]\nexpect classified\nrow 0\n"), SuiteError);
    EXPECT_THROW(parse_suite("[lemma a]\nexpect chain\nrow 0\n"), SuiteError);
}

TEST(Wildcards, SingleCellExpansionsMatchBruteForce) {
    const Atlas& a = atlas();
    Patch empty(a);
    auto count = [&](const std::string& row) { return expand_wildcards(a, parse_rows(default_legend(), {row}, {0, 0})).size(); };
    EXPECT_EQ(count("?"), legal_extensions(empty, a.placements_covering({0, 0})));
    EXPECT_EQ(count("?"), 20u);
    EXPECT_EQ(count("*"), 4u);
    EXPECT_EQ(count("o"), 4u);
    EXPECT_EQ(count("t"), 16u);
    EXPECT_EQ(count("2"), 1u);
}

TEST(Wildcards, PairsRespectPlacementRules) {
    const Atlas& a = atlas();
    Patch t0 = Patch(a).place({Kind::TRILOBITE, Rotation(0), {0, 0}});
    for (CellCoord tip : {CellCoord{-1, 2}, CellCoord{-1, -1}, CellCoord{2, -1}}) {
        Pattern p;
        p.cells[{0, 0}] = {CellSpec::EXACT, {{Kind::TRILOBITE, Rotation(0)}}};
        p.cells[tip] = default_legend().glyphs.at('?');
        auto seeds = expand_wildcards(a, p);
        EXPECT_EQ(seeds.size(), legal_extensions(t0, a.placements_covering(tip))) << to_string(tip);
        for (const auto& s : seeds) EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    }
}

TEST(Wildcards, MustBeEmptyExcludesCoveringChoices) {
    const Atlas& a = atlas();
    auto seeds = expand_wildcards(a, parse_rows(default_legend(), {"?_"}, {0, 0}));
    size_t want = 0;
    for (const Placement& p : a.placements_covering({0, 0})) {
        auto cells = a.cells_of(p);
        want += std::find(cells.begin(), cells.end(), CellCoord{1, 0}) == cells.end();
    }
    EXPECT_EQ(seeds.size(), want);
}

TEST(Lemmas, FirstElementaryLemmaHasFourAlternatives) {
    // Alternatives derived with tools/oracle/sat_oracle.py alts at radii 4 and 6.
    LemmaReport r = run_lemma(atlas(), lemma("E1"));
    EXPECT_EQ(r.verdict, Verdict::VERIFIED);
    std::vector<Placement> want{{Kind::TRILOBITE, Rotation(1), {0, -2}},
                                {Kind::TRILOBITE, Rotation(2), {0, -1}},
                                {Kind::CRAB, Rotation(1), {-1, -1}},
                                {Kind::CRAB, Rotation(2), {-1, -1}}};
    std::sort(want.begin(), want.end());
    EXPECT_EQ(r.alternatives_found, want);
    EXPECT_EQ(r.alternatives_expected, want);
}

TEST(Lemmas, WrongAlternativeListFails) {
    LemmaSpec s = lemma("E4");
    s.alternatives.pop_back();
    EXPECT_EQ(run_lemma(atlas(), s).verdict, Verdict::FAILED);
}

TEST(Lemmas, ForbiddingARealConfigurationFails) {
    Suite s = parse_suite("[lemma lone]\nexpect forbidden\nradii 1 2\nrow 0\n");
    LemmaReport r = run_lemma(atlas(), s.lemmas[0]);
    EXPECT_EQ(r.verdict, Verdict::FAILED);
    ASSERT_EQ(r.cases.size(), 1u);
    EXPECT_EQ(r.cases[0].outcome, "FOUND");
}

TEST(Lemmas, BudgetExhaustionIsInconclusive) {
    Suite s = parse_suite("[lemma lone]\nexpect forbidden\nradii 4\nbudget 1\nrow 0\n");
    EXPECT_EQ(run_lemma(atlas(), s.lemmas[0]).verdict, Verdict::INCONCLUSIVE);
}

TEST(Lemmas, IllegalSeedIsForbiddenWithoutSearch) {
    LemmaReport r = run_lemma(atlas(), lemma("OT-a"));
    EXPECT_EQ(r.verdict, Verdict::VERIFIED);
    EXPECT_TRUE(r.cases.empty());
}

TEST(Lemmas, RefutationsReplayWithTheReferenceModel) {
    LemmaReport r = run_lemma(atlas(), lemma("TTO-TTO"));
    ASSERT_EQ(r.verdict, Verdict::VERIFIED);
    int replayed = 0;
    for (const CaseResult& c : r.cases) {
        ASSERT_TRUE(c.window);
        auto rep = replay_refutation(atlas(), *c.window, true, c.proof, {});
        ASSERT_TRUE(rep.ok) << rep.error;
        ++replayed;
    }
    EXPECT_GT(replayed, 0);
}

TEST(Lemmas, TamperedTraceDoesNotReplay) {
    LemmaReport r = run_lemma(atlas(), lemma("OT-d"));
    ASSERT_EQ(r.verdict, Verdict::VERIFIED);
    const CaseResult* branching = nullptr;
    for (const CaseResult& c : r.cases)
        for (const Step& s : c.proof.steps)
            if (s.kind == StepKind::SUBCASE_OPEN) branching = &c;
    ASSERT_NE(branching, nullptr);
    // Dropping one subcase leaves a branch that does not cover every completion.
    DeductionTrace t = branching->proof;
    auto open = std::find_if(t.steps.begin(), t.steps.end(), [](const Step& s) { return s.kind == StepKind::SUBCASE_OPEN; });
    int depth = 0;
    auto end = open;
    do {
        depth += end->kind == StepKind::SUBCASE_OPEN;
        depth -= end->kind == StepKind::SUBCASE_CLOSE;
        ++end;
    } while (depth > 0);
    t.steps.erase(open, end);
    EXPECT_FALSE(replay_refutation(atlas(), *branching->window, true, t, {}).ok);
    // A reduction to an unknown case is rejected too.
    DeductionTrace u = branching->proof;
    for (Step& s : u.steps)
        if (s.kind == StepKind::CONTRADICTION) {
            s.kind = StepKind::REDUCED_TO;
            s.case_id = "nowhere";
            s.target.reset();
            break;
        }
    EXPECT_FALSE(replay_refutation(atlas(), *branching->window, true, u, {"TOT"}).ok);
}

TEST(Lemmas, ReducerMatchesRotatedCopies) {
    const Atlas& a = atlas();
    ReductionBase base;
    base.seeds["pair"] = {{{Kind::TRILOBITE, Rotation(0), {0, 0}}, {Kind::CRAB, Rotation(1), {-1, 2}}}};
    Reducer red = make_reducer(base, {"pair"});
    ASSERT_TRUE(red);
    Board b(a, Domain::planar({-10, -10, 10, 10}, true));
    Transform t{Rotation(3), {2, 4}};
    for (const Placement& p : base.seeds["pair"][0]) b.place(b.pid_of(apply_transform(t, p)));
    EXPECT_EQ(red(b).value_or(""), "pair");
    b.undo();
    EXPECT_FALSE(red(b));
    EXPECT_FALSE(make_reducer(base, {"other"}));
}

TEST(Lemmas, ClassifiedInitialCasesRealizeForbiddenCodes) {
    // Regression on this atlas: three codes outside the classified set extend to every radius.
    LemmaReport r = run_lemma(atlas(), lemma("initial-cases"));
    EXPECT_EQ(r.verdict, Verdict::FAILED);
    EXPECT_EQ(r.codes_found, (std::set<NeighborCode>{NeighborCode::OOT, NeighborCode::TOT, NeighborCode::TOO}));
}

TEST(Lemmas, EmptySuiteIsVacuous) {
    ProofReport r = run_all(atlas(), parse_suite("# nothing\n"));
    EXPECT_TRUE(r.vacuous);
    EXPECT_TRUE(r.lemmas.empty());
}

TEST(Lemmas, RunAllKeepsSuiteOrder) {
    Suite s;
    s.legend = default_legend();
    for (const char* n : {"E2", "E3", "OT-a"}) s.lemmas.push_back(lemma(n));
    std::vector<std::string> seen;
    RunOptions opt;
    opt.on_lemma = [&](const LemmaReport& l) { seen.push_back(l.name); };
    ProofReport r = run_all(atlas(), s, opt);
    EXPECT_EQ(seen, (std::vector<std::string>{"E2", "E3", "OT-a"}));
    EXPECT_EQ(r.overall(), Verdict::VERIFIED);
}
