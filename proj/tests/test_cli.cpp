#include "trilocrab/cli.hpp"
#include "trilocrab/hierarchy.hpp"
#include "trilocrab/io.hpp"
#include "trilocrab/render.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace trilocrab;
namespace fs = std::filesystem;

namespace {

const std::string data_dir = TRILOCRAB_DATA_DIR;
const std::string golden_dir = std::string(TRILOCRAB_TEST_DIR) + "/golden";

const Atlas& atlas() {
    static Atlas a = load_atlas_file(data_dir + "/trilobite_crab.atlas");
    return a;
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "trilocrab_test_cli";
    fs::create_directories(d);
    return d / name;
}

// TRILOCRAB_UPDATE_GOLDEN=1 rewrites the file instead of comparing.
void expect_golden(const std::string& name, const std::string& got) {
    std::string path = golden_dir + "/" + name;
    if (std::getenv("TRILOCRAB_UPDATE_GOLDEN")) {
        fs::create_directories(golden_dir);
        write_file(path, got);
        return;
    }
    EXPECT_EQ(got, read_file(path)) << name;
}

} // namespace

TEST(Cli, ValidateBundledAtlas) {
    CliRun r = cli({"atlas", "validate"});
    EXPECT_EQ(r.code, EXIT_PASS) << r.out << r.err;
    EXPECT_NE(r.out.find("oriented tile classes 8"), std::string::npos);
}

TEST(Cli, ValidateSyntaxErrorIsInputError) {
    std::string t = read_file(data_dir + "/trilobite_crab.atlas");
    t.replace(t.find("[corner-rules]"), 14, "[corner-rules");
    write_file(scratch("bad.atlas").string(), t);
    CliRun r = cli({"atlas", "validate", scratch("bad.atlas").string()});
    EXPECT_EQ(r.code, EXIT_INPUT_ERROR);
    EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(Cli, ValidateClosureFailureIsVerifiedFailure) {
    std::string t = read_file(data_dir + "/trilobite_crab.atlas");
    // Drop the first allowed tuple; it has distinct rotations, so closure breaks.
    auto at = t.find("\nallow ");
    t.erase(at, t.find('\n', at + 1) - at);
    write_file(scratch("open.atlas").string(), t);
    CliRun r = cli({"atlas", "validate", scratch("open.atlas").string()});
    EXPECT_EQ(r.code, EXIT_VERIFIED_FAILURE);
    EXPECT_NE(r.out.find("not closed under rotation"), std::string::npos) << r.out;
}

TEST(Cli, MutationAtlasesLoad) {
    for (const char* m : {"drop_tuple", "weak_parity"})
        EXPECT_EQ(cli({"atlas", "validate", data_dir + "/mutations/" + m + ".atlas"}).code, EXIT_PASS) << m;
    EXPECT_EQ(cli({"atlas", "validate", data_dir + "/mutations/all_blank.atlas"}).code, EXIT_VERIFIED_FAILURE);
}

TEST(Cli, SingleCellTorusIsUnsat) {
    CliRun r = cli({"torus", "1", "0", "0", "1"});
    EXPECT_EQ(r.code, EXIT_PASS);
    EXPECT_EQ(r.out, "UNSAT\n");
}

TEST(Cli, TorusArgumentErrors) {
    EXPECT_EQ(cli({"torus", "1", "1", "2", "2"}).code, EXIT_INPUT_ERROR);
    EXPECT_EQ(cli({"torus"}).code, EXIT_INPUT_ERROR);
}

TEST(Cli, PeriodicTilingIsAVerifiedFailure) {
    CliRun r = cli({"torus", "3", "0", "0", "6"});
    EXPECT_EQ(r.code, EXIT_VERIFIED_FAILURE);
    EXPECT_EQ(r.out.substr(0, 4), "SAT\n");
}

TEST(Cli, UnknownCommandAndMissingFiles) {
    EXPECT_EQ(cli({"frobnicate"}).code, EXIT_INPUT_ERROR);
    EXPECT_EQ(cli({"compose", "/nonexistent/patch.json"}).code, EXIT_INPUT_ERROR);
    EXPECT_EQ(cli({"prove", "--suite", "/nonexistent/x.suite", "--torus-area", "0"}).code, EXIT_INPUT_ERROR);
    EXPECT_EQ(cli({"--atlas", "/nonexistent/a.atlas", "torus", "1", "0", "0", "1"}).code, EXIT_INPUT_ERROR);
}

TEST(Cli, InflateThenCompose) {
    fs::path f = scratch("inflate1.json");
    CliRun r = cli({"inflate", "1", "--out", f.string()});
    ASSERT_EQ(r.code, EXIT_PASS) << r.err;
    EXPECT_NE(r.out.find("trilobites 4"), std::string::npos) << r.out;
    fs::path g = scratch("compose1.json");
    CliRun c = cli({"compose", f.string(), "--out", g.string()});
    EXPECT_EQ(c.code, EXIT_PASS) << c.out << c.err;
    int level = 0;
    Patch s = patch_from_json(atlas(), read_file(g.string()), &level);
    EXPECT_GT(level, 0);
    EXPECT_EQ(s.size(), 1u);
}

TEST(Cli, ComposeReportsCensusFailure) {
    fs::path f = scratch("inflate2.json");
    ASSERT_EQ(cli({"inflate", "2", "--out", f.string()}).code, EXIT_PASS);
    CliRun c = cli({"compose", f.string()});
    EXPECT_EQ(c.code, EXIT_VERIFIED_FAILURE);
    EXPECT_NE(c.err.find("PRECONDITION_CENSUS"), std::string::npos) << c.err;
    CliRun s = cli({"shift", f.string()});
    EXPECT_EQ(s.code, EXIT_VERIFIED_FAILURE);
    EXPECT_FALSE(s.err.empty());
}

TEST(Cli, SearchCompletesABlankPage) {
    Window w = *inflate_tile(atlas(), Kind::TRILOBITE, 1).window();
    fs::path f = scratch("page.json");
    write_file(f.string(), patch_to_json(Patch(atlas(), w, BoundaryPolicy::CLOSED)));
    CliRun r = cli({"search", f.string(), "--mode", "first", "--out", scratch("sol.json").string()});
    EXPECT_EQ(r.code, EXIT_PASS) << r.out << r.err;
    Patch sol = patch_from_json(atlas(), read_file(scratch("sol.json").string()));
    EXPECT_TRUE(validate(sol).ok());
    for (CellCoord c : w.cells()) EXPECT_TRUE(sol.covered(c)) << to_string(c);
    CliRun c = cli({"search", f.string(), "--mode", "count", "--budget", "1"});
    EXPECT_EQ(c.code, EXIT_INCONCLUSIVE) << c.out;
    EXPECT_EQ(cli({"search", f.string(), "--mode", "sideways"}).code, EXIT_INPUT_ERROR);
    write_file(f.string(), patch_to_json(Patch(atlas())));
    EXPECT_EQ(cli({"search", f.string()}).code, EXIT_INPUT_ERROR);
}

TEST(Cli, ProveWithTinyBudgetIsInconclusive) {
    CliRun r = cli({"prove", "--budget", "1", "--torus-area", "0"});
    EXPECT_EQ(r.code, EXIT_INCONCLUSIVE) << r.out;
    EXPECT_NE(r.out.find("verdict INCONCLUSIVE"), std::string::npos);
}

TEST(Cli, ProveRejectsVacuousSuite) {
    fs::path f = scratch("empty.suite");
    write_file(f.string(), "# no lemmas\n");
    CliRun r = cli({"prove", "--suite", f.string(), "--torus-area", "0"});
    EXPECT_EQ(r.code, EXIT_VERIFIED_FAILURE);
    EXPECT_NE(r.out.find("suite has no lemmas"), std::string::npos) << r.out;
}

TEST(Cli, ProveWritesReplayableFigures) {
    fs::path f = scratch("small.suite");
    std::string suite = read_file(data_dir + "/lemmas.suite");
    write_file(f.string(), suite.substr(0, suite.find("[lemma E2]")));
    fs::path out = scratch("prove_small");
    fs::remove_all(out);
    CliRun r = cli({"prove", "--suite", f.string(), "--torus-area", "4", "--out", out.string()});
    EXPECT_TRUE(fs::exists(out / "report.json"));
    EXPECT_TRUE(fs::exists(out / "report.txt"));
    int figures = 0;
    for (auto& e : fs::directory_iterator(out / "traces")) {
        fs::path svg = out / "figures" / (e.path().stem().string() + ".svg");
        ASSERT_TRUE(fs::exists(svg)) << svg;
        DeductionTrace t = trace_from_json(read_file(e.path().string()));
        EXPECT_FALSE(t.steps.empty());
        ++figures;
    }
    EXPECT_GT(figures, 0);
    EXPECT_NE(r.out.find("proof traces replayed"), std::string::npos);
}

TEST(Io, PatchRoundTrip) {
    Patch p = inflate_tile(atlas(), Kind::TRILOBITE, 1);
    std::string js = patch_to_json(p);
    Patch q = patch_from_json(atlas(), js);
    EXPECT_EQ(q.sorted(), p.sorted());
    EXPECT_EQ(q.window(), p.window());
    EXPECT_EQ(q.policy(), p.policy());
    EXPECT_EQ(patch_to_json(q), js);
}

TEST(Io, PatchRejectsForeignAtlasAndOverlap) {
    Patch p = Patch(atlas()).place({Kind::TRILOBITE, Rotation(0), {0, 0}});
    std::string js = patch_to_json(p);
    std::string other = js;
    other.replace(other.find(atlas().hash), atlas().hash.size(), std::string(atlas().hash.size(), '0'));
    EXPECT_THROW(patch_from_json(atlas(), other), IoError);
    std::string overlap = js;
    auto at = overlap.find("\"placements\"");
    overlap.insert(overlap.find('[', at) + 1, "{\"kind\":\"CRAB\",\"rot\":0,\"x\":1,\"y\":1},");
    EXPECT_THROW(patch_from_json(atlas(), overlap), IoError);
    EXPECT_THROW(patch_from_json(atlas(), "{not json"), IoError);
}

TEST(Io, TraceRoundTrip) {
    DeductionTrace t;
    t.add(StepKind::GIVEN, Placement{Kind::TRILOBITE, Rotation(2), {1, -3}});
    t.add(StepKind::FORCED, Placement{Kind::CRAB, Rotation(1), {0, 0}}, CellCoord{0, 0});
    t.add(StepKind::SUBCASE_OPEN, Placement{Kind::CRAB, Rotation(3), {2, 0}}, CellCoord{2, 0});
    t.add(StepKind::REDUCED_TO, std::nullopt, std::nullopt, "TOT");
    t.add(StepKind::SUBCASE_CLOSE);
    t.add(StepKind::CONTRADICTION, std::nullopt, CellCoord{5, 5});
    EXPECT_EQ(trace_from_json(trace_to_json(t)), t);
}

TEST(Render, BlankPage) {
    CliRun r = cli({"render", "--format", "ascii", "--window", "0", "0", "20", "28"});
    ASSERT_EQ(r.code, EXIT_PASS);
    std::string row(20, '.');
    std::string want;
    for (int i = 0; i < 28; ++i) want += row + "\n";
    EXPECT_EQ(r.out, want);
    CliRun s = cli({"render", "--format", "svg", "--window", "0", "0", "20", "28"});
    expect_golden("blank_20x28.svg", s.out);
}

TEST(Render, GoldenSupertile) {
    Patch p = inflate_tile(atlas(), Kind::TRILOBITE, 1);
    expect_golden("supertile.txt", render_ascii(p));
    expect_golden("supertile.svg", render_svg(p));
}

TEST(Render, AsciiUsesTheSuiteLegend) {
    // Rendered anchors parse back to the same placements.
    Patch p = inflate_tile(atlas(), Kind::TRILOBITE, 1);
    std::string text = render_ascii(p);
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    Pattern pat = parse_rows(default_legend(), rows, {p.window()->x0, p.window()->y1 - 1});
    std::vector<Placement> back;
    for (auto& [c, pc] : pat.cells)
        if (pc.spec == CellSpec::EXACT) back.push_back({pc.classes[0].kind, pc.classes[0].rot, c});
    std::sort(back.begin(), back.end());
    EXPECT_EQ(back, p.sorted());
}

TEST(Render, TraceFigureIsDeterministicAndUsesPalette) {
    DeductionTrace t;
    t.add(StepKind::GIVEN, Placement{Kind::TRILOBITE, Rotation(0), {0, 0}});
    t.add(StepKind::FORCED, Placement{Kind::CRAB, Rotation(1), {-1, 2}}, CellCoord{-1, 2});
    t.add(StepKind::CONTRADICTION, std::nullopt, CellCoord{-1, -1});
    Window w{-3, -3, 4, 5};
    std::string a = render_trace_svg(atlas(), w, t);
    EXPECT_EQ(a, render_trace_svg(atlas(), w, t));
    EXPECT_NE(a.find("black"), std::string::npos);
    EXPECT_NE(a.find("gray"), std::string::npos);
    EXPECT_NE(a.find("red"), std::string::npos);
    expect_golden("trace.svg", a);
}
