#pragma once

#include "trilocrab/engine.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace trilocrab {

struct OrientedClass {
    Kind kind = Kind::CRAB;
    Rotation rot;
    auto operator<=>(const OrientedClass&) const = default;
};

enum class CellSpec { FREE, EXACT, ANY_TRILOBITE, ONE_OF, ANY_TILE, MUST_BE_EMPTY, COVERED_BY, FRONTIER };

const char* cell_spec_name(CellSpec s);

// EXACT, ANY_TRILOBITE and ONE_OF anchor a placement at the cell. COVERED_BY and
// ANY_TILE only ask for the cell to be covered (by `classes` or by anything).
struct PatternCell {
    CellSpec spec = CellSpec::FREE;
    std::vector<OrientedClass> classes;
    bool operator==(const PatternCell&) const = default;
};

struct Pattern {
    std::map<CellCoord, PatternCell> cells;
    std::optional<CellCoord> frontier() const;
};

struct Legend {
    std::map<char, PatternCell> glyphs;
    // Glyph for rendering: anchor of an oriented class, covered non-anchor cell, empty cell.
    char anchor_glyph(Kind k, Rotation r) const;
    char covered_glyph(Kind k) const;
    char empty_glyph() const;
};

Legend default_legend();

enum class Expectation { FORBIDDEN, ALTERNATIVES, CLASSIFIED, CHAIN };

const char* expectation_name(Expectation e);

struct LemmaSpec {
    std::string name;
    Pattern seed;
    Expectation expected = Expectation::FORBIDDEN;
    std::vector<Pattern> alternatives;
    std::set<NeighborCode> classified;
    std::vector<int> radii{2, 3, 4, 5, 6};
    uint64_t budget = 2'000'000;
    std::vector<std::string> reduces_to;
    int window = 0;   // CHAIN: side of the square window
    int margin = 3;   // CHAIN and CLASSIFIED: interior margin
};

struct Suite {
    Legend legend;
    std::vector<LemmaSpec> lemmas;
};

struct SuiteError : std::runtime_error {
    int line;
    SuiteError(int line, const std::string& msg);
};

Suite parse_suite(std::string_view text);
Suite load_suite_file(const std::string& path);
Pattern parse_rows(const Legend& legend, const std::vector<std::string>& rows, CellCoord origin);

// Cartesian expansion into concrete seeds, deduplicated and canonically ordered.
// Choices rejected by Patch::place are dropped.
std::vector<std::vector<Placement>> expand_wildcards(const Atlas& a, const Pattern& seed);

enum class Verdict { VERIFIED, FAILED, INCONCLUSIVE };

const char* verdict_name(Verdict v);

struct CaseResult {
    std::vector<Placement> seed;
    std::string outcome;  // REFUTED, FOUND, BUDGET_EXHAUSTED, ...
    int radius = 0;
    uint64_t nodes = 0;
    int subcases = 0;
    std::vector<std::string> reductions;
    std::optional<Window> window;
    DeductionTrace proof;
};

struct LemmaReport {
    std::string name;
    Expectation expected = Expectation::FORBIDDEN;
    Verdict verdict = Verdict::FAILED;
    int radius_used = 0;
    int subcase_count = 0;
    uint64_t nodes = 0;
    std::vector<CaseResult> cases;
    std::vector<Placement> alternatives_found;     // ALTERNATIVES
    std::vector<Placement> alternatives_expected;  // ALTERNATIVES
    std::set<NeighborCode> codes_found;            // CLASSIFIED
    std::vector<std::string> notes;
    double seconds = 0;  // wall time, excluded from serialized reports
};

struct RunOptions {
    int workers = 1;
    std::optional<std::vector<int>> radii;  // overrides every lemma's schedule
    std::optional<uint64_t> budget;         // overrides every lemma's budget
    bool record_proofs = true;
    std::function<void(const LemmaReport&)> on_lemma;  // called after each lemma of run_all
};

// Lemmas already verified, available as reduction targets by name.
struct ReductionBase {
    std::map<std::string, std::vector<std::vector<Placement>>> seeds;
};

LemmaReport run_lemma(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt = {},
                      const ReductionBase* base = nullptr);

LemmaReport run_chain_lemma(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt = {});

struct ProofReport {
    std::vector<LemmaReport> lemmas;
    bool vacuous = false;
    Verdict overall() const;
};

ProofReport run_all(const Atlas& a, const Suite& suite, const RunOptions& opt = {});

// Reducer matching any rotated and translated copy of the given seeds on the board.
Reducer make_reducer(const ReductionBase& base, const std::vector<std::string>& names);

struct ReplayResult {
    bool ok = false;
    std::string error;
    int contradictions = 0;
    int reductions = 0;
};

// Re-checks a refutation with the reference Patch model, no search: GIVEN steps must place,
// FORCED steps must be the unique legal completion of their cell, every branch must open
// every legal completion of its cell, and every subcase must end in a contradiction or a
// reduction to one of `known_cases`.
ReplayResult replay_refutation(const Atlas& a, const Window& w, bool strict, const DeductionTrace& t,
                               const std::set<std::string>& known_cases);

} // namespace trilocrab
