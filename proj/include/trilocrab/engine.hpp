#pragma once

#include "trilocrab/atlas.hpp"
#include "trilocrab/board.hpp"
#include "trilocrab/patch.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace trilocrab {

enum class StepKind { GIVEN, FORCED, SUBCASE_OPEN, SUBCASE_CLOSE, REDUCED_TO, CONTRADICTION };

const char* step_kind_name(StepKind k);
std::optional<StepKind> parse_step_kind(std::string_view s);

struct Step {
    int step_no = 0;
    StepKind kind = StepKind::GIVEN;
    std::optional<Placement> placement;
    std::optional<CellCoord> target;  // trigger cell of FORCED, branch cell of SUBCASE_OPEN, dead cell of CONTRADICTION
    std::string case_id;              // REDUCED_TO
    bool operator==(const Step&) const = default;
};

struct DeductionTrace {
    std::vector<Step> steps;
    void add(StepKind kind, std::optional<Placement> p = std::nullopt, std::optional<CellCoord> target = std::nullopt,
             std::string case_id = {});
    int next_no() const { return steps.empty() ? 1 : steps.back().step_no + 1; }
    bool operator==(const DeductionTrace&) const = default;
};

// Board covering a patch's region of interest, with the patch's placements applied.
// OPEN patches get their bounding box plus a margin and strict corner checking.
Board make_board(const Patch& p, const std::vector<CellCoord>& extra = {});

std::vector<Placement> legal_completions(const Patch& p, CellCoord target);
std::vector<Placement> legal_completions(const Patch& p, CornerCoord target);

// Brute-force reference: placements_covering filtered by Patch::check.
std::vector<Placement> legal_completions_reference(const Patch& p, CellCoord target);

struct PropagateOptions {
    std::mt19937* shuffle = nullptr;  // randomized visitation order when set
};

struct PropagateResult {
    bool contradiction = false;
    std::optional<CellCoord> dead_cell;
    int forced = 0;
};

// Forced-placement closure over region slots on a board. Appends FORCED and
// CONTRADICTION steps to trace when given.
PropagateResult propagate_board(Board& b, const std::vector<int>& region, DeductionTrace* trace,
                                const PropagateOptions& opt = {});

struct Propagated {
    Patch patch;
    DeductionTrace trace;
    bool contradiction = false;
};

Propagated propagate(const Patch& p, const std::vector<CellCoord>& region, const PropagateOptions& opt = {});

enum class SearchMode { FIRST, ALL, COUNT, REFUTE };
enum class SearchStatus { REFUTED, FOUND, COMPLETE, BUDGET_EXHAUSTED };

const char* search_status_name(SearchStatus s);

struct SearchOutcome {
    SearchStatus status = SearchStatus::REFUTED;
    uint64_t nodes = 0;
    uint64_t count = 0;
    std::vector<std::vector<Placement>> solutions;  // canonical order
    DeductionTrace proof;                           // REFUTE only
    int subcases = 0;
    std::vector<std::string> reductions;            // case ids closed by reduction, in trace order
};

// Returns a case id when the board state matches an already-refuted pattern.
using Reducer = std::function<std::optional<std::string>(const Board&)>;

struct SearchOptions {
    SearchMode mode = SearchMode::REFUTE;
    uint64_t budget = 1'000'000;
    int workers = 1;
    bool record_proof = true;
    Reducer reducer;
    // Complete leaves failing this predicate count as dead ends.
    std::function<bool(const Board&)> accept;
};

// Search on a prepared board. region lists the slots that must be covered.
SearchOutcome search_board(Board& b, const std::vector<int>& region, const SearchOptions& opt,
                           const std::vector<Step>& given = {});

SearchOutcome search_region(const Patch& p, const std::vector<CellCoord>& region, const SearchOptions& opt);

struct Violation {
    std::string what;  // "uncovered cell", "corner violation", "parity violation", ...
    std::optional<CellCoord> cell;
    std::optional<CornerCoord> corner;
    std::string text() const;
    auto operator<=>(const Violation&) const = default;
};

struct ValidityReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Requires a CLOSED window.
ValidityReport validate(const Patch& p);
// Coverage of the given cells, corners whose four cells all lie in the set, parity inside the set.
ValidityReport validate_region(const Patch& p, const std::set<CellCoord>& cells);

enum class NeighborCode : uint8_t { TTT, TTO, OTT, OTO, OOT, TOT, TOO, OOO, UNDETERMINED };

const char* code_name(NeighborCode c);
std::optional<NeighborCode> parse_code(std::string_view s);
NeighborCode code_from_letters(char a, char b, char c);

// Throws std::invalid_argument (NOT_A_TRILOBITE) for crabs or unknown ids.
NeighborCode classify_trilobite(const Patch& p, int id);

// Codes of trilobites whose cells all keep `margin` cells from the window edge.
std::map<NeighborCode, int> interior_census(const Patch& p, int margin);
bool census_within(const std::map<NeighborCode, int>& census, const std::set<NeighborCode>& allowed);

enum class TorusStatus { SAT, UNSAT, BUDGET_EXHAUSTED };

const char* torus_status_name(TorusStatus s);

struct TorusOutcome {
    TorusStatus status = TorusStatus::UNSAT;
    uint64_t nodes = 0;
    std::vector<Placement> tiling;  // anchors in the fundamental domain
};

// Throws std::invalid_argument for a degenerate basis.
TorusOutcome torus_search(const Atlas& a, CellCoord u, CellCoord v, uint64_t budget, int workers = 1);

struct LatticeBasis {
    CellCoord u, v;
};

// All sublattices of index <= max_area, as Hermite bases u=(a,0), v=(b,c).
std::vector<LatticeBasis> lattices_up_to(int max_area);

} // namespace trilocrab
