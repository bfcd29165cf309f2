#pragma once

#include "trilocrab/atlas.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trilocrab {

// Half-open cell rectangle [x0,x1) x [y0,y1).
struct Window {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool contains(CellCoord c) const { return c.x >= x0 && c.x < x1 && c.y >= y0 && c.y < y1; }
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    std::vector<CellCoord> cells() const;
    auto operator<=>(const Window&) const = default;
};

enum class BoundaryPolicy { OPEN, CLOSED };

enum class CornerStatus { UNDETERMINED, SATISFIED, VIOLATED, UNCOVERABLE };

const char* status_name(CornerStatus s);

struct CornerState {
    CornerCoord corner;
    CornerStatus status = CornerStatus::UNDETERMINED;
    CornerTuple tuple_so_far{UNKNOWN_LABEL, UNKNOWN_LABEL, UNKNOWN_LABEL, UNKNOWN_LABEL};
};

enum class PlaceErrorKind { OVERLAP, OUT_OF_WINDOW, IMMEDIATE_CORNER_VIOLATION, PARITY_VIOLATION };

struct PlaceError {
    PlaceErrorKind kind;
    CellCoord cell;      // OVERLAP, OUT_OF_WINDOW, PARITY_VIOLATION (cell of the offending partner)
    CornerCoord corner;  // IMMEDIATE_CORNER_VIOLATION
    std::string message() const;
};

struct PlaceException : std::runtime_error {
    PlaceError error;
    explicit PlaceException(const PlaceError& e) : std::runtime_error(e.message()), error(e) {}
};

// Immutable partial tiling. This is the straightforward reference model: legality
// is recomputed from the cell index, with no incremental state.
class Patch {
public:
    Patch() = default;
    explicit Patch(const Atlas& atlas, std::optional<Window> window = std::nullopt,
                   BoundaryPolicy policy = BoundaryPolicy::OPEN, bool strict_corners = false);

    const Atlas& atlas() const { return *atlas_; }
    const std::optional<Window>& window() const { return window_; }
    BoundaryPolicy policy() const { return policy_; }
    bool strict_corners() const { return strict_; }

    const std::map<int, Placement>& placements() const { return placements_; }
    const std::map<CellCoord, int>& cell_index() const { return cells_; }
    std::optional<int> owner(CellCoord c) const;
    const Placement* at(CellCoord c) const;
    bool covered(CellCoord c) const { return cells_.count(c) > 0; }
    size_t size() const { return placements_.size(); }

    std::optional<PlaceError> check(const Placement& pl) const;
    Patch place(const Placement& pl) const;  // throws PlaceException
    // Bulk construction checking only overlap and window containment (throws PlaceException).
    static Patch assemble(const Atlas& atlas, std::optional<Window> window, BoundaryPolicy policy,
                          const std::vector<Placement>& placements, bool strict_corners = false);
    Patch remove(int id) const;
    Patch with_window(std::optional<Window> w, BoundaryPolicy policy) const;
    Patch with_strict(bool strict) const;

    CornerState corner_state(CornerCoord c) const;
    // Corners exempt from the rule: some incident cell lies outside a CLOSED window.
    bool exempt(CornerCoord c) const;

    // Placements sorted canonically, without ids.
    std::vector<Placement> sorted() const;

private:
    Label label_at(CornerCoord c, int quadrant) const;
    bool rays_consistent(std::optional<CellCoord>* bad) const;

    const Atlas* atlas_ = nullptr;
    std::optional<Window> window_;
    BoundaryPolicy policy_ = BoundaryPolicy::OPEN;
    bool strict_ = false;
    std::map<int, Placement> placements_;
    std::map<CellCoord, int> cells_;
    int next_id_ = 0;
};

// Brute-force scan of the allowed set; independent of the atlas's completion index.
bool tuple_completable_scan(const Atlas& a, const CornerTuple& partial);

// First parity violation along the segment family of trilobite `id`, if any.
std::optional<CellCoord> ray_violation(const Patch& p, int id);

} // namespace trilocrab
