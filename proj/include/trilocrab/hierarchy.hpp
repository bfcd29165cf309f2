#pragma once

#include "trilocrab/engine.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace trilocrab {

struct HierarchyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Level-1 placements a super placement expands to.
std::vector<Placement> expand_supertile(const Atlas& a, const Placement& super);

// Windows scale by the template factor; policy is kept.
Patch inflate(const Patch& p, int levels);

// Single placement at the origin, inflated `levels` times, in a CLOSED window.
Patch inflate_tile(const Atlas& a, Kind kind, int levels);

struct SuperPatch {
    int level = 2;
    Patch supertiles;                                 // super-level coordinates, OPEN
    std::map<int, std::vector<Placement>> witness;    // super placement id -> owned base placements
    std::vector<Placement> unwitnessed;               // base trilobites near the rim left unclaimed
};

struct ComposeOptions {
    int margin = -1;  // interior margin; default is one supertile diameter
    int census_margin = 3;
};

// Throws HierarchyError with "UNCOMPOSABLE(...)" or "PRECONDITION_CENSUS(...)".
SuperPatch compose(const Patch& p, const ComposeOptions& opt = {});

// Axioms at the super scale plus the template alignment of every witness.
ValidityReport verify_super_axioms(const SuperPatch& s);

struct ChainDescriptor {
    CellCoord direction;              // unit diagonal, from the first member towards the last
    std::vector<Placement> members;
    std::vector<NeighborCode> tags;
};

// Chains of TTO/OTT trilobites linked through the middle tip, in canonical order.
std::vector<ChainDescriptor> detect_chains(const Patch& p, int margin = 3);

// Translates the placements strictly on the left of the chain by one diagonal step.
// Throws HierarchyError "CHAIN_NOT_SPANNING" or "SHIFT_INVALID(...)".
Patch shift_halfplane(const Patch& p, const ChainDescriptor& c, int margin = 3);

// First violation of the alternating-chain property among interior *TO trilobites, if any.
std::optional<std::string> chain_violation(const Patch& p, int margin);

} // namespace trilocrab
