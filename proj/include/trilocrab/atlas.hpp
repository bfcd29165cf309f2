#pragma once

#include "trilocrab/grid.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace trilocrab {

enum class Kind : uint8_t { TRILOBITE = 0, CRAB = 1 };
constexpr int KIND_COUNT = 2;

const char* kind_name(Kind k);
std::optional<Kind> parse_kind(std::string_view s);

using Label = uint16_t;
constexpr Label BLANK = 0;
constexpr Label UNKNOWN_LABEL = 0xFFFF;

// Position-indexed (NE, NW, SW, SE) labels meeting at a lattice point.
using CornerTuple = std::array<Label, 4>;

inline uint64_t pack_tuple(const CornerTuple& t) {
    return uint64_t(t[0]) | uint64_t(t[1]) << 16 | uint64_t(t[2]) << 32 | uint64_t(t[3]) << 48;
}

inline CornerTuple unpack_tuple(uint64_t v) {
    return {Label(v), Label(v >> 16), Label(v >> 32), Label(v >> 48)};
}

constexpr uint64_t UNKNOWN_TUPLE = ~uint64_t(0);

struct Placement {
    Kind kind = Kind::CRAB;
    Rotation rot;
    CellCoord anchor;
    auto operator<=>(const Placement&) const = default;
};

std::string to_string(const Placement& p);

struct Tip {
    CornerCoord corner;
    CellCoord contact;
};

// Straight run of cells starting next to the head, rotation-0 frame.
struct Segment {
    CellCoord start;
    CellCoord step;
};

// One quadrant label a tile contributes at a lattice point, relative to its anchor.
struct Contribution {
    CornerCoord corner;
    int quadrant;
    Label label;
};

struct TileKind {
    std::string name;
    std::vector<CellCoord> footprint;
    std::map<CornerCoord, Label> marks;
    std::vector<Tip> tips;
    std::optional<CornerCoord> head;

    // Materialized rotations.
    std::array<std::vector<CellCoord>, 4> cells;
    std::array<std::map<CornerCoord, Label>, 4> corner_marks;
    std::array<std::vector<Contribution>, 4> contributions;
    std::array<std::vector<Tip>, 4> rotated_tips;
};

struct ParityTriple {
    int a = 0;
    int b = 0;
    ParityClass p;
    auto operator<=>(const ParityTriple&) const = default;
};

struct ParityTable {
    std::set<ParityTriple> allowed;
    std::vector<Segment> segments;
    bool enabled = true;
    uint64_t mask = 0;  // bit 16a+4b+2px+py, rebuilt by Atlas::reindex
    bool allows(int a, int b, ParityClass p) const {
        return !enabled || (mask >> (16 * a + 4 * b + 2 * p.px + p.py) & 1);
    }
};

struct CornerRule {
    std::set<CornerTuple> allowed;
};

struct SupertileTemplate {
    int scale = 0;
    std::array<std::vector<Placement>, KIND_COUNT> body;
    std::array<bool, KIND_COUNT> present{};
    int core = -1;                  // index of the designated TTT trilobite in body[TRILOBITE]
    std::array<int, 3> tip_map{-1, -1, -1};  // body index met at each core tip
    int kernel = -1;                // index of the trilobite in body[CRAB], if any
};

struct AtlasError : std::runtime_error {
    int line;
    int column;
    AtlasError(int line, int column, const std::string& msg);
};

struct Atlas {
    std::string name;
    std::string hash;
    std::vector<std::string> labels;
    std::vector<Label> act;  // label image under one quarter turn
    std::array<TileKind, KIND_COUNT> tiles;
    CornerRule corner_rule;
    ParityTable parity;
    SupertileTemplate supertile;

    const TileKind& tile(Kind k) const { return tiles[int(k)]; }
    std::optional<Label> find_label(std::string_view s) const;
    Label rotate_label(Label l, Rotation r) const;
    CornerTuple rotate_tuple(const CornerTuple& t, Rotation r) const;

    std::vector<CellCoord> cells_of(const Placement& p) const;
    std::vector<Placement> placements_covering(CellCoord c) const;
    bool corner_tuple_allowed(const CornerTuple& t) const;
    // UNKNOWN_LABEL lanes are wildcards.
    bool corner_completable(uint64_t masked) const;
    int oriented_class_count() const;

    // Rebuilds lookup indexes; call after editing corner_rule or parity.
    void reindex();

private:
    std::unordered_set<uint64_t> completable_;
};

Atlas load_atlas(std::string_view text, const std::string& name = "atlas");
Atlas load_atlas_file(const std::string& path);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_atlas(const Atlas& a);

inline Placement apply_transform(const Transform& t, const Placement& p) {
    return {p.kind, p.rot + t.rotation, apply_transform(t, p.anchor)};
}

} // namespace trilocrab
