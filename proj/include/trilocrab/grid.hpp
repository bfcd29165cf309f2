#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace trilocrab {

struct CellCoord {
    int x = 0;
    int y = 0;
    auto operator<=>(const CellCoord&) const = default;
    CellCoord operator+(CellCoord o) const { return {x + o.x, y + o.y}; }
    CellCoord operator-(CellCoord o) const { return {x - o.x, y - o.y}; }
    CellCoord operator-() const { return {-x, -y}; }
};

// Lattice point. Corner (x,y) touches cells (x-1,y-1), (x,y-1), (x-1,y), (x,y).
struct CornerCoord {
    int x = 0;
    int y = 0;
    auto operator<=>(const CornerCoord&) const = default;
};

// Quadrant of a corner, counted counterclockwise from NE.
enum Quadrant : int { NE = 0, NW = 1, SW = 2, SE = 3 };

struct Rotation {
    int quarter_turns = 0;
    constexpr Rotation() = default;
    constexpr explicit Rotation(int q) : quarter_turns(((q % 4) + 4) % 4) {}
    constexpr Rotation operator+(Rotation o) const { return Rotation(quarter_turns + o.quarter_turns); }
    constexpr Rotation inverse() const { return Rotation(-quarter_turns); }
    auto operator<=>(const Rotation&) const = default;
};

struct Transform {
    Rotation rotation;
    CellCoord translation;
    auto operator<=>(const Transform&) const = default;
};

struct ParityClass {
    int px = 0;
    int py = 0;
    auto operator<=>(const ParityClass&) const = default;
};

inline int floor_mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

inline int floor_div(int a, int m) {
    return (a - floor_mod(a, m)) / m;
}

// Counterclockwise about the center of cell (0,0): (x,y) -> (-y,x) per quarter turn.
inline CellCoord rotate_point(CellCoord p, Rotation r) {
    switch (r.quarter_turns) {
    case 1: return {-p.y, p.x};
    case 2: return {-p.x, -p.y};
    case 3: return {p.y, -p.x};
    default: return p;
    }
}

// Same rotation acting on lattice points, whose center is (1/2,1/2) in corner units.
inline CornerCoord rotate_corner(CornerCoord c, Rotation r) {
    switch (r.quarter_turns) {
    case 1: return {1 - c.y, c.x};
    case 2: return {1 - c.x, 1 - c.y};
    case 3: return {c.y, 1 - c.x};
    default: return c;
    }
}

inline CellCoord apply_transform(const Transform& t, CellCoord p) {
    return rotate_point(p, t.rotation) + t.translation;
}

inline CornerCoord apply_transform(const Transform& t, CornerCoord c) {
    CornerCoord r = rotate_corner(c, t.rotation);
    return {r.x + t.translation.x, r.y + t.translation.y};
}

// compose(a,b) applies b first, then a.
inline Transform compose(const Transform& a, const Transform& b) {
    return {a.rotation + b.rotation, rotate_point(b.translation, a.rotation) + a.translation};
}

inline Transform inverse(const Transform& t) {
    Rotation inv = t.rotation.inverse();
    return {inv, -rotate_point(t.translation, inv)};
}

inline ParityClass parity(CellCoord p) {
    return {floor_mod(p.x, 2), floor_mod(p.y, 2)};
}

// Displacement parity seen after rotating the frame; odd turns swap the axes.
inline ParityClass rotate_parity(ParityClass p, Rotation r) {
    return r.quarter_turns % 2 ? ParityClass{p.py, p.px} : p;
}

inline CellCoord incident_cell(CornerCoord c, int quadrant) {
    switch (quadrant) {
    case NE: return {c.x, c.y};
    case NW: return {c.x - 1, c.y};
    case SW: return {c.x - 1, c.y - 1};
    default: return {c.x, c.y - 1};
    }
}

inline std::array<CellCoord, 4> incident_cells(CornerCoord c) {
    return {incident_cell(c, NE), incident_cell(c, NW), incident_cell(c, SW), incident_cell(c, SE)};
}

// Corners of a cell, indexed by the quadrant the cell occupies at that corner.
inline CornerCoord cell_corner(CellCoord p, int quadrant) {
    switch (quadrant) {
    case NE: return {p.x, p.y};
    case NW: return {p.x + 1, p.y};
    case SW: return {p.x + 1, p.y + 1};
    default: return {p.x, p.y + 1};
    }
}

inline std::array<CornerCoord, 4> cell_corners(CellCoord p) {
    return {cell_corner(p, NE), cell_corner(p, NW), cell_corner(p, SW), cell_corner(p, SE)};
}

inline std::string to_string(CellCoord p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

inline std::string to_string(CornerCoord c) {
    return "<" + std::to_string(c.x) + "," + std::to_string(c.y) + ">";
}

struct CellHash {
    size_t operator()(CellCoord p) const {
        return std::hash<uint64_t>{}((uint64_t(uint32_t(p.x)) << 32) | uint32_t(p.y));
    }
};

struct CornerHash {
    size_t operator()(CornerCoord p) const {
        return std::hash<uint64_t>{}((uint64_t(uint32_t(p.x)) << 32) | uint32_t(p.y));
    }
};

} // namespace trilocrab
