#pragma once

#include "trilocrab/atlas.hpp"
#include "trilocrab/patch.hpp"

#include <cstdint>
#include <vector>

namespace trilocrab {

// Finite cell set the board searches over: a planar window, or the quotient
// Z^2 / (uZ + vZ) held in Hermite normal form u = (a,0), v = (b,c), 0 <= b < a.
struct Domain {
    enum class Type { PLANAR, TORUS } type = Type::PLANAR;
    Window window;
    int a = 1, b = 0, c = 1;
    bool strict = false;  // check boundary corners with outside quadrants as wildcards

    static Domain planar(Window w, bool strict = false);
    static Domain torus(CellCoord u, CellCoord v);  // throws std::invalid_argument if degenerate

    int size() const;
    int slot(CellCoord p) const;  // -1 outside a planar window
    CellCoord coord(int slot) const;
};

class Board {
public:
    Board(const Atlas& atlas, const Domain& domain);

    const Atlas& atlas() const { return *atlas_; }
    const Domain& domain() const { return domain_; }
    int num_cells() const { return n_; }
    int slot(CellCoord c) const { return domain_.slot(c); }
    CellCoord coord(int s) const { return domain_.coord(s); }

    int pid_of(const Placement& p) const;  // -1 if not embeddable
    Placement placement(int pid) const;
    const std::vector<int>& covering(int slot) const { return cover_[slot]; }
    int cell_count(int pid) const { return pcount_[pid]; }
    const int* cells(int pid) const { return &pcells_[size_t(pid) * 4]; }

    int owner(int s) const { return owner_[s]; }
    bool covered(int s) const { return owner_[s] >= 0; }
    int uncovered() const { return n_ - covered_; }

    bool legal(int pid) const;
    void place(int pid);
    void undo();
    size_t depth() const { return trail_.size(); }
    const std::vector<int>& trail() const { return trail_; }

    uint64_t corner_value(CornerCoord c) const;

private:
    struct CornerUpdate {
        int corner;
        uint64_t mask;
        uint64_t value;
    };
    struct Occ {
        int pid = -1;
        int kind = -1;
        int rot = 0;
        CellCoord offset;
    };

    int corner_slot(CornerCoord c) const;
    Occ occ(int s, int pid_virtual) const;  // pid_virtual counts as placed
    bool parity_ok(int pid) const;

    const Atlas* atlas_;
    Domain domain_;
    int n_ = 0;
    int ncorners_ = 0;
    int limit_ = 0;

    std::vector<uint8_t> pvalid_;
    std::vector<uint8_t> pcount_;
    std::vector<int> pcells_;               // 4 slots per pid
    std::vector<CellCoord> poffsets_;       // 4 footprint offsets per pid
    std::vector<int> pupd_begin_;
    std::vector<CornerUpdate> updates_;
    std::vector<std::vector<int>> cover_;
    std::vector<uint8_t> exempt_;
    std::vector<CellCoord> seg_pred_;       // per rotation*segments: predecessor offset of the ray start

    std::vector<int> owner_;
    std::vector<CellCoord> owner_off_;
    std::vector<uint64_t> corners_;
    int covered_ = 0;
    std::vector<int> trail_;
    std::vector<std::pair<int, uint64_t>> saved_;
    std::vector<size_t> saved_mark_;
};

} // namespace trilocrab
