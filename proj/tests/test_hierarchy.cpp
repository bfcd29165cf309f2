#include "trilocrab/hierarchy.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace trilocrab;

namespace {

const Atlas& atlas() {
    static Atlas a = load_atlas_file(std::string(TRILOCRAB_DATA_DIR) + "/trilobite_crab.atlas");
    return a;
}

int trilobites(const Patch& p) {
    int n = 0;
    for (auto& [id, q] : p.placements()) n += q.kind == Kind::TRILOBITE;
    return n;
}

std::vector<Placement> sorted_expansion(const Patch& supers) {
    std::vector<Placement> out;
    for (auto& [id, s] : supers.placements())
        for (const Placement& q : expand_supertile(atlas(), s)) out.push_back(q);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(Inflate, TrilobiteCountsPerLevel) {
    // T -> 4T + 20C and C -> 1T + 5C.
    const int expect[] = {4, 36, 324};
    for (int k = 1; k <= 3; ++k) EXPECT_EQ(trilobites(inflate_tile(atlas(), Kind::TRILOBITE, k)), expect[k - 1]);
    EXPECT_EQ(trilobites(inflate_tile(atlas(), Kind::CRAB, 1)), 1);
    EXPECT_EQ(inflate_tile(atlas(), Kind::CRAB, 1).size(), 6u);
}

TEST(Inflate, WindowsScaleAndStayCovered) {
    for (int k = 1; k <= 3; ++k) {
        Patch p = inflate_tile(atlas(), Kind::TRILOBITE, k);
        int side = 2;
        for (int i = 0; i < k; ++i) side *= 3;
        EXPECT_EQ(p.window()->width(), side);
        EXPECT_EQ(p.window()->height(), side);
        auto r = validate(p);
        EXPECT_TRUE(r.ok()) << (r.ok() ? "" : r.violations.front().text());
    }
}

TEST(Inflate, SupertileCoversTheScaledFootprint) {
    const Atlas& a = atlas();
    int sc = a.supertile.scale;
    for (Kind k : {Kind::TRILOBITE, Kind::CRAB})
        for (int r = 0; r < 4; ++r) {
            Placement s{k, Rotation(r), {2, -1}};
            std::multiset<CellCoord> got, want;
            for (const Placement& q : expand_supertile(a, s))
                for (CellCoord c : a.cells_of(q)) got.insert(c);
            for (CellCoord c : a.cells_of(s))
                for (int i = 0; i < sc; ++i)
                    for (int j = 0; j < sc; ++j) want.insert({sc * c.x + i, sc * c.y + j});
            EXPECT_EQ(got, want) << kind_name(k) << " rotation " << r;
        }
}

TEST(Inflate, SupertileExpansionIsRotationEquivariant) {
    // Rotating the rotation-0 expansion gives the rotation-r expansion up to a translation.
    const Atlas& a = atlas();
    for (Kind k : {Kind::TRILOBITE, Kind::CRAB})
        for (int r = 1; r < 4; ++r) {
            auto base = expand_supertile(a, {k, Rotation(0), {0, 0}});
            auto got = expand_supertile(a, {k, Rotation(r), {0, 0}});
            std::vector<Placement> want;
            for (const Placement& q : base) want.push_back(apply_transform(Transform{Rotation(r), {0, 0}}, q));
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            ASSERT_EQ(got.size(), want.size());
            CellCoord d = got.front().anchor - want.front().anchor;
            for (Placement& q : want) q.anchor = q.anchor + d;
            std::sort(want.begin(), want.end());
            EXPECT_EQ(got, want) << kind_name(k) << " rotation " << r;
        }
}

TEST(Compose, InvertsOneInflation) {
    Patch p = inflate_tile(atlas(), Kind::TRILOBITE, 1);
    SuperPatch s = compose(p);
    ASSERT_EQ(s.supertiles.size(), 1u);
    EXPECT_EQ(s.supertiles.placements().begin()->second, (Placement{Kind::TRILOBITE, Rotation(0), {0, 0}}));
    EXPECT_EQ(sorted_expansion(s.supertiles), p.sorted());
    EXPECT_TRUE(s.unwitnessed.empty());
    EXPECT_TRUE(verify_super_axioms(s).ok());
}

TEST(Compose, RoundTripWithCensusCheckOff) {
    // The grouping itself inverts inflation; only the census precondition stops it at k >= 2.
    for (int k = 2; k <= 3; ++k) {
        Patch p = inflate_tile(atlas(), Kind::TRILOBITE, k);
        ComposeOptions opt;
        opt.census_margin = 1 << 20;
        SuperPatch s = compose(p, opt);
        EXPECT_EQ(sorted_expansion(s.supertiles), p.sorted()) << "k=" << k;
        EXPECT_EQ(s.supertiles.sorted(), inflate_tile(atlas(), Kind::TRILOBITE, k - 1).sorted());
    }
}

TEST(Compose, CensusPreconditionOnLevelTwo) {
    // Regression: the second inflation has an interior OOT trilobite.
    try {
        compose(inflate_tile(atlas(), Kind::TRILOBITE, 2));
        FAIL() << "expected HierarchyError";
    } catch (const HierarchyError& e) {
        EXPECT_STREQ(e.what(), "PRECONDITION_CENSUS(OOT at (4,10))");
    }
}

TEST(Compose, LevelTwoInteriorCensus) {
    auto c = interior_census(inflate_tile(atlas(), Kind::TRILOBITE, 2), 3);
    std::map<NeighborCode, int> want{{NeighborCode::TTT, 4}, {NeighborCode::OTT, 1}, {NeighborCode::OTO, 1},
                                     {NeighborCode::OOT, 2}, {NeighborCode::TOO, 1}, {NeighborCode::OOO, 7}};
    EXPECT_EQ(c, want);
    EXPECT_FALSE(census_within(c, {NeighborCode::TTT, NeighborCode::OTO, NeighborCode::OOO}));
    EXPECT_TRUE(census_within(interior_census(inflate_tile(atlas(), Kind::TRILOBITE, 1), 1),
                              {NeighborCode::TTT, NeighborCode::OTO, NeighborCode::OOO}));
}

TEST(Compose, StrayTrilobiteIsUncomposable) {
    // A lone trilobite deep inside a crab field belongs to no supertile.
    const Atlas& a = atlas();
    std::vector<Placement> pls{{Kind::TRILOBITE, Rotation(0), {10, 10}}};
    Patch p = Patch::assemble(a, Window{0, 0, 24, 24}, BoundaryPolicy::CLOSED, pls);
    ComposeOptions opt;
    opt.census_margin = 1 << 20;
    EXPECT_THROW(
        {
            try {
                compose(p, opt);
            } catch (const HierarchyError& e) {
                EXPECT_NE(std::string(e.what()).find("UNCOMPOSABLE"), std::string::npos) << e.what();
                throw;
            }
        },
        HierarchyError);
}

TEST(Chains, StarTOTrilobitesAreIsolatedInInflations) {
    // On this atlas every *TO trilobite of an inflation sits alone, so no chain spans.
    Patch p = inflate_tile(atlas(), Kind::TRILOBITE, 2);
    auto chains = detect_chains(p, 3);
    ASSERT_EQ(chains.size(), 1u);
    EXPECT_EQ(chains[0].members.size(), 1u);
    EXPECT_EQ(chains[0].tags, std::vector<NeighborCode>{NeighborCode::OTT});
    EXPECT_EQ(chain_violation(p, 3).value_or(""), "chain at (8,4): not diagonal");
    EXPECT_THROW(shift_halfplane(p, chains[0], 3), HierarchyError);
}

TEST(Chains, NoChainsAtLevelOne) {
    Patch p = inflate_tile(atlas(), Kind::TRILOBITE, 1);
    EXPECT_TRUE(detect_chains(p, 1).empty());
    EXPECT_FALSE(chain_violation(p, 1));
}
