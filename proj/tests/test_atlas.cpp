#include "trilocrab/atlas.hpp"
#include "trilocrab/io.hpp"
#include "trilocrab/patch.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace trilocrab;

namespace {

const std::string bundled = std::string(TRILOCRAB_DATA_DIR) + "/trilobite_crab.atlas";

std::string bundled_text() { return read_file(bundled); }

int line_of(const std::string& text, const std::string& needle) {
    auto at = text.find(needle);
    return 1 + int(std::count(text.begin(), text.begin() + long(at), '\n'));
}

} // namespace

TEST(Atlas, BundledLoadsWithEightOrientedClasses) {
    Atlas a = load_atlas_file(bundled);
    EXPECT_EQ(a.oriented_class_count(), 8);
    EXPECT_EQ(a.tile(Kind::TRILOBITE).footprint.size(), 4u);
    EXPECT_EQ(a.tile(Kind::CRAB).footprint.size(), 1u);
    auto r = validate_atlas(a);
    EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
}

TEST(Atlas, BundledTranscriptionCounts) {
    // Regression values of the generated transcription (tools/atlas_gen.py).
    Atlas a = load_atlas_file(bundled);
    EXPECT_EQ(a.corner_rule.allowed.size(), 290u);
    EXPECT_EQ(a.parity.allowed.size(), 52u);
    EXPECT_EQ(a.labels.size(), 53u);
    EXPECT_EQ(a.supertile.scale, 3);
}

TEST(Atlas, HashIsStableAndContentSensitive) {
    std::string t = bundled_text();
    EXPECT_EQ(load_atlas(t).hash, load_atlas(t).hash);
    EXPECT_NE(load_atlas(t).hash, load_atlas(t + "# trailing comment\n").hash);
}

TEST(Atlas, RotationsMaterialized) {
    Atlas a = load_atlas_file(bundled);
    const TileKind& t = a.tile(Kind::TRILOBITE);
    for (int r = 0; r < 4; ++r) {
        EXPECT_EQ(t.cells[r].size(), 4u);
        EXPECT_EQ(t.corner_marks[r].size(), 9u);
        EXPECT_EQ(t.rotated_tips[r].size(), 3u);
    }
    // A quarter turn of the rotation-0 tips lands on the rotation-1 tips.
    for (int i = 0; i < 3; ++i)
        EXPECT_EQ(t.rotated_tips[1][i].contact, rotate_point(t.rotated_tips[0][i].contact, Rotation(1)));
}

TEST(Atlas, PlacementsCoveringACell) {
    Atlas a = load_atlas_file(bundled);
    // 4 rotations x 4 footprint cells for the trilobite, 4 rotations for the crab.
    auto v = a.placements_covering({5, -2});
    EXPECT_EQ(v.size(), 20u);
    for (const Placement& p : v) {
        auto cells = a.cells_of(p);
        EXPECT_NE(std::find(cells.begin(), cells.end(), CellCoord{5, -2}), cells.end());
    }
}

TEST(Atlas, SyntaxErrorReportsLine) {
    std::string t = bundled_text();
    std::string bad = t;
    bad.replace(bad.find("cell 1 0"), 8, "cell 1 x");
    try {
        load_atlas(bad);
        FAIL() << "expected AtlasError";
    } catch (const AtlasError& e) {
        EXPECT_EQ(e.line, line_of(t, "cell 1 0"));
        EXPECT_GT(e.column, 1);
    }
}

TEST(Atlas, UnknownSectionRejected) {
    EXPECT_THROW(load_atlas(bundled_text() + "[extras]\n"), AtlasError);
}

TEST(Atlas, UndeclaredDecorationRejected) {
    EXPECT_THROW(load_atlas(bundled_text() + "[corner-rules]\nallow nope BLANK BLANK BLANK\n"), AtlasError);
}

TEST(Atlas, EmptyFootprintRejected) {
    std::string t = bundled_text();
    // Drop the crab's only footprint cell.
    auto crab = t.find("[tile CRAB]");
    auto cell = t.find("cell 0 0\n", crab);
    t.erase(cell, 9);
    try {
        load_atlas(t);
        FAIL() << "expected AtlasError";
    } catch (const AtlasError& e) {
        EXPECT_NE(std::string(e.what()).find("footprint empty"), std::string::npos) << e.what();
    }
}

TEST(Atlas, MissingRotatedTupleIsAClosureViolation) {
    Atlas a = load_atlas_file(bundled);
    // Delete one tuple whose quarter-turn image differs from itself.
    for (const CornerTuple& t : a.corner_rule.allowed) {
        if (a.rotate_tuple(t, Rotation(1)) == t) continue;
        a.corner_rule.allowed.erase(a.rotate_tuple(t, Rotation(1)));
        break;
    }
    a.reindex();
    auto r = validate_atlas(a);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.violations.front().find("not closed under rotation"), std::string::npos);
}

TEST(Atlas, AllBlankCornerIsFlagged) {
    Atlas a = load_atlas_file(bundled);
    a.corner_rule.allowed.insert({BLANK, BLANK, BLANK, BLANK});
    a.reindex();
    EXPECT_FALSE(validate_atlas(a).ok());
}

TEST(Atlas, AsymmetricParityIsFlagged) {
    Atlas a = load_atlas_file(bundled);
    ParityTriple drop = *a.parity.allowed.begin();
    a.parity.allowed.erase({drop.b, drop.a, drop.p});
    a.parity.allowed.insert(drop);
    if (drop.a == drop.b) {
        // Self-symmetric entry: break rotation closure instead.
        a.parity.allowed.erase({(drop.a + 1) % 4, (drop.b + 1) % 4, rotate_parity(drop.p, Rotation(1))});
    }
    a.reindex();
    EXPECT_FALSE(validate_atlas(a).ok());
}

TEST(Atlas, CompletionIndexMatchesScan) {
    Atlas a = load_atlas_file(bundled);
    // Every allowed tuple with any subset of lanes masked must be completable.
    int checked = 0;
    for (const CornerTuple& t : a.corner_rule.allowed) {
        for (int mask = 0; mask < 16; ++mask) {
            CornerTuple p = t;
            for (int q = 0; q < 4; ++q)
                if (mask >> q & 1) p[q] = UNKNOWN_LABEL;
            ASSERT_TRUE(a.corner_completable(pack_tuple(p)));
            ++checked;
        }
    }
    EXPECT_EQ(checked, 290 * 16);
    // Random partial tuples: the hashed index agrees with a linear scan of the allowed set.
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> lab(0, int(a.labels.size()) - 1), coin(0, 2);
    int accepted = 0;
    for (int i = 0; i < 20000; ++i) {
        CornerTuple p;
        for (int q = 0; q < 4; ++q) p[q] = coin(rng) == 0 ? UNKNOWN_LABEL : Label(lab(rng));
        bool fast = a.corner_completable(pack_tuple(p));
        ASSERT_EQ(fast, tuple_completable_scan(a, p));
        accepted += fast;
    }
    EXPECT_GT(accepted, 0);
}
