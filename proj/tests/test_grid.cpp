#include <catch2/catch.hpp>

#include <random>

#include <vouw/grid.hpp>

#include "helpers.hpp"

using namespace vouw;

TEST_CASE("pattern_from_cells normalizes and validates") {
    SECTION("singleton") {
        const Pattern p = pattern_from_cells({{0, 0, 5}});
        CHECK(p.rows() == 1);
        CHECK(p.cols() == 1);
        CHECK(p.cardinality() == 1);
        CHECK(p.cells()[0].symbol == 5);
        CHECK(p == Pattern::singleton(5));
    }

    SECTION("translation is normalized away by the minimal bounding box") {
        const Pattern p = pattern_from_cells({{2, 2, 1}, {2, 3, 2}, {3, 3, 1}});
        CHECK(p.rows() == 2);
        CHECK(p.cols() == 2);
        CHECK(p.cardinality() == 3);
        const std::vector<PatternCell> expected{{0, 0, 1}, {0, 1, 2}, {1, 1, 1}};
        CHECK(std::vector<PatternCell>(p.cells().begin(), p.cells().end()) == expected);
    }

    SECTION("a gap of one column breaks 8-adjacency") {
        CHECK_THROWS_AS(pattern_from_cells({{0, 0, 1}, {0, 2, 1}}), AdjacencyViolation);
    }

    SECTION("diagonal chains are adjacent") {
        CHECK_NOTHROW(pattern_from_cells({{0, 0, 1}, {1, 1, 1}, {2, 2, 1}}));
    }

    SECTION("empty input and duplicate positions are rejected") {
        CHECK_THROWS_AS(pattern_from_cells({}), std::invalid_argument);
        CHECK_THROWS_AS(pattern_from_cells({{0, 0, 1}, {0, 0, 2}}),
                        std::invalid_argument);
    }

    SECTION("translation invariance") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const Pattern base = testutil::random_pattern(1 + trial % 9, 4, rng);
            std::vector<PatternCell> shifted(base.cells().begin(), base.cells().end());
            for (auto& c : shifted) {
                c.row += 13 - trial;
                c.col += trial - 29;
            }
            CHECK(pattern_from_cells(shifted) == base);
        }
    }
}

TEST_CASE("pivot is the first non-empty element in row-major order") {
    CHECK(pivot(Pattern::singleton(3)) == RowCol{0, 0});
    // Non-empties at (0,1) and (1,0): row-major order puts (0,1) first.
    const Pattern p = pattern_from_cells({{0, 1, 2}, {1, 0, 3}});
    CHECK(pivot(p) == RowCol{0, 1});

    std::vector<PatternCell> full;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) full.push_back({r, c, 1});
    CHECK(pivot(pattern_from_cells(full)) == RowCol{0, 0});

    SECTION("pivot minimality over random patterns") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 100; ++trial) {
            const Pattern p = testutil::random_pattern(1 + trial % 12, 4, rng);
            const RowCol pv = pivot(p);
            for (const PatternCell& c : p.cells())
                CHECK(RowCol{c.row, c.col} >= pv);
        }
    }
}

TEST_CASE("instantiate places the pivot and preserves distances") {
    SECTION("singleton") {
        const SparseOverlay o = instantiate(Pattern::singleton(7), {3, 4}, 8, 8);
        REQUIRE(o.cardinality() == 1);
        CHECK(o.entries()[0] == OverlayEntry{3, 4, 7});
    }

    SECTION("two-cell horizontal pattern") {
        const Pattern p = pattern_from_cells({{0, 0, 1}, {0, 1, 2}});
        const SparseOverlay o = instantiate(p, {1, 1}, 4, 4);
        REQUIRE(o.cardinality() == 2);
        CHECK(o.entries()[0] == OverlayEntry{1, 1, 1});
        CHECK(o.entries()[1] == OverlayEntry{1, 2, 2});
    }

    SECTION("element left of the pivot falls outside the matrix") {
        // Pivot sits at column 1 of the box; placing it at (0,0) pushes the
        // (1,0) element to column -1.
        const Pattern p = pattern_from_cells({{0, 1, 2}, {1, 0, 3}});
        CHECK_THROWS_AS(instantiate(p, {0, 0}, 4, 4), OutOfBounds);
        CHECK_NOTHROW(instantiate(p, {0, 1}, 4, 4));
    }
}

TEST_CASE("deinstantiate inverts instantiate") {
    SECTION("singleton") {
        const SparseOverlay o(8, 8, {{3, 4, 7}});
        const auto [p, offset] = deinstantiate(o);
        CHECK(p == Pattern::singleton(7));
        CHECK(offset == Offset{3, 4});
    }

    SECTION("bounding box trim reports the pivot position") {
        const SparseOverlay o(4, 4, {{1, 1, 9}, {2, 0, 8}});
        const auto [p, offset] = deinstantiate(o);
        CHECK(p.rows() == 2);
        CHECK(p.cols() == 2);
        CHECK(pivot(p) == RowCol{0, 1});
        CHECK(offset == Offset{1, 1});
    }

    SECTION("empty overlay") {
        CHECK_THROWS_AS(deinstantiate(SparseOverlay(4, 4, {})), EmptyOverlay);
    }

    SECTION("round trip over random patterns and placements") {
        std::mt19937_64 rng(42);
        const int rows = 12, cols = 12;
        for (int trial = 0; trial < 1000; ++trial) {
            const Pattern p = testutil::random_pattern(1 + trial % 10, 8, rng);
            if (p.rows() > rows || p.cols() > cols) continue;
            const RowCol pv = pivot(p);
            std::uniform_int_distribution<int> r_dist(pv.row, rows - p.rows() + pv.row);
            std::uniform_int_distribution<int> c_dist(pv.col, cols - p.cols() + pv.col);
            const RowCol at{r_dist(rng), c_dist(rng)};
            const auto [q, offset] = deinstantiate(instantiate(p, at, rows, cols));
            CHECK(q == p);
            CHECK(offset == Offset{at.row, at.col});
        }
    }
}

TEST_CASE("superpose is defined exactly for disjoint overlays") {
    const SparseOverlay a(4, 4, {{0, 0, 1}});
    const SparseOverlay b(4, 4, {{0, 1, 2}});
    const SparseOverlay sum = superpose(a, b);
    CHECK(sum.cardinality() == 2);
    CHECK(sum.entries()[0] == OverlayEntry{0, 0, 1});
    CHECK(sum.entries()[1] == OverlayEntry{0, 1, 2});

    CHECK_THROWS_AS(superpose(a, SparseOverlay(4, 4, {{0, 0, 1}})), OverlapError);
    CHECK_THROWS_AS(superpose(a, SparseOverlay(4, 5, {{0, 1, 2}})), DimMismatch);

    SECTION("cardinality is additive on random disjoint overlays") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            std::set<std::pair<int, int>> pos_a, pos_b;
            std::uniform_int_distribution<int> d(0, 9);
            for (int k = 0; k < 8; ++k) pos_a.insert({d(rng), d(rng)});
            for (int k = 0; k < 8; ++k) {
                const std::pair<int, int> p{d(rng), d(rng)};
                if (!pos_a.count(p)) pos_b.insert(p);
            }
            auto to_overlay = [](const std::set<std::pair<int, int>>& pos) {
                std::vector<OverlayEntry> entries;
                for (auto [r, c] : pos) entries.push_back({r, c, 1});
                return SparseOverlay(10, 10, std::move(entries));
            };
            const auto sum2 = superpose(to_overlay(pos_a), to_overlay(pos_b));
            // Oracle: size of the set union.
            std::set<std::pair<int, int>> all = pos_a;
            all.insert(pos_b.begin(), pos_b.end());
            CHECK(static_cast<std::size_t>(sum2.cardinality()) == all.size());
        }
    }
}

TEST_CASE("union_pattern merges two patterns at a pivot offset") {
    SECTION("three-cell and two-cell pattern union has five cells") {
        const Pattern x = pattern_from_cells({{0, 0, 1}, {0, 1, 2}, {1, 1, 2}});
        const Pattern y = pattern_from_cells({{0, 0, 2}, {0, 1, 2}});
        const Pattern z = union_pattern(x, y, {1, -1});
        CHECK(z.cardinality() == 5);
        CHECK(z.rows() == 2);
        CHECK(z.cols() == 3);
        // The merged pattern pivots on x's pivot element.
        const std::vector<PatternCell> expected{
            {0, 1, 1}, {0, 2, 2}, {1, 0, 2}, {1, 1, 2}, {1, 2, 2}};
        CHECK(std::vector<PatternCell>(z.cells().begin(), z.cells().end()) == expected);
    }

    SECTION("two adjacent singletons become a domino") {
        const Pattern z =
            union_pattern(Pattern::singleton(1), Pattern::singleton(2), {0, 1});
        CHECK(z.rows() == 1);
        CHECK(z.cols() == 2);
        CHECK(z.cardinality() == 2);
    }

    SECTION("a gap breaks pattern validity") {
        CHECK_THROWS_AS(
            union_pattern(Pattern::singleton(1), Pattern::singleton(1), {0, 2}),
            AdjacencyViolation);
    }

    SECTION("colliding cells are an overlap error") {
        const Pattern x = pattern_from_cells({{0, 0, 1}, {0, 1, 2}});
        CHECK_THROWS_AS(union_pattern(x, Pattern::singleton(3), {0, 1}), OverlapError);
    }

    SECTION("cardinality is additive and the pivot is preserved") {
        std::mt19937_64 rng(3);
        int checked = 0;
        while (checked < 200) {
            const Pattern x = testutil::random_pattern(1 + checked % 6, 4, rng);
            const Pattern y = testutil::random_pattern(1 + (checked / 2) % 6, 4, rng);
            std::uniform_int_distribution<int> di(0, x.rows());
            std::uniform_int_distribution<int> dj(-y.cols(), x.cols());
            const Offset delta{di(rng), dj(rng)};
            if (delta <= Offset{0, 0}) continue;
            try {
                const Pattern z = union_pattern(x, y, delta);
                CHECK(z.cardinality() == x.cardinality() + y.cardinality());
                // x's pivot element survives as z's pivot.
                CHECK(z.cells().front().symbol == x.cells().front().symbol);
                checked++;
            } catch (const OverlapError&) {
            } catch (const AdjacencyViolation&) {
            }
        }
    }
}
