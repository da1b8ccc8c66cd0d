#include <catch2/catch.hpp>

#include <random>

#include <vouw/ril.hpp>

using namespace vouw;

TEST_CASE("generate_shape walks a connected self-avoiding path") {
    SECTION("size one is a singleton") {
        std::mt19937_64 rng(1);
        const Pattern p = generate_shape(1, 256, rng);
        CHECK(p.cardinality() == 1);
        CHECK(p.rows() == 1);
        CHECK(p.cols() == 1);
    }

    SECTION("shapes of any size satisfy the pattern invariants") {
        for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
            std::mt19937_64 rng(seed);
            const int size = 1 + static_cast<int>(seed % 24);
            // pattern_from_cells would throw if the walk produced a
            // disconnected or duplicated cell set.
            const Pattern p = generate_shape(size, 16, rng);
            CHECK(p.cardinality() == size);
            CHECK(p.rows() <= size);
            CHECK(p.cols() <= size);
        }
    }

    SECTION("equal seeds give equal shapes") {
        std::mt19937_64 a(42), b(42);
        CHECK(generate_shape(9, 256, a) == generate_shape(9, 256, b));
    }
}

TEST_CASE("generate plants non-overlapping exact occurrences") {
    RilConfig cfg;
    cfg.rows = cfg.cols = 64;
    cfg.alphabet_size = 256;
    cfg.pattern_size = 8;
    cfg.num_patterns = 3;
    cfg.prevalence = 5;
    cfg.seed = 7;

    const auto [matrix, truth] = generate(cfg);

    SECTION("mask marks exactly the planted cells") {
        CHECK(truth.covered_cells() == 8 * 3 * 5);
        // Every occurrence writes its own symbols; spot-check them all.
        std::int64_t from_positions = 0;
        for (const PlantedPattern& planted : truth.planted) {
            CHECK(planted.positions.size() == 5);
            const RowCol pv = pivot(planted.pattern);
            for (const RowCol& at : planted.positions)
                for (const PatternCell& c : planted.pattern.cells()) {
                    const int r = at.row + c.row - pv.row;
                    const int j = at.col + c.col - pv.col;
                    CHECK(matrix.at(r, j) == c.symbol);
                    CHECK(truth.mask[static_cast<std::size_t>(r) * 64 + j] == 1);
                    from_positions++;
                }
        }
        // Occurrences are disjoint, so position-derived cells count the mask.
        CHECK(from_positions == truth.covered_cells());
    }

    SECTION("deterministic for equal seed and config") {
        const auto [m2, t2] = generate(cfg);
        CHECK(m2 == matrix);
        CHECK(t2.mask == truth.mask);
    }

    SECTION("different seeds differ") {
        RilConfig other = cfg;
        other.seed = 8;
        const auto [m2, t2] = generate(other);
        CHECK_FALSE(m2 == matrix);
    }

    SECTION("a single pattern at prevalence one yields exactly one occurrence") {
        RilConfig one;
        one.rows = one.cols = 32;
        one.pattern_size = 6;
        one.num_patterns = 1;
        one.prevalence = 1;
        one.seed = 5;
        const auto [m1, t1] = generate(one);
        REQUIRE(t1.planted.size() == 1);
        CHECK(t1.planted[0].positions.size() == 1);
        CHECK(t1.covered_cells() == 6);
    }
}

TEST_CASE("snr-driven planting hits the target within one pattern") {
    for (const double target : {0.05, 0.1, 0.3}) {
        RilConfig cfg;
        cfg.rows = cfg.cols = 128;
        cfg.pattern_size = 16;
        cfg.num_patterns = 5;
        cfg.target_snr = target;
        cfg.seed = 11;
        const auto [matrix, truth] = generate(cfg);
        const double max_gap = 16.0 / (128.0 * 128.0);
        CHECK(truth.snr() <= target + 1e-12);
        CHECK(truth.snr() >= target - max_gap - 1e-12);
    }
}

TEST_CASE("infeasible configs are rejected") {
    SECTION("both or neither planting mode") {
        RilConfig cfg;
        cfg.rows = cfg.cols = 16;
        CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
        cfg.prevalence = 2;
        cfg.target_snr = 0.1;
        CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    }

    SECTION("snr outside (0, 1]") {
        RilConfig cfg;
        cfg.rows = cfg.cols = 16;
        cfg.target_snr = 1.5;
        CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    }

    SECTION("planted cells beyond the matrix area") {
        RilConfig cfg;
        cfg.rows = cfg.cols = 8;
        cfg.pattern_size = 16;
        cfg.num_patterns = 3;
        cfg.prevalence = 4;
        CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    }

    SECTION("too dense to place by rejection") {
        RilConfig cfg;
        cfg.rows = cfg.cols = 4;
        cfg.pattern_size = 8;
        cfg.num_patterns = 2;
        cfg.prevalence = 1;
        cfg.seed = 3;
        CHECK_THROWS_AS(generate(cfg), PlacementExhausted);
    }
}
