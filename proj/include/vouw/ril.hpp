#pragma once

// Seeded synthetic benchmark generator: plants random-walk-shaped patterns
// into a noise matrix and reports the ground truth alongside. All randomness
// flows from the config seed, so equal configs produce identical output.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace vouw {

struct RilConfig {
    int rows = 0;
    int cols = 0;
    int alphabet_size = 256;
    int pattern_size = 16;    // cells per planted shape
    int num_patterns = 5;     // distinct planted shapes
    // Exactly one of these drives how much gets planted: a fixed number of
    // occurrences per shape, or a target fraction of covered cells.
    std::optional<std::int64_t> prevalence;
    std::optional<double> target_snr;
    std::uint64_t seed = 0;
};

struct PlantedPattern {
    Pattern pattern;
    std::vector<RowCol> positions;  // pivot positions of the occurrences
};

struct GroundTruth {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> mask;  // cell belongs to a planted occurrence
    std::vector<PlantedPattern> planted;

    std::int64_t covered_cells() const {
        std::int64_t n = 0;
        for (std::uint8_t m : mask) n += m;
        return n;
    }
    double snr() const {
        return static_cast<double>(covered_cells()) /
               (static_cast<double>(rows) * cols);
    }
};

/// Self-avoiding random walk over the 8-neighbourhood, starting at the
/// origin. A step onto a visited cell is rejected and a new direction drawn;
/// after 100 rejections the walk restarts from scratch, which guarantees
/// termination for any feasible size. Symbols are drawn uniformly.
inline Pattern generate_shape(int size, int alphabet_size, std::mt19937_64& rng) {
    if (size < 1) throw std::invalid_argument("generate_shape: size must be >= 1");
    static constexpr int kDir[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                       {0, 1},   {1, -1}, {1, 0},  {1, 1}};
    std::uniform_int_distribution<int> dir_dist(0, 7);

    std::vector<RowCol> path;
    while (true) {
        path.clear();
        std::unordered_set<std::uint64_t> visited;
        RowCol cur{0, 0};
        path.push_back(cur);
        visited.insert(detail::pack_pos(0, 0));
        int rejections = 0;
        while (static_cast<int>(path.size()) < size && rejections < 100) {
            const int d = dir_dist(rng);
            const RowCol next{cur.row + kDir[d][0], cur.col + kDir[d][1]};
            if (visited.count(detail::pack_pos(next.row, next.col))) {
                rejections++;
                continue;
            }
            visited.insert(detail::pack_pos(next.row, next.col));
            path.push_back(next);
            cur = next;
        }
        if (static_cast<int>(path.size()) == size) break;
    }

    std::uniform_int_distribution<Symbol> sym_dist(
        0, static_cast<Symbol>(alphabet_size - 1));
    std::vector<PatternCell> cells;
    cells.reserve(path.size());
    for (const RowCol& p : path) cells.push_back({p.row, p.col, sym_dist(rng)});
    return pattern_from_cells(std::move(cells));
}

namespace detail {

inline std::vector<std::int64_t> occurrence_plan(const RilConfig& cfg) {
    if (cfg.prevalence.has_value() == cfg.target_snr.has_value())
        throw std::invalid_argument(
            "RilConfig: exactly one of prevalence or target_snr must be set");
    if (cfg.pattern_size < 1 || cfg.num_patterns < 1)
        throw std::invalid_argument("RilConfig: pattern_size and num_patterns must be >= 1");

    const std::int64_t area = static_cast<std::int64_t>(cfg.rows) * cfg.cols;
    std::vector<std::int64_t> plan(static_cast<std::size_t>(cfg.num_patterns), 0);
    if (cfg.prevalence) {
        if (*cfg.prevalence < 1)
            throw std::invalid_argument("RilConfig: prevalence must be >= 1");
        for (auto& p : plan) p = *cfg.prevalence;
    } else {
        if (!(*cfg.target_snr > 0.0) || *cfg.target_snr > 1.0)
            throw std::invalid_argument("RilConfig: target_snr must be in (0, 1]");
        // Largest occurrence total not exceeding the cell budget, spread as
        // evenly as possible over the shapes.
        const std::int64_t budget =
            static_cast<std::int64_t>(*cfg.target_snr * static_cast<double>(area));
        const std::int64_t occurrences = budget / cfg.pattern_size;
        if (occurrences < 1)
            throw std::invalid_argument("RilConfig: target_snr too small for one occurrence");
        for (std::int64_t i = 0; i < occurrences; ++i)
            plan[static_cast<std::size_t>(i % cfg.num_patterns)]++;
    }

    std::int64_t planted = 0;
    for (std::int64_t p : plan) planted += p * cfg.pattern_size;
    if (planted > area)
        throw std::invalid_argument("RilConfig: planted cells (" +
                                    std::to_string(planted) + ") exceed matrix area (" +
                                    std::to_string(area) + ")");
    return plan;
}

}  // namespace detail

/// Generate a matrix with planted patterns plus its ground truth. Every
/// occurrence of a shape carries identical symbols; occurrences never overlap
/// each other; all remaining cells are uniform noise from the same alphabet.
/// Throws PlacementExhausted when an occurrence cannot be placed after 10000
/// rejected positions.
inline std::pair<Matrix, GroundTruth> generate(const RilConfig& cfg) {
    if (cfg.rows < 1 || cfg.cols < 1)
        throw std::invalid_argument("RilConfig: matrix dimensions must be >= 1");
    if (cfg.alphabet_size < 1)
        throw std::invalid_argument("RilConfig: alphabet must be non-empty");
    const std::vector<std::int64_t> plan = detail::occurrence_plan(cfg);

    std::mt19937_64 rng(cfg.seed);
    std::vector<Pattern> shapes;
    shapes.reserve(plan.size());
    for (std::size_t k = 0; k < plan.size(); ++k) {
        // Redraw on the (unlikely) collision so the planted shapes stay distinct.
        while (true) {
            Pattern p = generate_shape(cfg.pattern_size, cfg.alphabet_size, rng);
            if (std::find(shapes.begin(), shapes.end(), p) == shapes.end()) {
                shapes.push_back(std::move(p));
                break;
            }
        }
    }

    const std::size_t area = static_cast<std::size_t>(cfg.rows) * cfg.cols;
    std::vector<Symbol> cells(area, 0);
    GroundTruth truth;
    truth.rows = cfg.rows;
    truth.cols = cfg.cols;
    truth.mask.assign(area, 0);

    for (std::size_t k = 0; k < shapes.size(); ++k) {
        const Pattern& shape = shapes[k];
        const RowCol pv = pivot(shape);
        // Inclusive pivot range keeping the whole instance inside the matrix.
        const int row_lo = pv.row, row_hi = cfg.rows - shape.rows() + pv.row;
        const int col_lo = pv.col, col_hi = cfg.cols - shape.cols() + pv.col;
        if (row_hi < row_lo || col_hi < col_lo)
            throw PlacementExhausted("pattern does not fit the matrix");
        std::uniform_int_distribution<int> row_dist(row_lo, row_hi);
        std::uniform_int_distribution<int> col_dist(col_lo, col_hi);

        PlantedPattern planted{shape, {}};
        for (std::int64_t occ = 0; occ < plan[k]; ++occ) {
            bool placed = false;
            for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
                const RowCol at{row_dist(rng), col_dist(rng)};
                bool clash = false;
                for (const PatternCell& c : shape.cells()) {
                    const std::size_t idx =
                        static_cast<std::size_t>(at.row + c.row - pv.row) * cfg.cols +
                        (at.col + c.col - pv.col);
                    if (truth.mask[idx]) {
                        clash = true;
                        break;
                    }
                }
                if (clash) continue;
                for (const PatternCell& c : shape.cells()) {
                    const std::size_t idx =
                        static_cast<std::size_t>(at.row + c.row - pv.row) * cfg.cols +
                        (at.col + c.col - pv.col);
                    truth.mask[idx] = 1;
                    cells[idx] = c.symbol;
                }
                planted.positions.push_back(at);
                placed = true;
            }
            if (!placed)
                throw PlacementExhausted("could not place occurrence " +
                                         std::to_string(occ) + " of pattern " +
                                         std::to_string(k) +
                                         " after 10000 rejected positions");
        }
        truth.planted.push_back(std::move(planted));
    }

    std::uniform_int_distribution<Symbol> noise(
        0, static_cast<Symbol>(cfg.alphabet_size - 1));
    for (std::size_t i = 0; i < area; ++i)
        if (!truth.mask[i]) cells[i] = noise(rng);

    return {Matrix(cfg.rows, cfg.cols, cfg.alphabet_size, std::move(cells)),
            std::move(truth)};
}

}  // namespace vouw
