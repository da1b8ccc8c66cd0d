#pragma once

// Evaluation harness: coverage masks, precision/recall against a planted
// ground truth, compression ratios, and the benchmark grid that sweeps
// matrix sizes, signal densities, and search heuristics over seeds.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "miner.hpp"
#include "ril.hpp"

namespace vouw {

struct EvalReport {
    int size = 0;
    double snr = 0.0;  // configured target
    std::string heuristic;
    std::uint64_t seed = 0;
    double precision = 0.0;
    double recall = 0.0;
    double compression_ratio = 0.0;
    double snr_ground_truth = 0.0;
    double seconds = 0.0;  // mine() wall time only
    std::int64_t iterations = 0;
    bool ok = true;
    std::string status = "ok";
};

/// Boolean matrix of the cells covered by instances of non-singleton
/// patterns; the reconstruction with singletons omitted.
inline std::vector<std::uint8_t> coverage_mask(const MiningState& s) {
    std::vector<std::uint8_t> mask(s.inst.size(), 0);
    for (std::int32_t p = 0; p < static_cast<std::int32_t>(s.inst.size()); ++p) {
        const PatternId id = s.inst[static_cast<std::size_t>(p)];
        if (id == kNoPattern) continue;
        const Pattern& pat = s.pool[id];
        if (pat.cardinality() < 2) continue;
        const RowCol at = s.position(p);
        const RowCol pv = pivot(pat);
        for (const PatternCell& c : pat.cells())
            mask[static_cast<std::size_t>(at.row + c.row - pv.row) * s.cols() +
                 (at.col + c.col - pv.col)] = 1;
    }
    return mask;
}

/// Cell-wise precision and recall of `found` against `truth`. An empty found
/// mask has no false positives, so precision defaults to 1; an empty truth
/// mask likewise yields recall 1.
inline std::pair<double, double> precision_recall(std::span<const std::uint8_t> found,
                                                  std::span<const std::uint8_t> truth) {
    if (found.size() != truth.size())
        throw DimMismatch("precision_recall: mask sizes differ");
    std::int64_t both = 0, found_count = 0, truth_count = 0;
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (found[i] && truth[i]) both++;
        if (found[i]) found_count++;
        if (truth[i]) truth_count++;
    }
    const double precision =
        found_count == 0 ? 1.0 : static_cast<double>(both) / found_count;
    const double recall =
        truth_count == 0 ? 1.0 : static_cast<double>(both) / truth_count;
    return {precision, recall};
}

inline double compression_ratio(const MiningState& s) { return s.lengths.ratio(); }

// --- Heuristic naming ------------------------------------------------------

inline MinerConfig heuristic_config(const std::string& name) {
    MinerConfig cfg;
    if (name == "none") {
        // baseline Best-1
    } else if (name == "local") {
        cfg.local_search = true;
    } else if (name == "beststar") {
        cfg.heuristic = Heuristic::BestStar;
    } else if (name == "both") {
        cfg.heuristic = Heuristic::BestStar;
        cfg.local_search = true;
    } else {
        throw std::invalid_argument("unknown heuristic '" + name +
                                    "' (expected none, local, beststar or both)");
    }
    return cfg;
}

// --- Single benchmark cell ---------------------------------------------------

struct BenchCell {
    int size = 0;
    double snr = 0.0;
    std::string heuristic = "local";
    std::uint64_t seed = 1;
    int pattern_size = 16;
    int num_patterns = 5;
    int alphabet_size = 256;
    // Set to plant a fixed number of occurrences per shape instead of a
    // target snr.
    std::optional<std::int64_t> prevalence;
};

inline EvalReport run_cell(const BenchCell& cell) {
    EvalReport report;
    report.size = cell.size;
    report.snr = cell.snr;
    report.heuristic = cell.heuristic;
    report.seed = cell.seed;
    try {
        RilConfig ril;
        ril.rows = ril.cols = cell.size;
        ril.alphabet_size = cell.alphabet_size;
        ril.pattern_size = cell.pattern_size;
        ril.num_patterns = cell.num_patterns;
        if (cell.prevalence)
            ril.prevalence = cell.prevalence;
        else
            ril.target_snr = cell.snr;
        ril.seed = cell.seed;
        const auto [matrix, truth] = generate(ril);

        const MinerConfig config = heuristic_config(cell.heuristic);
        const auto t0 = std::chrono::steady_clock::now();
        MineResult mined = mine(matrix, config);
        const auto t1 = std::chrono::steady_clock::now();
        report.seconds = std::chrono::duration<double>(t1 - t0).count();

        const auto found = coverage_mask(mined.state);
        const auto [precision, recall] = precision_recall(found, truth.mask);
        report.precision = precision;
        report.recall = recall;
        report.compression_ratio = compression_ratio(mined.state);
        report.snr_ground_truth = truth.snr();
        report.iterations = static_cast<std::int64_t>(mined.log.size());
    } catch (const std::exception& e) {
        report.ok = false;
        report.status = e.what();
    }
    return report;
}

// --- Benchmark grid -----------------------------------------------------------

struct BenchConfig {
    std::vector<int> sizes;
    std::vector<double> snrs;
    std::vector<std::string> heuristics;
    int seeds = 5;  // runs per cell, seeded 1..seeds
    int pattern_size = 16;
    int num_patterns = 5;
    int alphabet_size = 256;
    int threads = 0;  // 0 or 1 = sequential
};

/// Run the full grid. Cells are independent; failures are recorded in the
/// report row instead of aborting the sweep. Row order is the deterministic
/// loop order size > snr > heuristic > seed regardless of thread count.
inline std::vector<EvalReport> bench(const BenchConfig& cfg) {
    if (cfg.seeds < 1) throw std::invalid_argument("bench: seeds must be >= 1");
    std::vector<BenchCell> cells;
    for (int size : cfg.sizes)
        for (double snr : cfg.snrs)
            for (const std::string& heuristic : cfg.heuristics)
                for (int seed = 1; seed <= cfg.seeds; ++seed) {
                    BenchCell cell;
                    cell.size = size;
                    cell.snr = snr;
                    cell.heuristic = heuristic;
                    cell.seed = static_cast<std::uint64_t>(seed);
                    cell.pattern_size = cfg.pattern_size;
                    cell.num_patterns = cfg.num_patterns;
                    cell.alphabet_size = cfg.alphabet_size;
                    cells.push_back(cell);
                }

    std::vector<EvalReport> reports(cells.size());
    if (cfg.threads > 1) {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                reports[i] = run_cell(cells[i]);
            }
        };
        std::vector<std::future<void>> pool;
        for (int t = 0; t < cfg.threads; ++t)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    } else {
        for (std::size_t i = 0; i < cells.size(); ++i) reports[i] = run_cell(cells[i]);
    }
    return reports;
}

// --- Report formatting -----------------------------------------------------------

inline std::string bench_csv(std::span<const EvalReport> rows) {
    std::ostringstream out;
    out << "size,snr,heuristic,seed,precision,recall,ratio,seconds,iterations,status\n";
    char buf[256];
    for (const EvalReport& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%g,%s,%llu,%.6f,%.6f,%.6f,%.3f,%lld,%s\n",
                      r.size, r.snr, r.heuristic.c_str(),
                      static_cast<unsigned long long>(r.seed), r.precision, r.recall,
                      r.compression_ratio, r.seconds,
                      static_cast<long long>(r.iterations),
                      r.ok ? "ok" : "error");
        out << buf;
    }
    return out.str();
}

namespace detail {

inline std::string format_seconds(double s) {
    char buf[64];
    if (s >= 60.0) {
        const int m = static_cast<int>(s / 60.0);
        std::snprintf(buf, sizeof(buf), "%dm %.0fs", m, s - 60.0 * m);
    } else if (s >= 1.0) {
        std::snprintf(buf, sizeof(buf), "%.1fs", s);
    } else {
        std::snprintf(buf, sizeof(buf), "%.2fs", s);
    }
    return buf;
}

}  // namespace detail

/// Aligned text table of per-cell means: one row per (size, snr), heuristics
/// across the columns, precision/recall block followed by average times.
inline std::string bench_table(std::span<const EvalReport> rows,
                               std::span<const std::string> heuristics) {
    struct Agg {
        double precision = 0, recall = 0, seconds = 0;
        int n = 0;
    };
    std::vector<std::pair<int, double>> groups;  // (size, snr) in first-seen order
    auto group_of = [&](int size, double snr) -> std::size_t {
        for (std::size_t i = 0; i < groups.size(); ++i)
            if (groups[i].first == size && groups[i].second == snr) return i;
        groups.emplace_back(size, snr);
        return groups.size() - 1;
    };
    std::vector<std::vector<Agg>> agg;  // [group][heuristic]
    for (const EvalReport& r : rows) {
        if (!r.ok) continue;
        const std::size_t g = group_of(r.size, r.snr);
        if (agg.size() < groups.size()) agg.resize(groups.size());
        if (agg[g].size() < heuristics.size()) agg[g].resize(heuristics.size());
        for (std::size_t h = 0; h < heuristics.size(); ++h) {
            if (heuristics[h] != r.heuristic) continue;
            agg[g][h].precision += r.precision;
            agg[g][h].recall += r.recall;
            agg[g][h].seconds += r.seconds;
            agg[g][h].n++;
        }
    }

    std::ostringstream out;
    char buf[64];
    const int col = 11;
    const std::size_t k = heuristics.size();

    out << "              ";
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(col * k),
                  "Precision/Recall");
    out << buf << " Average time\n";
    out << "  Size    SNR ";
    for (const std::string& h : heuristics) {
        std::snprintf(buf, sizeof(buf), " %-*s", col - 1, h.c_str());
        out << buf;
    }
    for (const std::string& h : heuristics) {
        std::snprintf(buf, sizeof(buf), " %-*s", col - 1, h.c_str());
        out << buf;
    }
    out << "\n";
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::snprintf(buf, sizeof(buf), "%6d  %5.3g ", groups[g].first,
                      groups[g].second);
        out << buf;
        for (std::size_t h = 0; h < k; ++h) {
            const Agg& a = (g < agg.size() && h < agg[g].size()) ? agg[g][h] : Agg{};
            if (a.n == 0) {
                std::snprintf(buf, sizeof(buf), " %-*s", col - 1, "-");
            } else {
                char pr[32];
                std::snprintf(pr, sizeof(pr), "%.2f/%.2f", a.precision / a.n,
                              a.recall / a.n);
                std::snprintf(buf, sizeof(buf), " %-*s", col - 1, pr);
            }
            out << buf;
        }
        for (std::size_t h = 0; h < k; ++h) {
            const Agg& a = (g < agg.size() && h < agg[g].size()) ? agg[g][h] : Agg{};
            if (a.n == 0) {
                std::snprintf(buf, sizeof(buf), " %-*s", col - 1, "-");
            } else {
                std::snprintf(buf, sizeof(buf), " %-*s", col - 1,
                              detail::format_seconds(a.seconds / a.n).c_str());
            }
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace vouw
