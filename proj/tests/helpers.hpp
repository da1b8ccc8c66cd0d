#pragma once

// Shared test utilities: random generators and independent oracles the
// implementation under test must agree with.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <vouw/grid.hpp>
#include <vouw/miner.hpp>

namespace testutil {

inline vouw::Matrix random_matrix(int rows, int cols, int alphabet,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<vouw::Symbol> dist(
        0, static_cast<vouw::Symbol>(alphabet - 1));
    std::vector<vouw::Symbol> cells(static_cast<std::size_t>(rows) * cols);
    for (auto& c : cells) c = dist(rng);
    return vouw::Matrix(rows, cols, alphabet, std::move(cells));
}

/// Random connected pattern: grows a cell set by repeatedly attaching an
/// unoccupied 8-neighbour of an existing cell.
inline vouw::Pattern random_pattern(int size, int alphabet, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dir(-1, 1);
    std::uniform_int_distribution<vouw::Symbol> sym(
        0, static_cast<vouw::Symbol>(alphabet - 1));
    std::set<std::pair<int, int>> occupied{{0, 0}};
    while (static_cast<int>(occupied.size()) < size) {
        auto it = occupied.begin();
        std::advance(it, std::uniform_int_distribution<std::size_t>(
                             0, occupied.size() - 1)(rng));
        const int dr = dir(rng), dc = dir(rng);
        if (dr == 0 && dc == 0) continue;
        occupied.insert({it->first + dr, it->second + dc});
    }
    std::vector<vouw::PatternCell> cells;
    for (auto [r, c] : occupied) cells.push_back({r, c, sym(rng)});
    return vouw::pattern_from_cells(std::move(cells));
}

/// Full-recomputation gain oracle: apply the merge to a copy of the state and
/// diff the from-scratch description lengths.
inline double gain_oracle(const vouw::MiningState& state, const vouw::Candidate& c) {
    vouw::MiningState copy = state;
    vouw::apply_merge(copy, c);
    const double before = vouw::recompute_lengths(state).total_bits();
    const double after = vouw::recompute_lengths(copy).total_bits();
    return before - after;
}

/// Maximum number of disjoint (i, i+1) pairs in a chain of n instances,
/// by direct dynamic programming.
inline int max_disjoint_chain_pairs(int n) {
    std::vector<int> best(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 2; i <= n; ++i)
        best[static_cast<std::size_t>(i)] =
            std::max(best[static_cast<std::size_t>(i) - 1],
                     best[static_cast<std::size_t>(i) - 2] + 1);
    return best[static_cast<std::size_t>(n)];
}

/// Prequential plug-in code length computed by the sequential product form:
/// items are sent one at a time in the given order and the probability of
/// each is its running count plus the pseudocount, normalized.
inline double sequential_prequential_bits(const std::vector<std::int64_t>& usages,
                                          const std::vector<std::size_t>& order,
                                          double epsilon) {
    // Expand the usage vector into an item sequence following `order`.
    std::vector<std::size_t> sequence;
    for (std::size_t idx : order)
        for (std::int64_t k = 0; k < usages[idx]; ++k) sequence.push_back(idx);

    std::vector<std::int64_t> sent(usages.size(), 0);
    std::int64_t total_sent = 0;
    double bits = 0.0;
    const double h = static_cast<double>(usages.size());
    for (std::size_t item : sequence) {
        const double p = (static_cast<double>(sent[item]) + epsilon) /
                         (static_cast<double>(total_sent) + epsilon * h);
        bits += -std::log2(p);
        sent[item]++;
        total_sent++;
    }
    return bits;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const std::size_t n = ra.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

}  // namespace testutil
