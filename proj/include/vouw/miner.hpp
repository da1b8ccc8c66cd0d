#pragma once

// Greedy bottom-up pattern search. Starting from the singleton model, each
// iteration enumerates mergeable candidate pairs from the instantiation
// matrix, ranks them by description-length gain, and merges while the best
// gain is positive. Optional extensions: a local search that grows freshly
// merged patterns along their instance peripheries, and a batch heuristic
// that merges all disjoint positive-gain candidates per enumeration pass.

#include <cassert>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "encoding.hpp"
#include "grid.hpp"

namespace vouw {

using PatternId = std::int32_t;
inline constexpr PatternId kNoPattern = -1;

// --- Pattern pool -----------------------------------------------------------

/// Interns patterns by value so states can refer to them by dense id. Ids are
/// assigned in creation order and never reused; the pool only grows.
class PatternPool {
public:
    PatternId intern(Pattern p, const EncodingContext& enc) {
        const std::size_t h = hash(p);
        auto [it, inserted] = index_.try_emplace(h);
        for (PatternId id : it->second)
            if (patterns_[static_cast<std::size_t>(id)] == p) return id;
        const PatternId id = static_cast<PatternId>(patterns_.size());
        bits_.push_back(enc.pattern_length(p));
        patterns_.push_back(std::move(p));
        it->second.push_back(id);
        return id;
    }

    const Pattern& operator[](PatternId id) const {
        return patterns_[static_cast<std::size_t>(id)];
    }
    double bits(PatternId id) const { return bits_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return patterns_.size(); }

private:
    static std::size_t hash(const Pattern& p) {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(static_cast<std::uint64_t>(p.rows()));
        mix(static_cast<std::uint64_t>(p.cols()));
        for (const PatternCell& c : p.cells()) {
            mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.row)));
            mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.col)));
            mix(c.symbol);
        }
        return static_cast<std::size_t>(h);
    }

    std::vector<Pattern> patterns_;
    std::vector<double> bits_;
    std::unordered_map<std::size_t, std::vector<PatternId>> index_;
};

// --- Mining state -----------------------------------------------------------

/// Model + instantiation pair for one matrix. Invariants maintained by the
/// mining operations:
///  - every non-empty inst cell (i,j) holds a pattern whose instance pivoted
///    at (i,j) lies fully inside the matrix,
///  - instances are pairwise non-overlapping and jointly tile the matrix
///    (superposing them reproduces the source exactly),
///  - usage[] agrees with the instance counts; patterns with usage 0 are not
///    part of the model.
struct MiningState {
    Matrix source;
    EncodingContext enc;
    PatternPool pool;
    std::vector<PatternId> inst;       // rows*cols; kNoPattern = empty cell
    std::vector<std::int32_t> owner;   // covering instance's pivot, linearized
    std::vector<std::int64_t> usage;   // indexed by PatternId
    std::int64_t instance_count = 0;   // |I|
    std::int64_t model_size = 0;       // |H|
    LengthReport lengths;
    // (rows, cols, cardinality) -> model patterns of that shape class;
    // used to detect when a candidate's union already exists in the model.
    std::unordered_map<std::uint64_t, std::vector<PatternId>> shape_index;

    int rows() const { return source.rows(); }
    int cols() const { return source.cols(); }
    std::int32_t linear(RowCol p) const { return p.row * cols() + p.col; }
    RowCol position(std::int32_t linear_pos) const {
        return {linear_pos / cols(), linear_pos % cols()};
    }

    PatternId at(RowCol p) const { return inst[static_cast<std::size_t>(linear(p))]; }

    std::int64_t usage_of(PatternId id) const { return usage[static_cast<std::size_t>(id)]; }

    /// Ids of all patterns currently in the model, ascending.
    std::vector<PatternId> model_ids() const {
        std::vector<PatternId> ids;
        ids.reserve(static_cast<std::size_t>(model_size));
        for (std::size_t id = 0; id < usage.size(); ++id)
            if (usage[id] > 0) ids.push_back(static_cast<PatternId>(id));
        return ids;
    }

    static std::uint64_t shape_key(int rows, int cols, std::int64_t cardinality) {
        return (static_cast<std::uint64_t>(rows) << 44) |
               (static_cast<std::uint64_t>(cols) << 24) |
               static_cast<std::uint64_t>(cardinality);
    }

    /// Superpose all instances back into a dense matrix. Throws if the state
    /// lost a cell or declared one twice; equality with `source` is the
    /// losslessness invariant.
    Matrix reconstruct() const {
        std::vector<Symbol> cells(static_cast<std::size_t>(source.cell_count()), 0);
        std::vector<std::uint8_t> written(cells.size(), 0);
        for (std::int32_t p = 0; p < static_cast<std::int32_t>(inst.size()); ++p) {
            const PatternId id = inst[static_cast<std::size_t>(p)];
            if (id == kNoPattern) continue;
            const Pattern& pat = pool[id];
            const RowCol at = position(p);
            const RowCol pv = pivot(pat);
            for (const PatternCell& c : pat.cells()) {
                const int r = at.row + c.row - pv.row;
                const int j = at.col + c.col - pv.col;
                if (r < 0 || r >= rows() || j < 0 || j >= cols())
                    throw InconsistentState("reconstruct: instance leaves the matrix");
                const std::size_t idx = static_cast<std::size_t>(r) * cols() + j;
                if (written[idx])
                    throw InconsistentState("reconstruct: overlapping instances");
                written[idx] = 1;
                cells[idx] = c.symbol;
            }
        }
        for (std::uint8_t w : written)
            if (!w) throw InconsistentState("reconstruct: uncovered cell");
        return Matrix(rows(), cols(), source.alphabet_size(), std::move(cells));
    }
};

// --- Candidates ---------------------------------------------------------------

/// A proposed merge: instances of y found at pivot offset delta from
/// instances of x. Canonical form has lexicographically positive delta, so a
/// mirrored duplicate (y, x, -delta) never coexists.
struct Candidate {
    PatternId x = kNoPattern;
    PatternId y = kNoPattern;
    Offset delta;
    std::int64_t support = 0;
};

struct CandidateGain {
    Candidate candidate;
    double gain = 0.0;
};

enum class Heuristic { Best1, BestStar };
enum class TieBreak { SupportPatternDelta };  // the one deterministic rule

struct MinerConfig {
    Heuristic heuristic = Heuristic::Best1;
    bool local_search = false;
    std::optional<std::int64_t> max_iterations;
    TieBreak tie_break = TieBreak::SupportPatternDelta;
    double epsilon = 0.5;
    PatternCode pattern_code = PatternCode::BinomialAsInteger;
};

struct MergeResult {
    PatternId z = kNoPattern;
    std::vector<std::int32_t> positions;  // pivots of the new instances, ascending
    std::int64_t replaced = 0;            // pairs actually replaced
};

struct IterationRow {
    std::int64_t iteration = 0;
    double best_gain = 0.0;
    std::int64_t model_size = 0;
    std::int64_t instance_count = 0;
    double total_bits = 0.0;
    std::int64_t merges = 0;  // global + local merges applied this iteration
};

struct MineResult {
    MiningState state;
    std::vector<IterationRow> log;
    std::int64_t total_merges = 0;
};

/// Called after every applied merge (global, batch and local alike).
using MergeObserver =
    std::function<void(const MiningState&, const Candidate&, const MergeResult&)>;

// --- Initial state ------------------------------------------------------------

/// The singleton model: one pattern per distinct symbol occurring in `a`,
/// every cell an instance of its own symbol. This is also the encoding
/// baseline all compression ratios refer to.
inline MiningState init_state(const Matrix& a, double epsilon = 0.5,
                              PatternCode pattern_code = PatternCode::BinomialAsInteger) {
    EncodingParams params;
    params.epsilon = epsilon;
    params.rows = a.rows();
    params.cols = a.cols();
    params.alphabet_size = a.alphabet_size();
    params.pattern_code = pattern_code;

    MiningState s{a, EncodingContext(params), PatternPool{}, {}, {}, {}, 0, 0, {}, {}};

    std::vector<std::int64_t> histogram(static_cast<std::size_t>(a.alphabet_size()), 0);
    for (Symbol sym : a.cells()) histogram[sym]++;

    std::vector<PatternId> symbol_to_id(histogram.size(), kNoPattern);
    for (std::size_t sym = 0; sym < histogram.size(); ++sym) {
        if (histogram[sym] == 0) continue;
        const PatternId id =
            s.pool.intern(Pattern::singleton(static_cast<Symbol>(sym)), s.enc);
        symbol_to_id[sym] = id;
        s.usage.resize(s.pool.size(), 0);
        s.usage[static_cast<std::size_t>(id)] = histogram[sym];
        s.shape_index[MiningState::shape_key(1, 1, 1)].push_back(id);
        s.model_size++;
    }

    const std::size_t n = static_cast<std::size_t>(a.cell_count());
    s.inst.resize(n);
    s.owner.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        s.inst[p] = symbol_to_id[a.cells()[p]];
        s.owner[p] = static_cast<std::int32_t>(p);
    }
    s.instance_count = static_cast<std::int64_t>(n);

    std::vector<const Pattern*> model;
    std::vector<std::int64_t> usages;
    for (PatternId id : s.model_ids()) {
        model.push_back(&s.pool[id]);
        usages.push_back(s.usage_of(id));
    }
    s.lengths.model_bits = s.enc.model_length(model);
    s.lengths.instantiation_bits = s.enc.instantiation_length(usages);
    s.lengths.baseline_bits = s.lengths.total_bits();
    return s;
}

/// L1(H0) + L2(I0) of the singleton decomposition of `a`: the encoding
/// baseline against which compression ratios are reported. Depends only on
/// the matrix shape, the alphabet, and the symbol histogram.
inline double baseline_length(const Matrix& a, const EncodingContext& enc) {
    std::vector<std::int64_t> histogram(static_cast<std::size_t>(a.alphabet_size()), 0);
    for (Symbol sym : a.cells()) histogram[sym]++;
    std::vector<std::int64_t> usages;
    for (std::int64_t h : histogram)
        if (h > 0) usages.push_back(h);
    double model = enc.universal_integer(static_cast<std::int64_t>(usages.size()));
    for (std::size_t i = 0; i < usages.size(); ++i)
        model += enc.pattern_length(1, 1, 1);
    return model + enc.instantiation_length(usages);
}

/// Full Table-style recomputation of the current lengths, independent of the
/// incrementally maintained cache. The baseline is re-derived from the source
/// matrix histogram.
inline LengthReport recompute_lengths(const MiningState& s) {
    std::vector<const Pattern*> model;
    std::vector<std::int64_t> usages;
    for (PatternId id : s.model_ids()) {
        model.push_back(&s.pool[id]);
        usages.push_back(s.usage_of(id));
    }
    LengthReport out;
    out.model_bits = s.enc.model_length(model);
    out.instantiation_bits = s.enc.instantiation_length(usages);
    out.baseline_bits = baseline_length(s.source, s.enc);
    return out;
}

// --- Peripheries ----------------------------------------------------------------

namespace detail {

/// Visit the pivot of every instance whose region is 8-adjacent to (touches
/// or diagonally abuts) the region of the instance pivoted at `from`. Each
/// neighbouring instance is reported once, in ascending pivot order.
template <typename Fn>
void for_each_adjacent_instance(const MiningState& s, std::int32_t from, Fn&& fn) {
    const PatternId id = s.inst[static_cast<std::size_t>(from)];
    assert(id != kNoPattern);
    const Pattern& pat = s.pool[id];
    const RowCol at = s.position(from);
    const RowCol pv = pivot(pat);

    std::vector<std::int32_t> neighbours;
    for (const PatternCell& c : pat.cells()) {
        const int r = at.row + c.row - pv.row;
        const int j = at.col + c.col - pv.col;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int nr = r + dr, nc = j + dc;
                if (nr < 0 || nr >= s.rows() || nc < 0 || nc >= s.cols()) continue;
                const std::int32_t o = s.owner[static_cast<std::size_t>(nr) * s.cols() + nc];
                if (o != from) neighbours.push_back(o);
            }
    }
    std::sort(neighbours.begin(), neighbours.end());
    neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());
    for (std::int32_t n : neighbours) fn(n);
}

inline std::uint64_t candidate_key(PatternId x, PatternId y, Offset d) {
    // Ids stay well below 2^20 at the matrix sizes this tool targets and
    // offsets within +-2^11; the packed key is collision-free in that range.
    assert(x >= 0 && x < (1 << 20) && y >= 0 && y < (1 << 20));
    assert(d.di > -2048 && d.di < 2048 && d.dj > -2048 && d.dj < 2048);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 44) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 24) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(d.di + 2048)) << 12) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(d.dj + 2048));
}

}  // namespace detail

/// Instances adjacent to the instance at `at` whose pivot comes after it in
/// lexicographic order. Merging with any of them yields a valid pattern.
inline std::vector<std::pair<RowCol, PatternId>> posterior_periphery(const MiningState& s,
                                                                     RowCol at) {
    const std::int32_t from = s.linear(at);
    std::vector<std::pair<RowCol, PatternId>> out;
    detail::for_each_adjacent_instance(s, from, [&](std::int32_t n) {
        if (n > from) out.emplace_back(s.position(n), s.inst[static_cast<std::size_t>(n)]);
    });
    return out;
}

/// Instances adjacent to the instance at `at` whose pivot comes before it.
inline std::vector<std::pair<RowCol, PatternId>> anterior_periphery(const MiningState& s,
                                                                    RowCol at) {
    const std::int32_t from = s.linear(at);
    std::vector<std::pair<RowCol, PatternId>> out;
    detail::for_each_adjacent_instance(s, from, [&](std::int32_t n) {
        if (n < from) out.emplace_back(s.position(n), s.inst[static_cast<std::size_t>(n)]);
    });
    return out;
}

/// Linearizes the offset of a self-candidate into the index space of all ways
/// a pattern can follow itself adjacently: e = (2*N_X + 1)*di + dj + N_X.
/// Injective over the admissible posterior range.
inline int overlap_coefficient(const Pattern& x, Offset delta) {
    assert(delta > (Offset{0, 0}));
    return (2 * x.cols() + 1) * delta.di + delta.dj + x.cols();
}

// --- Candidate enumeration --------------------------------------------------------

/// One lexicographic scan over the instantiation matrix. For every instance x
/// and every y in its posterior periphery the candidate (pattern(x),
/// pattern(y), pivot offset) gains one support. Equal-pattern candidates pass
/// through a per-instance mark vector: a chain of k equal instances holds
/// floor(k/2) simultaneously mergeable pairs, and the marks suppress the
/// overlapping ones. Returned sorted by (x, y, delta).
inline std::vector<Candidate> find_candidates(const MiningState& s) {
    // Self-overlap marks, keyed by (instance pivot, overlap coefficient).
    std::unordered_set<std::uint64_t> marked;
    std::unordered_map<std::uint64_t, Candidate> proto;
    proto.reserve(s.inst.size() / 2 + 16);

    const std::int32_t total = static_cast<std::int32_t>(s.inst.size());
    for (std::int32_t p = 0; p < total; ++p) {
        const PatternId x = s.inst[static_cast<std::size_t>(p)];
        if (x == kNoPattern) continue;
        const RowCol at = s.position(p);
        detail::for_each_adjacent_instance(s, p, [&](std::int32_t q) {
            if (q <= p) return;
            const PatternId y = s.inst[static_cast<std::size_t>(q)];
            const Offset delta = s.position(q) - at;
            if (x == y) {
                const int e = overlap_coefficient(s.pool[x], delta);
                const std::uint64_t mark_x =
                    (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p)) << 32) |
                    static_cast<std::uint32_t>(e);
                if (marked.count(mark_x)) return;
                marked.insert(
                    (static_cast<std::uint64_t>(static_cast<std::uint32_t>(q)) << 32) |
                    static_cast<std::uint32_t>(e));
            }
            const std::uint64_t key = detail::candidate_key(x, y, delta);
            auto [it, inserted] = proto.try_emplace(key, Candidate{x, y, delta, 0});
            it->second.support++;
        });
    }

    std::vector<Candidate> out;
    out.reserve(proto.size());
    for (auto& [key, cand] : proto) out.push_back(cand);
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.delta < b.delta;
    });
    return out;
}

// --- Gain ---------------------------------------------------------------------

namespace detail {

/// Bounding box the union pattern will have, without building its cell set.
inline void union_bbox(const MiningState& s, const Candidate& c, int& rows_z, int& cols_z) {
    const Pattern& x = s.pool[c.x];
    const Pattern& y = s.pool[c.y];
    const int px = pivot(x).col;
    const int py = pivot(y).col;
    assert(c.delta > (Offset{0, 0}));
    rows_z = std::max(x.rows(), c.delta.di + y.rows());
    const int left = std::min(-px, c.delta.dj - py);
    const int right = std::max(x.cols() - 1 - px, c.delta.dj - py + y.cols() - 1);
    cols_z = right - left + 1;
}

/// Id of the model pattern equal to the candidate's union, or kNoPattern.
/// Cheap shape probe first; the union is only materialized on a shape hit.
inline PatternId find_union_in_model(const MiningState& s, const Candidate& c, int rows_z,
                                     int cols_z, std::int64_t card_z) {
    const auto it = s.shape_index.find(MiningState::shape_key(rows_z, cols_z, card_z));
    if (it == s.shape_index.end() || it->second.empty()) return kNoPattern;
    const Pattern z = union_pattern(s.pool[c.x], s.pool[c.y], c.delta);
    for (PatternId id : it->second)
        if (s.pool[id] == z) return id;
    return kNoPattern;
}

inline GainInput make_gain_input(const MiningState& s, const Candidate& c) {
    GainInput g;
    g.self = (c.x == c.y);
    g.usage_x = s.usage_of(c.x);
    g.usage_y = s.usage_of(c.y);
    g.support = c.support;
    g.instance_count = s.instance_count;
    g.model_size = s.model_size;
    g.pattern_bits_x = s.pool.bits(c.x);
    g.pattern_bits_y = s.pool.bits(c.y);

    int rows_z = 0, cols_z = 0;
    union_bbox(s, c, rows_z, cols_z);
    const std::int64_t card_z = s.pool[c.x].cardinality() + s.pool[c.y].cardinality();
    const PatternId zid = find_union_in_model(s, c, rows_z, cols_z, card_z);
    if (zid != kNoPattern) {
        g.z_in_model = true;
        g.usage_z = s.usage_of(zid);
        g.pattern_bits_z = s.pool.bits(zid);
    } else {
        g.pattern_bits_z = s.enc.pattern_length(rows_z, cols_z, card_z);
    }
    return g;
}

}  // namespace detail

/// Constant-time gain of applying `c` to the current state (old length minus
/// new length; positive compresses).
inline double candidate_gain(const MiningState& s, const Candidate& c) {
    return s.enc.gain(detail::make_gain_input(s, c));
}

/// Strict deterministic candidate order used wherever gains tie: higher gain
/// first, then higher support, then the lexicographically smaller pattern
/// pair fingerprint, then the smaller offset.
inline bool candidate_better(const MiningState& s, const CandidateGain& a,
                             const CandidateGain& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.candidate.support != b.candidate.support)
        return a.candidate.support > b.candidate.support;
    if (a.candidate.x != b.candidate.x) {
        const auto cmp = s.pool[a.candidate.x] <=> s.pool[b.candidate.x];
        if (cmp != 0) return cmp < 0;
    }
    if (a.candidate.y != b.candidate.y) {
        const auto cmp = s.pool[a.candidate.y] <=> s.pool[b.candidate.y];
        if (cmp != 0) return cmp < 0;
    }
    return a.candidate.delta < b.candidate.delta;
}

// --- Merging ---------------------------------------------------------------------

/// Apply one candidate merge. Every pair (instance of x at p, instance of y
/// at p + delta) still present is replaced by one instance of the union
/// pattern pivoting at p; the scan runs in lexicographic pivot order and an
/// instance consumed as the y of one pair is skipped as a later x. Usages,
/// the model, and the cached lengths are updated from the pairs actually
/// replaced. Throws StaleCandidate when no pair is left.
inline MergeResult apply_merge(MiningState& s, const Candidate& c) {
    if (c.x < 0 || c.y < 0 || static_cast<std::size_t>(c.x) >= s.pool.size() ||
        static_cast<std::size_t>(c.y) >= s.pool.size())
        throw InconsistentState("apply_merge: unknown pattern id");
    if (s.usage_of(c.x) <= 0 || s.usage_of(c.y) <= 0)
        throw StaleCandidate("apply_merge: candidate pattern no longer in model");
    assert(c.delta > (Offset{0, 0}));

    // By value: the intern() below may grow the pool and move its patterns.
    const Pattern x_pat = s.pool[c.x];
    const Pattern y_pat = s.pool[c.y];
    const Pattern z = union_pattern(x_pat, y_pat, c.delta);

    // Collect the disjoint pairs first; mutate afterwards.
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    std::unordered_set<std::int32_t> consumed;
    const std::int32_t total = static_cast<std::int32_t>(s.inst.size());
    for (std::int32_t p = 0; p < total; ++p) {
        if (s.inst[static_cast<std::size_t>(p)] != c.x || consumed.count(p)) continue;
        const RowCol at = s.position(p);
        const RowCol to = at + c.delta;
        if (!s.source.in_bounds(to)) continue;
        const std::int32_t q = s.linear(to);
        if (s.inst[static_cast<std::size_t>(q)] != c.y || consumed.count(q)) continue;
        pairs.emplace_back(p, q);
        consumed.insert(p);
        consumed.insert(q);
    }
    if (pairs.empty())
        throw StaleCandidate("apply_merge: no matching instance pairs remain");

    const std::int64_t n = static_cast<std::int64_t>(pairs.size());

    // Gain with the support actually realized, evaluated against the
    // pre-merge state; keeps the cached lengths exact even when a batch
    // heuristic applies candidates whose support moved since enumeration.
    Candidate applied = c;
    applied.support = n;
    const GainInput g = detail::make_gain_input(s, applied);
    const GainBreakdown delta_bits = s.enc.gain_breakdown(g);

    const PatternId zid = s.pool.intern(z, s.enc);
    s.usage.resize(s.pool.size(), 0);

    const RowCol y_pivot = pivot(y_pat);
    MergeResult result;
    result.z = zid;
    result.replaced = n;
    result.positions.reserve(pairs.size());
    for (auto [p, q] : pairs) {
        s.inst[static_cast<std::size_t>(p)] = zid;
        s.inst[static_cast<std::size_t>(q)] = kNoPattern;
        const RowCol at = s.position(q);
        for (const PatternCell& cell : y_pat.cells()) {
            const int r = at.row + cell.row - y_pivot.row;
            const int j = at.col + cell.col - y_pivot.col;
            s.owner[static_cast<std::size_t>(r) * s.cols() + j] = p;
        }
        result.positions.push_back(p);
    }

    auto index_erase = [&s](PatternId id) {
        const Pattern& p = s.pool[id];
        auto& bucket = s.shape_index[MiningState::shape_key(
            p.rows(), p.cols(), p.cardinality())];
        const auto it = std::find(bucket.begin(), bucket.end(), id);
        if (it == bucket.end())
            throw InconsistentState("apply_merge: model shape index out of sync");
        bucket.erase(it);
    };

    if (c.x == c.y) {
        s.usage[static_cast<std::size_t>(c.x)] -= 2 * n;
    } else {
        s.usage[static_cast<std::size_t>(c.x)] -= n;
        s.usage[static_cast<std::size_t>(c.y)] -= n;
    }
    if (s.usage_of(c.x) == 0) {
        index_erase(c.x);
        s.model_size--;
    }
    if (c.y != c.x && s.usage_of(c.y) == 0) {
        index_erase(c.y);
        s.model_size--;
    }
    if (s.usage_of(zid) == 0) {
        s.shape_index[MiningState::shape_key(z.rows(), z.cols(), z.cardinality())]
            .push_back(zid);
        s.model_size++;
    }
    s.usage[static_cast<std::size_t>(zid)] += n;
    s.instance_count -= n;

    s.lengths.model_bits -= delta_bits.model_delta;
    s.lengths.instantiation_bits -= delta_bits.instantiation_delta;
    return result;
}

// --- Local search -------------------------------------------------------------

/// Grow a freshly merged pattern along its peripheries: consider only
/// candidates (z, w, delta) for which *every* instance of z has a w-neighbour
/// at the same offset (support equal to z's usage) and keep merging the best
/// positive one until none remains. Returns the number of merges applied.
inline std::int64_t local_search(MiningState& s, PatternId z,
                                 std::vector<std::int32_t> positions,
                                 const MergeObserver& observer = {}) {
    std::int64_t merges = 0;
    PatternId current = z;
    std::vector<std::int32_t> pivots = std::move(positions);

    while (!pivots.empty()) {
        if (static_cast<std::int64_t>(pivots.size()) != s.usage_of(current)) {
            // The last merge folded into a pattern that already had other
            // instances; track them all from here on.
            pivots.clear();
            for (std::int32_t p = 0; p < static_cast<std::int32_t>(s.inst.size()); ++p)
                if (s.inst[static_cast<std::size_t>(p)] == current) pivots.push_back(p);
        }
        const std::int64_t u = static_cast<std::int64_t>(pivots.size());

        // Key: (neighbour pattern, offset from the z-instance pivot).
        auto local_key = [](PatternId w, Offset d) {
            return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(w)) << 24) |
                   (static_cast<std::uint64_t>(static_cast<std::uint32_t>(d.di + 2048))
                    << 12) |
                   static_cast<std::uint64_t>(static_cast<std::uint32_t>(d.dj + 2048));
        };
        std::unordered_map<std::uint64_t, std::int64_t> counts;
        for (std::int32_t p : pivots) {
            const RowCol at = s.position(p);
            detail::for_each_adjacent_instance(s, p, [&](std::int32_t q) {
                const PatternId w = s.inst[static_cast<std::size_t>(q)];
                counts[local_key(w, s.position(q) - at)]++;
            });
        }

        std::optional<CandidateGain> best;
        for (const auto& [key, count] : counts) {
            if (count != u) continue;
            const PatternId w = static_cast<PatternId>(key >> 24);
            Offset d{static_cast<int>((key >> 12) & 0xfff) - 2048,
                     static_cast<int>(key & 0xfff) - 2048};
            Candidate cand;
            if (d > Offset{0, 0})
                cand = Candidate{current, w, d, u};
            else
                cand = Candidate{w, current, -d, u};
            CandidateGain cg{cand, candidate_gain(s, cand)};
            if (!best || candidate_better(s, cg, *best)) best = cg;
        }
        if (!best || best->gain <= 0.0) break;

        const MergeResult res = apply_merge(s, best->candidate);
        assert(res.replaced == u);
        merges++;
        if (observer) observer(s, best->candidate, res);
        current = res.z;
        pivots = res.positions;
    }
    return merges;
}

// --- Batch selection -------------------------------------------------------------

/// Greedy scan of the candidates in descending gain order, keeping a
/// candidate iff its gain is positive and neither of its patterns appears in
/// an already kept candidate. Output order is selection order.
inline std::vector<CandidateGain> select_best_star(const MiningState& s,
                                                   std::vector<CandidateGain> ranked) {
    std::sort(ranked.begin(), ranked.end(),
              [&s](const CandidateGain& a, const CandidateGain& b) {
                  return candidate_better(s, a, b);
              });
    std::vector<CandidateGain> kept;
    std::unordered_set<PatternId> used;
    for (const CandidateGain& cg : ranked) {
        if (cg.gain <= 0.0) break;
        if (used.count(cg.candidate.x) || used.count(cg.candidate.y)) continue;
        kept.push_back(cg);
        used.insert(cg.candidate.x);
        used.insert(cg.candidate.y);
    }
    return kept;
}

// --- Main loop --------------------------------------------------------------------

/// Run the full search on a matrix: enumerate candidates, rank by gain, merge
/// while the best gain is positive (one candidate per iteration under Best1,
/// a disjoint batch under BestStar), optionally growing each new pattern by
/// local search. Deterministic for a fixed config.
inline MineResult mine(const Matrix& a, const MinerConfig& config = {},
                       const MergeObserver& observer = {}) {
    if (config.max_iterations && *config.max_iterations < 1)
        throw std::invalid_argument("mine: max_iterations must be at least 1");
    MiningState state = init_state(a, config.epsilon, config.pattern_code);
    std::vector<IterationRow> log;
    std::int64_t total_merges = 0;

    for (std::int64_t it = 0;
         !config.max_iterations || it < *config.max_iterations; ++it) {
        const std::vector<Candidate> candidates = find_candidates(state);
        if (candidates.empty()) break;

        std::vector<CandidateGain> ranked;
        ranked.reserve(candidates.size());
        for (const Candidate& c : candidates)
            ranked.push_back({c, candidate_gain(state, c)});

        const CandidateGain* best = &ranked.front();
        for (const CandidateGain& cg : ranked)
            if (candidate_better(state, cg, *best)) best = &cg;
        const double best_gain = best->gain;
        if (best_gain <= 0.0) break;

        std::int64_t merges = 0;
        if (config.heuristic == Heuristic::Best1) {
            const Candidate chosen = best->candidate;
            const MergeResult res = apply_merge(state, chosen);
            assert(res.replaced == chosen.support);
            merges++;
            if (observer) observer(state, chosen, res);
            if (config.local_search)
                merges += local_search(state, res.z, res.positions, observer);
        } else {
            const std::vector<CandidateGain> batch = select_best_star(state, ranked);
            std::vector<PatternId> created;
            for (const CandidateGain& cg : batch) {
                const MergeResult res = apply_merge(state, cg.candidate);
                merges++;
                if (observer) observer(state, cg.candidate, res);
                if (std::find(created.begin(), created.end(), res.z) == created.end())
                    created.push_back(res.z);
            }
            if (config.local_search) {
                for (PatternId z : created) {
                    if (state.usage_of(z) > 0) {
                        std::vector<std::int32_t> positions;
                        for (std::int32_t p = 0;
                             p < static_cast<std::int32_t>(state.inst.size()); ++p)
                            if (state.inst[static_cast<std::size_t>(p)] == z)
                                positions.push_back(p);
                        merges += local_search(state, z, std::move(positions), observer);
                    }
                }
            }
        }

        log.push_back({it, best_gain, state.model_size, state.instance_count,
                       state.lengths.total_bits(), merges});
        total_merges += merges;
    }

    return {std::move(state), std::move(log), total_merges};
}

}  // namespace vouw
