#pragma once

// Two-part MDL code lengths: the universal prior for integers, pattern and
// model lengths, the prequential plug-in code for the instantiation matrix,
// and the constant-time gain of a candidate merge. Only lengths are computed;
// nothing is ever actually encoded.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "grid.hpp"

namespace vouw {

/// How the element-count/positions term of a pattern's length is coded.
/// BinomialAsInteger feeds the binomial coefficient value to the universal
/// integer prior; CardinalityThenIndex codes the cardinality with the prior
/// and the position subset as a uniform index. The former is the default.
enum class PatternCode { BinomialAsInteger, CardinalityThenIndex };

struct EncodingParams {
    double epsilon = 0.5;                   // prequential pseudocount
    double rissanen_constant = 2.865064;    // normalizer of the integer prior
    int rows = 0;
    int cols = 0;
    int alphabet_size = 0;
    PatternCode pattern_code = PatternCode::BinomialAsInteger;
};

/// Description lengths of a model/instantiation pair, in bits.
struct LengthReport {
    double model_bits = 0.0;          // L1(H)
    double instantiation_bits = 0.0;  // L2(I)
    double baseline_bits = 0.0;       // L1(H0) + L2(I0) of the same matrix

    double total_bits() const { return model_bits + instantiation_bits; }
    double ratio() const { return total_bits() / baseline_bits; }
};

/// Everything the constant-time gain needs to know about a candidate merge.
/// Usages are the values *before* the merge; `support` is the number of
/// instance pairs that will be replaced.
struct GainInput {
    std::int64_t usage_x = 0;
    std::int64_t usage_y = 0;        // ignored when self is set
    std::int64_t usage_z = 0;        // current usage of the union pattern (0 if new)
    std::int64_t support = 0;
    std::int64_t instance_count = 0; // |I|
    std::int64_t model_size = 0;     // |H|
    double pattern_bits_x = 0.0;
    double pattern_bits_y = 0.0;
    double pattern_bits_z = 0.0;
    bool self = false;               // X == Y
    bool z_in_model = false;         // union pattern already has usage > 0
};

/// Gain split by the two description-length parts (old minus new, so positive
/// values mean the merge compresses).
struct GainBreakdown {
    double model_delta = 0.0;
    double instantiation_delta = 0.0;
    double total() const { return model_delta + instantiation_delta; }
};

/// Code-length calculator for one matrix geometry. Construction precomputes
/// log-Gamma tables sized to the matrix, after which all member functions are
/// pure and safe to call concurrently.
class EncodingContext {
public:
    explicit EncodingContext(const EncodingParams& params) : params_(params) {
        if (params_.rows < 1 || params_.cols < 1)
            throw DomainError("EncodingContext: matrix dimensions must be positive");
        if (params_.alphabet_size < 1)
            throw DomainError("EncodingContext: alphabet must be non-empty");
        if (!(params_.epsilon > 0.0))
            throw DomainError("EncodingContext: epsilon must be positive");

        const std::int64_t mn = cell_total();
        log2_mn_ = std::log2(static_cast<double>(mn));
        log2_alphabet_ = std::log2(static_cast<double>(params_.alphabet_size));
        log2_c0_ = std::log2(params_.rissanen_constant);
        lgamma_eps_ = std::lgamma(params_.epsilon);

        lgamma_fact_.resize(static_cast<std::size_t>(mn) + 2);
        for (std::size_t n = 0; n < lgamma_fact_.size(); ++n)
            lgamma_fact_[n] = std::lgamma(static_cast<double>(n) + 1.0);

        log_g1_.resize(static_cast<std::size_t>(mn) + 1);
        for (std::size_t a = 0; a < log_g1_.size(); ++a)
            log_g1_[a] =
                (std::lgamma(static_cast<double>(a) + params_.epsilon) - lgamma_eps_) / kLn2;
    }

    const EncodingParams& params() const { return params_; }
    std::int64_t cell_total() const {
        return static_cast<std::int64_t>(params_.rows) * params_.cols;
    }
    double log2_matrix_area() const { return log2_mn_; }

    /// L_N(n): the universal prior for the integers,
    /// log2(c0) + log2(n) + log2(log2(n)) + ... over the positive terms.
    double universal_integer(std::int64_t n) const {
        if (n < 1) throw DomainError("universal_integer: n must be >= 1");
        return universal_integer_log2(std::log2(static_cast<double>(n)));
    }

    /// L_N of an integer given as its base-2 logarithm; needed where the
    /// integer itself (a binomial coefficient) overflows any fixed width.
    double universal_integer_log2(double log2_n) const {
        double total = log2_c0_;
        for (double term = log2_n; term > 0.0; term = std::log2(term)) total += term;
        return total;
    }

    /// log2 of the binomial coefficient C(n, k), via the log-Gamma table.
    double log_binomial(std::int64_t n, std::int64_t k) const {
        if (k < 0 || n < 0 || k > n) throw DomainError("log_binomial: need 0 <= k <= n");
        if (n + 1 >= static_cast<std::int64_t>(lgamma_fact_.size()))
            throw DomainError("log_binomial: n exceeds the matrix cell count");
        return (lgamma_fact_[n] - lgamma_fact_[k] - lgamma_fact_[n - k]) / kLn2;
    }

    /// log_G(a, b) = log2 Gamma(a + b*eps) - log2 Gamma(b*eps), in bits.
    double log_gamma_eps(std::int64_t a, std::int64_t b) const {
        assert(a >= 0 && b >= 1);
        if (a == 0) return 0.0;
        if (b == 1 && a < static_cast<std::int64_t>(log_g1_.size())) return log_g1_[a];
        const double be = static_cast<double>(b) * params_.epsilon;
        return (std::lgamma(static_cast<double>(a) + be) - std::lgamma(be)) / kLn2;
    }

    /// L_p(X) from the bounding box and cardinality alone.
    double pattern_length(int rows_x, int cols_x, std::int64_t cardinality) const {
        assert(rows_x >= 1 && cols_x >= 1 && cardinality >= 1);
        assert(rows_x <= params_.rows && cols_x <= params_.cols);
        const std::int64_t area = static_cast<std::int64_t>(rows_x) * cols_x;
        double count_and_positions;
        if (params_.pattern_code == PatternCode::BinomialAsInteger) {
            count_and_positions = universal_integer_log2(log_binomial(area, cardinality));
        } else {
            count_and_positions =
                universal_integer(cardinality) + log_binomial(area, cardinality);
        }
        return log2_mn_ + count_and_positions +
               static_cast<double>(cardinality) * log2_alphabet_;
    }

    double pattern_length(const Pattern& p) const {
        return pattern_length(p.rows(), p.cols(), p.cardinality());
    }

    /// L1(H) = L_N(|H|) + sum of per-pattern lengths.
    double model_length(std::span<const Pattern* const> model) const {
        if (model.empty()) throw EmptyModel("model_length: model has no patterns");
        double bits = universal_integer(static_cast<std::int64_t>(model.size()));
        for (const Pattern* p : model) bits += pattern_length(*p);
        return bits;
    }

    /// L_pp(I): prequential plug-in code length of the instantiation matrix,
    /// given the usage of every pattern in the model. Exactly zero for a
    /// single-pattern model.
    double prequential_length(std::span<const std::int64_t> usages) const {
        double usage_terms = 0.0;
        std::int64_t instance_total = 0;
        for (std::int64_t u : usages) {
            assert(u >= 0);
            usage_terms += log_gamma_eps(u, 1);
            instance_total += u;
        }
        return -usage_terms +
               log_gamma_eps(instance_total, static_cast<std::int64_t>(usages.size()));
    }

    /// L2(I) = log2(MN) + L_pp(I). The bounds term of the instantiation
    /// matrix is constant across models and omitted.
    double instantiation_length(std::span<const std::int64_t> usages) const {
        return log2_mn_ + prequential_length(usages);
    }

    /// Description-length decrease achieved by a candidate merge, computed in
    /// constant time. Positive values improve compression. Patterns whose
    /// usage is driven to zero leave the model, which contributes their full
    /// pattern length as extra gain.
    GainBreakdown gain_breakdown(const GainInput& g) const {
        if (g.support < 1)
            throw InconsistentState("gain: candidate support must be >= 1");
        const std::int64_t drain = g.self ? 2 * g.support : g.support;
        const std::int64_t ux_after = g.usage_x - drain;
        const std::int64_t uy_after = g.self ? ux_after : g.usage_y - g.support;
        if (ux_after < 0 || uy_after < 0)
            throw InconsistentState("gain: support exceeds available usages");
        const std::int64_t uz_after = g.usage_z + g.support;

        int removed = (ux_after == 0 ? 1 : 0) + (!g.self && uy_after == 0 ? 1 : 0);
        const std::int64_t model_after = g.model_size + (g.z_in_model ? 0 : 1) - removed;
        const std::int64_t instances_after = g.instance_count - g.support;
        assert(model_after >= 1 && instances_after >= 1);

        GainBreakdown out;
        out.model_delta = universal_integer(g.model_size) - universal_integer(model_after) -
                          (g.z_in_model ? 0.0 : g.pattern_bits_z) +
                          (ux_after == 0 ? g.pattern_bits_x : 0.0) +
                          (!g.self && uy_after == 0 ? g.pattern_bits_y : 0.0);

        double usage_delta = log_gamma_eps(ux_after, 1) - log_gamma_eps(g.usage_x, 1);
        if (!g.self)
            usage_delta += log_gamma_eps(uy_after, 1) - log_gamma_eps(g.usage_y, 1);
        usage_delta += log_gamma_eps(uz_after, 1) - log_gamma_eps(g.usage_z, 1);
        out.instantiation_delta = usage_delta +
                                  log_gamma_eps(g.instance_count, g.model_size) -
                                  log_gamma_eps(instances_after, model_after);
        return out;
    }

    double gain(const GainInput& g) const { return gain_breakdown(g).total(); }

private:
    static constexpr double kLn2 = 0.693147180559945309417232121458;

    EncodingParams params_;
    double log2_mn_ = 0.0;
    double log2_alphabet_ = 0.0;
    double log2_c0_ = 0.0;
    double lgamma_eps_ = 0.0;
    std::vector<double> lgamma_fact_;  // lgamma(n + 1) for n in [0, MN+1]
    std::vector<double> log_g1_;       // log_G(a, 1) in bits for a in [0, MN]
};

}  // namespace vouw
