#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "truncdim/errors.hpp"

namespace truncdim {

/// Product weights gamma_u = prod_{j in u} gamma_j built from a positive
/// sequence, either rule-generated (polynomial decay j^-alpha over a finite
/// or infinite index range) or a user-supplied finite sequence.
class ProductWeights {
public:
    static constexpr std::uint64_t kInfiniteDimension =
        std::numeric_limits<std::uint64_t>::max();

    /// gamma_j = j^-alpha for j = 1..s (s may be kInfiniteDimension).
    static ProductWeights polynomial(double alpha, std::uint64_t s = kInfiniteDimension) {
        if (!(alpha > 0.0)) {
            throw std::invalid_argument("ProductWeights: polynomial decay needs alpha > 0");
        }
        ProductWeights w;
        w.alpha_ = alpha;
        w.s_ = s;
        w.monotone_ = true;
        w.rule_based_ = true;
        return w;
    }

    /// Explicitly listed gamma_1, ..., gamma_s (finite). Non-monotone
    /// sequences are accepted here; operations that rely on "gamma_{k+1} is
    /// the largest remaining weight" check monotone() and refuse or fall
    /// back to enumeration.
    static ProductWeights sequence(std::vector<double> gamma) {
        if (gamma.empty()) {
            throw std::invalid_argument("ProductWeights: empty weight sequence");
        }
        ProductWeights w;
        w.rule_based_ = false;
        w.s_ = gamma.size();
        w.monotone_ = true;
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i])) {
                throw std::invalid_argument("ProductWeights: weights must be positive finite");
            }
            if (i > 0 && gamma[i] > gamma[i - 1]) w.monotone_ = false;
        }
        w.seq_ = std::move(gamma);
        return w;
    }

    bool infinite_dimension() const noexcept { return s_ == kInfiniteDimension; }
    std::uint64_t dimension() const noexcept { return s_; }
    bool monotone() const noexcept { return monotone_; }
    bool rule_based() const noexcept { return rule_based_; }

    double alpha() const {
        if (!rule_based_) throw std::logic_error("ProductWeights: no decay rule");
        return alpha_;
    }

    /// gamma_j, 1-based, j <= dimension().
    double gamma(std::uint64_t j) const {
        if (j < 1 || j > s_) {
            throw InvalidIndex("ProductWeights: index " + std::to_string(j) +
                               " outside 1.." + std::to_string(s_));
        }
        if (!rule_based_) return seq_[static_cast<std::size_t>(j - 1)];
        return poly_gamma(j);
    }

    double max_gamma() const {
        if (rule_based_ || monotone_) return gamma(1);
        double m = 0.0;
        for (double g : seq_) m = std::max(m, g);
        return m;
    }

private:
    ProductWeights() = default;

    // j^-alpha. For integral alpha with j^alpha exactly representable, the
    // reciprocal of an exact integer power is correctly rounded; std::pow is
    // not guaranteed that, and table thresholds like 100^-2 == 1e-4 must
    // compare exactly.
    double poly_gamma(std::uint64_t j) const {
        const double a = alpha_;
        const double ra = std::round(a);
        if (a == ra && ra >= 1.0 && ra <= 32.0) {
            const int n = static_cast<int>(ra);
            double p = 1.0;
            const double x = static_cast<double>(j);
            bool exact = true;
            for (int i = 0; i < n; ++i) {
                p *= x;
                if (p > 9.007199254740992e15) {  // 2^53: product no longer exact
                    exact = false;
                    break;
                }
            }
            if (exact) return 1.0 / p;
        }
        return std::pow(static_cast<double>(j), -a);
    }

    double alpha_ = 0.0;
    std::uint64_t s_ = 0;
    std::vector<double> seq_;
    bool monotone_ = false;
    bool rule_based_ = false;
};

/// Per-subset weights gamma_u for u subseteq [s], stored densely by bitmask
/// (bit j-1 set <=> variable j in u). Entries may be zero, but positivity
/// must be downward closed: gamma_u > 0 implies gamma_v > 0 for all v
/// subseteq u. Omitted entries are zeros.
class ExplicitWeights {
public:
    static constexpr int kMaxDimension = 25;  // 2^25 table, enumeration budget

    ExplicitWeights(int s, std::vector<double> table) : s_(s), table_(std::move(table)) {
        if (s < 1 || s > kMaxDimension) {
            throw DimensionTooLarge("ExplicitWeights: s must lie in 1.." +
                                    std::to_string(kMaxDimension));
        }
        if (table_.size() != (std::size_t{1} << s)) {
            throw std::invalid_argument("ExplicitWeights: table must have 2^s entries");
        }
        for (double g : table_) {
            if (!(g >= 0.0) || !std::isfinite(g)) {
                throw std::invalid_argument("ExplicitWeights: entries must be finite and >= 0");
            }
        }
        if (!(table_[0] > 0.0)) {
            throw std::invalid_argument("ExplicitWeights: gamma_emptyset must be positive");
        }
        // Downward closure: checking all single-bit removals suffices.
        for (std::uint32_t u = 1; u < table_.size(); ++u) {
            if (table_[u] <= 0.0) continue;
            for (std::uint32_t bits = u; bits != 0; bits &= bits - 1) {
                const std::uint32_t v = u & ~(bits & (~bits + 1));
                if (table_[v] <= 0.0) {
                    throw std::invalid_argument(
                        "ExplicitWeights: gamma_u > 0 requires gamma_v > 0 for all v in u");
                }
            }
        }
    }

    /// Materialize product weights gamma_u = prod_{j in u} gamma_j from a
    /// finite sequence (monotone or not).
    static ExplicitWeights from_product(std::span<const double> gamma) {
        const int s = static_cast<int>(gamma.size());
        if (s < 1 || s > kMaxDimension) {
            throw DimensionTooLarge("ExplicitWeights: s must lie in 1.." +
                                    std::to_string(kMaxDimension));
        }
        std::vector<double> table(std::size_t{1} << s, 1.0);
        for (std::uint32_t u = 1; u < table.size(); ++u) {
            const int j = std::countr_zero(u);
            table[u] = table[u & (u - 1)] * gamma[static_cast<std::size_t>(j)];
        }
        return ExplicitWeights(s, std::move(table));
    }

    int dimension() const noexcept { return s_; }
    std::uint32_t subset_count() const noexcept { return std::uint32_t{1} << s_; }

    double gamma(std::uint32_t subset_mask) const {
        if (subset_mask >= table_.size()) {
            throw InvalidIndex("ExplicitWeights: subset mask out of range");
        }
        return table_[subset_mask];
    }

private:
    int s_;
    std::vector<double> table_;
};

}  // namespace truncdim
