#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "truncdim/errors.hpp"
#include "truncdim/exponent.hpp"
#include "truncdim/kernels.hpp"
#include "truncdim/series.hpp"
#include "truncdim/weights.hpp"

namespace truncdim {

/// Norm of the identity embedding between the anchored space and its
/// omega-centered counterpart. The inverse embedding has the same norm, so
/// one number describes both directions.
struct EmbeddingNorm {
    double value = 1.0;
    Exactness exactness = Exactness::exact;
    /// Set when the value is one of the four exact corner identities.
    std::optional<std::pair<Exponent, Exponent>> corner;

    bool is_infinite() const noexcept { return std::isinf(value); }
};

namespace detail {

inline void require_corner(const Exponent& p) {
    if (!p.is_one() && !p.is_infinite()) {
        throw std::invalid_argument("corner_norm: exponents must be 1 or inf");
    }
}

// Exact corner value for explicit weights. The p2 = 1 corners maximize
//   sum_{v within u} (gamma_u / gamma_v) M^{|u| - |v|}
// over u; the p2 = inf corners maximize
//   sum_{v disjoint from u} (gamma_{u union v} / gamma_u) M^{|v|}.
inline double corner_norm_explicit(const ExplicitWeights& w, double m, bool p2_is_one) {
    constexpr int kCap = 16;  // 3^s subset pairs
    const int s = w.dimension();
    if (s > kCap) {
        throw DimensionTooLarge("corner_norm: explicit enumeration capped at s = " +
                                std::to_string(kCap));
    }
    std::vector<double> mpow(static_cast<std::size_t>(s) + 1, 1.0);
    for (int i = 1; i <= s; ++i) mpow[static_cast<std::size_t>(i)] = mpow[i - 1] * m;

    const std::uint32_t n = w.subset_count();
    const std::uint32_t full = n - 1;
    double best = 0.0;
    for (std::uint32_t u = 0; u < n; ++u) {
        const double gu = w.gamma(u);
        if (gu <= 0.0) continue;
        double total = 0.0;
        if (p2_is_one) {
            const int cu = std::popcount(u);
            std::uint32_t v = u;
            while (true) {  // iterate all submasks of u, including 0 and u
                total += gu / w.gamma(v) * mpow[static_cast<std::size_t>(cu - std::popcount(v))];
                if (v == 0) break;
                v = (v - 1) & u;
            }
        } else {
            const std::uint32_t comp = full & ~u;
            std::uint32_t v = comp;
            while (true) {
                total += w.gamma(u | v) / gu * mpow[static_cast<std::size_t>(std::popcount(v))];
                if (v == 0) break;
                v = (v - 1) & comp;
            }
        }
        best = std::max(best, total);
    }
    return best;
}

// prod_{j<=s} (1 + gamma_j m), in log domain; infinite s needs a summable
// weight sequence.
inline double one_plus_product(const ProductWeights& w, double m, double tol) {
    if (m == 0.0) return 1.0;
    try {
        return std::exp(log_one_plus_product(w, m, 1.0, tol));
    } catch (const DivergentTail&) {
        throw DivergentProduct(
            "embedding norm: sum of gamma_j diverges, the infinite product is unbounded");
    }
}

}  // namespace detail

/// Exact embedding norm at a corner (p1, p2) in {1, inf}^2. M is the kernel
/// constant matching p1: ||kappa_bar_{1,omega}||_{L_inf} for p1 = 1,
/// ||kappa_bar_{inf,omega}||_{L_1} for p1 = inf.
inline EmbeddingNorm corner_norm(const ExplicitWeights& w, double m, Exponent p1, Exponent p2) {
    detail::require_corner(p1);
    detail::require_corner(p2);
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw std::invalid_argument("corner_norm: need finite M >= 0");
    }
    EmbeddingNorm res;
    res.value = detail::corner_norm_explicit(w, m, p2.is_one());
    res.exactness = Exactness::exact;
    res.corner = std::make_pair(p1, p2);
    return res;
}

/// Product-weight reduction of the corner norm: prod_j (1 + gamma_j M),
/// independent of p2.
inline EmbeddingNorm corner_norm(const ProductWeights& w, double m, Exponent p1, Exponent p2,
                                 double tol = 1e-13) {
    detail::require_corner(p1);
    detail::require_corner(p2);
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw std::invalid_argument("corner_norm: need finite M >= 0");
    }
    EmbeddingNorm res;
    res.value = detail::one_plus_product(w, m, tol);
    res.exactness = Exactness::exact;
    res.corner = std::make_pair(p1, p2);
    return res;
}

/// Interpolation upper bound for arbitrary exponents from the corner norms:
///   p1 <= p2:  ||i_{1,inf}||^{1/p1-1/p2} ||i_{1,1}||^{1/p2} ||i_{inf,inf}||^{1-1/p1}
///   p2 <  p1:  ||i_{inf,1}||^{1/p2-1/p1} ||i_{1,1}||^{1/p1} ||i_{inf,inf}||^{1-1/p2}
/// m1 and minf are the kernel constants of the p1 = 1 and p1 = inf corners.
inline EmbeddingNorm interpolated_bound(const ExplicitWeights& w, Exponent p1, Exponent p2,
                                        double m1, double minf) {
    const Exponent one(1.0);
    const Exponent inf = Exponent::infinity();
    double e_mixed, e_11, e_caps;
    double mixed_corner;
    if (p1 <= p2) {
        e_mixed = p1.reciprocal() - p2.reciprocal();
        e_11 = p2.reciprocal();
        e_caps = 1.0 - p1.reciprocal();
        mixed_corner = e_mixed > 0.0 ? corner_norm(w, m1, one, inf).value : 1.0;
    } else {
        e_mixed = p2.reciprocal() - p1.reciprocal();
        e_11 = p1.reciprocal();
        e_caps = 1.0 - p2.reciprocal();
        mixed_corner = e_mixed > 0.0 ? corner_norm(w, minf, inf, one).value : 1.0;
    }
    const double c_11 = e_11 > 0.0 ? corner_norm(w, m1, one, one).value : 1.0;
    const double c_caps = e_caps > 0.0 ? corner_norm(w, minf, inf, inf).value : 1.0;

    EmbeddingNorm res;
    res.value = std::pow(mixed_corner, e_mixed) * std::pow(c_11, e_11) * std::pow(c_caps, e_caps);
    res.exactness = Exactness::upper_bound;
    return res;
}

/// Product-weight interpolation bound:
///   prod_j (1 + gamma_j m1)^{1/p1} (1 + gamma_j minf)^{1-1/p1}.
inline EmbeddingNorm interpolated_bound(const ProductWeights& w, Exponent p1, Exponent p2,
                                        double m1, double minf, double tol = 1e-13) {
    (void)p2;  // the product reduction depends on p2 only through Cor-5 bookkeeping
    if (!(m1 >= 0.0) || !(minf >= 0.0)) {
        throw std::invalid_argument("interpolated_bound: need M >= 0");
    }
    const double a = p1.reciprocal();
    double log_total = 0.0;
    if (a > 0.0) log_total += a * std::log(detail::one_plus_product(w, m1, tol));
    if (a < 1.0) log_total += (1.0 - a) * std::log(detail::one_plus_product(w, minf, tol));
    EmbeddingNorm res;
    res.value = std::exp(log_total);
    res.exactness = Exactness::upper_bound;
    return res;
}

}  // namespace truncdim
