#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "truncdim/errors.hpp"
#include "truncdim/exponent.hpp"
#include "truncdim/series.hpp"
#include "truncdim/weights.hpp"

namespace truncdim {

enum class BoundKind { exact_subset_sum, product_closed_form, p1_sup_form };

inline const char* to_string(BoundKind k) noexcept {
    switch (k) {
        case BoundKind::exact_subset_sum: return "exact-subset-sum";
        case BoundKind::product_closed_form: return "product-closed-form";
        case BoundKind::p1_sup_form: return "p1-sup-form";
    }
    return "?";
}

/// A truncation-error bound at a fixed cut index k.
struct TruncationReport {
    std::uint64_t k = 0;
    double bound = 0.0;
    BoundKind kind = BoundKind::product_closed_form;
    std::string branch;    ///< which formula branch produced the number
    Bracket interval{0.0, 0.0};  ///< enclosure of the bound value
};

/// dim(eps) together with the witness pair proving minimality:
/// bound_at_k_star <= epsilon < bound_at_previous. When even the k = 0
/// bound meets epsilon the result is clamped to k_star = 1 and
/// bound_at_previous reports +inf (there is no rejected predecessor).
struct DimensionResult {
    std::uint64_t k_star = 1;
    double bound_at_k_star = 0.0;
    double bound_at_previous = std::numeric_limits<double>::infinity();
    double epsilon = 0.0;
    /// Set when a threshold decision stayed ambiguous after tightening the
    /// tail tolerance 10x four times; the conservative (larger-k) branch was
    /// taken.
    bool threshold_straddled = false;
};

namespace detail {

inline std::uint32_t prefix_mask(int s, std::uint64_t k) noexcept {
    const std::uint64_t n = std::min<std::uint64_t>(k, static_cast<std::uint64_t>(s));
    return static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
}

}  // namespace detail

/// Exact value of the general subset-sum bound
///   ( sum_{u not within [k]} (||S_u|| gamma_u)^{p*} )^{1/p*}
/// by full enumeration, with sup semantics for p* = inf. op_norm maps a
/// subset bitmask to ||S_u||.
inline TruncationReport trunc_bound_general(const ExplicitWeights& w,
                                            const std::function<double(std::uint32_t)>& op_norm,
                                            std::uint64_t k, Exponent pstar) {
    const int s = w.dimension();
    if (k > static_cast<std::uint64_t>(s)) {
        throw InvalidIndex("trunc_bound_general: k exceeds s");
    }
    const std::uint32_t kmask = detail::prefix_mask(s, k);
    const std::uint32_t n = w.subset_count();

    TruncationReport rep;
    rep.k = k;
    rep.kind = BoundKind::exact_subset_sum;
    if (pstar.is_infinite()) {
        double best = 0.0;
        for (std::uint32_t u = 0; u < n; ++u) {
            if ((u & ~kmask) == 0) continue;  // u within [k]
            best = std::max(best, op_norm(u) * w.gamma(u));
        }
        rep.bound = best;
        rep.branch = "sup over u not within [k] of ||S_u|| gamma_u";
    } else {
        const double t = pstar.value();
        detail::Kahan acc;
        for (std::uint32_t u = 0; u < n; ++u) {
            if ((u & ~kmask) == 0) continue;
            const double term = op_norm(u) * w.gamma(u);
            if (term > 0.0) acc.add(std::pow(term, t));
        }
        rep.bound = std::pow(acc.sum, 1.0 / t);
        rep.branch = "subset sum, p* = " + std::to_string(t);
    }
    rep.interval = {rep.bound, rep.bound};
    return rep;
}

/// Same with the tensor-product model ||S_u|| = C1^{|u|}.
inline TruncationReport trunc_bound_general(const ExplicitWeights& w, double c1,
                                            std::uint64_t k, Exponent pstar) {
    if (!(c1 > 0.0)) throw std::invalid_argument("trunc_bound_general: need C1 > 0");
    return trunc_bound_general(
        w,
        [c1](std::uint32_t u) {
            return std::pow(c1, static_cast<double>(std::popcount(u)));
        },
        k, pstar);
}

namespace detail {

// max_{u not within [k]} prod_{j in u} (C1 gamma_j) for a finite monotone
// sequence. The maximizer is [m] united with {k+1} for the best prefix
// length m; scan all m in log domain.
inline double p1_max_monotone(const ProductWeights& w, double c1, std::uint64_t k) {
    const std::uint64_t s = w.dimension();
    const double log_next = std::log(c1 * w.gamma(k + 1));
    double best = log_next;  // m = 0
    double prefix = 0.0;
    for (std::uint64_t m = 1; m <= s; ++m) {
        prefix += std::log(c1 * w.gamma(m));
        best = std::max(best, m <= k ? prefix + log_next : prefix);
    }
    return std::exp(best);
}

// Fallback for non-monotone finite sequences: enumerate all subsets.
inline double p1_max_enumerate(const ProductWeights& w, double c1, std::uint64_t k) {
    const std::uint64_t s = w.dimension();
    if (s > ExplicitWeights::kMaxDimension) {
        throw NonMonotoneWeights(
            "trunc_bound_product: non-monotone sequence too large to enumerate (s > " +
            std::to_string(ExplicitWeights::kMaxDimension) + ")");
    }
    const std::uint32_t kmask = prefix_mask(static_cast<int>(s), k);
    const std::uint32_t n = std::uint32_t{1} << s;
    double best_log = -std::numeric_limits<double>::infinity();
    std::vector<double> lg(s);
    for (std::uint64_t j = 1; j <= s; ++j) lg[j - 1] = std::log(c1 * w.gamma(j));
    for (std::uint32_t u = 1; u < n; ++u) {
        if ((u & ~kmask) == 0) continue;
        double acc = 0.0;
        for (std::uint32_t bits = u; bits != 0; bits &= bits - 1) {
            acc += lg[static_cast<std::uint32_t>(std::countr_zero(bits))];
        }
        best_log = std::max(best_log, acc);
    }
    return std::exp(best_log);
}

inline Bracket product_bound_bracket(const ProductWeights& w, double c1, std::uint64_t k,
                                     const Exponent& p, double tol, TruncationReport* rep) {
    const bool finite = !w.infinite_dimension();
    const std::uint64_t s = w.dimension();
    if (finite && k > s) throw InvalidIndex("trunc_bound_product: k exceeds s");

    if (p.is_one()) {
        // p* = inf: err(k) <= max_{u not within [k]} C1^{|u|} gamma_u.
        if (rep) rep->kind = BoundKind::p1_sup_form;
        if (finite && k == s) {
            if (rep) rep->branch = "empty tail (k = s)";
            return {0.0, 0.0};
        }
        if (!w.monotone()) {
            // gamma_{k+1} is not "the largest remaining weight" here; the
            // exact sup still exists for small finite s.
            const double v = p1_max_enumerate(w, c1, k);
            if (rep) rep->branch = "non-monotone sequence, enumerated sup";
            return {v, v};
        }
        if (c1 * w.max_gamma() <= 1.0) {
            // Every factor C1 gamma_j <= 1, so the sup is the single largest
            // admissible factor: C1 gamma_{k+1}. Correctly rounded, so the
            // enclosure is a point: exact table ties like gamma_100 = 1e-4
            // must compare <= eps, not straddle.
            const double v = c1 * w.gamma(k + 1);
            if (rep) rep->branch = "C1 gamma_{k+1} (all factors <= 1)";
            return {v, v};
        }
        if (!finite) {
            throw DivergentTail(
                "trunc_bound_product: p = 1 with C1 gamma_1 > 1 is unsupported for s = inf "
                "(the sup may be unbounded)");
        }
        const double v = p1_max_monotone(w, c1, k);
        if (rep) rep->branch = "max over prefixes [m] united with {k+1}";
        return {v, v};
    }

    // p > 1 closed form, log domain:
    //   bound^{p*} = prod_j (1 + (C1 gamma_j)^{p*}) * (1 - e^{-C1^{p*} T(k)}),
    //   T(k) = sum_{j>k} gamma_j^{p*}.
    if (!w.rule_based() && !w.monotone()) {
        throw NonMonotoneWeights(
            "trunc_bound_product: closed form requires a nonincreasing sequence; "
            "materialize ExplicitWeights for non-monotone data");
    }
    if (rep) {
        rep->kind = BoundKind::product_closed_form;
        rep->branch = "log-domain product closed form";
    }
    if (finite && k == s) return {0.0, 0.0};

    const double t = conjugate(p).value();
    const Bracket L = log_one_plus_product_bracket(w, c1, t, tol);
    const Bracket T = tail_power_sum_bracket(w, k, t, tol);
    const double c = std::pow(c1, t);
    auto eval = [&](double logprod, double tail) {
        if (tail <= 0.0) return 0.0;
        const double one_minus = -std::expm1(-c * tail);  // 1 - e^{-c T}
        return std::exp((logprod + std::log(one_minus)) / t);
    };
    return {eval(L.lo, T.lo), eval(L.hi, T.hi)};
}

}  // namespace detail

/// Product-weight truncation bound.
///
/// p > 1:  ( prod_{j<=s} (1 + (C1 gamma_j)^{p*}) *
///           (1 - e^{-C1^{p*} sum_{j>k} gamma_j^{p*}}) )^{1/p*}
/// p = 1:  max_{u not within [k]} C1^{|u|} gamma_u, which is C1 gamma_{k+1}
///         whenever every factor C1 gamma_j is at most 1.
inline TruncationReport trunc_bound_product(const ProductWeights& w, double c1,
                                            std::uint64_t k, Exponent p, double tol = 1e-13) {
    if (!(c1 > 0.0)) throw std::invalid_argument("trunc_bound_product: need C1 > 0");
    TruncationReport rep;
    rep.k = k;
    rep.interval = detail::product_bound_bracket(w, c1, k, p, tol, &rep);
    rep.bound = rep.interval.mid();
    return rep;
}

/// (eps^{p*} + e^{p*})^{1/p*}; max(eps, e) for p* = inf. The combined error
/// of a truncation-based algorithm given the truncation demand eps and the
/// inner k-variate algorithm error e.
inline double combined_error(double epsilon, double inner_error, Exponent pstar) {
    if (!(epsilon >= 0.0) || !(inner_error >= 0.0)) {
        throw std::invalid_argument("combined_error: errors must be >= 0");
    }
    const double m = std::max(epsilon, inner_error);
    if (pstar.is_infinite() || m == 0.0) return m;
    const double t = pstar.value();
    return m * std::pow(std::pow(epsilon / m, t) + std::pow(inner_error / m, t), 1.0 / t);
}

namespace detail {

enum class Decision { yes, no, straddle };

struct Probe {
    Decision decision;
    Bracket bracket;
};

// Decide bound(k) <= eps, tightening tol 10x (up to four times) while the
// enclosure straddles eps. A still-ambiguous comparison is reported as
// straddle and treated conservatively (as "no") by the search.
template <typename BoundAt>
Probe decide_threshold(const BoundAt& bound_at, std::uint64_t k, double eps, double tol) {
    Bracket b{0.0, 0.0};
    double t = tol;
    for (int pass = 0; pass <= 4; ++pass, t *= 0.1) {
        b = bound_at(k, t);
        if (b.hi <= eps) return {Decision::yes, b};
        if (b.lo > eps) return {Decision::no, b};
    }
    return {Decision::straddle, b};
}

// Minimal k >= 1 with bound(k) <= eps for a bound nonincreasing in k.
// bound_at(k, tol) must return an enclosure.
template <typename BoundAt>
DimensionResult dimension_search(const BoundAt& bound_at, double eps, double tol,
                                 std::uint64_t k_cap) {
    if (!(eps > 0.0)) throw std::invalid_argument("truncation_dimension: need epsilon > 0");
    DimensionResult res;
    res.epsilon = eps;

    const Probe at0 = decide_threshold(bound_at, 0, eps, tol);
    if (at0.decision == Decision::yes) {
        // Already satisfied with no variables; dim is 1-based, so report 1
        // and mark the missing predecessor with +inf.
        res.k_star = 1;
        res.bound_at_k_star = bound_at(1, tol).mid();
        res.bound_at_previous = std::numeric_limits<double>::infinity();
        return res;
    }
    bool straddled = at0.decision == Decision::straddle;

    // Exponential doubling, then bisection on the bracketed range.
    std::uint64_t lo = 0;  // decided "no" (possibly via straddle)
    std::uint64_t hi = 1;
    Probe hi_probe = decide_threshold(bound_at, hi, eps, tol);
    while (hi_probe.decision != Decision::yes) {
        straddled |= hi_probe.decision == Decision::straddle;
        lo = hi;
        if (hi >= k_cap) {
            throw Unreachable("truncation_dimension: bound still above epsilon at k = " +
                              std::to_string(hi));
        }
        hi = std::min(k_cap, hi * 2);
        hi_probe = decide_threshold(bound_at, hi, eps, tol);
    }
    Probe accept = hi_probe;
    Probe reject = at0;
    bool have_reject = lo == 0;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        const Probe p = decide_threshold(bound_at, mid, eps, tol);
        if (p.decision == Decision::yes) {
            hi = mid;
            accept = p;
        } else {
            straddled |= p.decision == Decision::straddle;
            lo = mid;
            reject = p;
            have_reject = true;
        }
    }
    if (!have_reject) reject = decide_threshold(bound_at, lo, eps, tol);
    straddled |= reject.decision == Decision::straddle;

    res.k_star = hi;
    res.bound_at_k_star = accept.bracket.mid();
    res.bound_at_previous = reject.bracket.mid();
    res.threshold_straddled = straddled;
    return res;
}

}  // namespace detail

/// Minimal k >= 1 with trunc_bound_product(w, C1, k, p) <= epsilon.
inline DimensionResult truncation_dimension(const ProductWeights& w, double c1, double epsilon,
                                            Exponent p, double tol = 1e-13) {
    if (!(c1 > 0.0)) throw std::invalid_argument("truncation_dimension: need C1 > 0");
    const std::uint64_t k_cap =
        w.infinite_dimension() ? (std::uint64_t{1} << 40) : w.dimension();
    auto bound_at = [&](std::uint64_t k, double t) {
        return detail::product_bound_bracket(w, c1, k, p, t, nullptr);
    };
    return detail::dimension_search(bound_at, epsilon, tol, k_cap);
}

/// Minimal k >= 1 with trunc_bound_general(w, C1, k, p*) <= epsilon
/// (explicit weights, exact subset sums).
inline DimensionResult truncation_dimension(const ExplicitWeights& w, double c1, double epsilon,
                                            Exponent p, double tol = 1e-13) {
    if (!(c1 > 0.0)) throw std::invalid_argument("truncation_dimension: need C1 > 0");
    const Exponent pstar = conjugate(p);
    auto bound_at = [&](std::uint64_t k, double) {
        return trunc_bound_general(w, c1, k, pstar).interval;
    };
    return detail::dimension_search(bound_at, epsilon, tol,
                                    static_cast<std::uint64_t>(w.dimension()));
}

}  // namespace truncdim
