#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "truncdim/errors.hpp"
#include "truncdim/weights.hpp"

namespace truncdim {

/// Rigorous enclosure [lo, hi] of a scalar quantity.
struct Bracket {
    double lo;
    double hi;

    double mid() const noexcept { return 0.5 * (lo + hi); }
    double half_width() const noexcept { return 0.5 * (hi - lo); }

    static Bracket around(double v, double rel_fuzz) noexcept {
        const double f = rel_fuzz * (std::abs(v) + std::numeric_limits<double>::min());
        return {v - f, v + f};
    }
};

namespace detail {

/// Error-compensated (Kahan) accumulator.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) noexcept {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// ln(1 + e^w) without overflow; w = t*ln(c*gamma_j) is the log of one term.
inline double log1p_exp(double w) noexcept {
    if (w > 36.0) return w;        // e^w dominates 1 beyond double resolution
    if (w < -745.0) return 0.0;    // e^w underflows
    return std::log1p(std::exp(w));
}

// integral_M^inf x^-beta dx for beta > 1.
inline double power_tail_integral(double m, double beta) noexcept {
    return std::pow(m, 1.0 - beta) / (beta - 1.0);
}

inline constexpr double kSumFpFuzz = 8.0 * std::numeric_limits<double>::epsilon();

}  // namespace detail

/// Enclosure of sum_{j=k+1}^{s} gamma_j^t.
///
/// Finite s: direct compensated summation. Infinite s (polynomial decay
/// j^-alpha, requires alpha*t > 1): partial sum to index m plus the integral
/// bracket integral_{m+1}^inf x^{-alpha t} dx <= remainder <=
/// integral_{m}^inf x^{-alpha t} dx, with m grown until the bracket width is
/// at most tol.
inline Bracket tail_power_sum_bracket(const ProductWeights& w, std::uint64_t k, double t,
                                      double tol) {
    if (!(t > 0.0)) throw std::invalid_argument("tail_power_sum: need t > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tail_power_sum: need tol > 0");
    if (!w.infinite_dimension()) {
        const std::uint64_t s = w.dimension();
        if (k > s) {
            throw InvalidIndex("tail_power_sum: k = " + std::to_string(k) + " exceeds s = " +
                               std::to_string(s));
        }
        detail::Kahan acc;
        for (std::uint64_t j = k + 1; j <= s; ++j) acc.add(std::pow(w.gamma(j), t));
        return Bracket::around(acc.sum, detail::kSumFpFuzz);
    }

    const double beta = w.alpha() * t;
    if (beta <= 1.0) {
        throw DivergentTail("tail_power_sum: alpha*t = " + std::to_string(beta) +
                            " <= 1, the infinite tail diverges");
    }

    // Width of the bracket after summing through index m is
    // integral_m^{m+1} x^-beta dx <= m^-beta; start from the m that makes it
    // small enough and verify, doubling on the rare miss.
    // aim below tol so the floating-point fuzz added at the end cannot push
    // the enclosure over the contract
    const double target = 0.5 * tol;
    std::uint64_t m = std::max<std::uint64_t>(k, 1);
    {
        const double need = std::pow(target, -1.0 / beta);
        if (need > static_cast<double>(m)) {
            if (need > 2e9) {
                throw NoConvergence(
                    "tail_power_sum: ~" + std::to_string(need) +
                    " terms needed for this tol; alpha*t too close to 1 (loosen tol)");
            }
            m = static_cast<std::uint64_t>(need) + 1;
        }
    }
    detail::Kahan acc;
    auto sum_through = [&](std::uint64_t from, std::uint64_t to) {
        for (std::uint64_t j = from; j <= to; ++j) acc.add(std::pow(w.gamma(j), t));
    };
    sum_through(k + 1, m);
    double lo_int = detail::power_tail_integral(static_cast<double>(m + 1), beta);
    double hi_int = detail::power_tail_integral(static_cast<double>(m), beta);
    int grow = 0;
    while (hi_int - lo_int > target) {
        if (++grow > 50 || m > (std::uint64_t{1} << 40)) {
            throw NoConvergence("tail_power_sum: cannot reach requested bracket width");
        }
        const std::uint64_t m2 = m * 2;
        sum_through(m + 1, m2);
        m = m2;
        lo_int = detail::power_tail_integral(static_cast<double>(m + 1), beta);
        hi_int = detail::power_tail_integral(static_cast<double>(m), beta);
    }
    const double fuzz = detail::kSumFpFuzz * (acc.sum + hi_int);
    return {acc.sum + lo_int - fuzz, acc.sum + hi_int + fuzz};
}

/// sum_{j=k+1}^s gamma_j^t with absolute error <= tol.
inline double tail_power_sum(const ProductWeights& w, std::uint64_t k, double t,
                             double tol = 1e-13) {
    return tail_power_sum_bracket(w, k, t, tol).mid();
}

/// Enclosure of sum_{j=1}^s ln(1 + (c*gamma_j)^t), the log-domain form of
/// prod_{j=1}^s (1 + (c*gamma_j)^t).
///
/// Infinite s uses a partial sum plus a two-sided remainder enclosure built
/// from x - x^2/2 <= ln(1+x) <= x and integral brackets of the two power
/// sums: the remainder after index m lies in
///   [ c^t I(m+1, beta) - c^{2t}/2 I(m, 2 beta),  c^t I(m, beta) ],
/// I(M, b) = integral_M^inf x^-b dx. (The one-sided version with only the
/// upper power-sum integral has width ~ m^{1-beta} and cannot reach tight
/// tolerances when alpha*t is close to 1; this one has width ~ m^-beta.)
inline Bracket log_one_plus_product_bracket(const ProductWeights& w, double c, double t,
                                            double tol) {
    if (!(c >= 0.0)) throw std::invalid_argument("log_one_plus_product: need c >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("log_one_plus_product: need t > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("log_one_plus_product: need tol > 0");
    if (c == 0.0) return {0.0, 0.0};

    const double log_c = std::log(c);
    auto term = [&](std::uint64_t j) {
        return detail::log1p_exp(t * (log_c + std::log(w.gamma(j))));
    };

    if (!w.infinite_dimension()) {
        detail::Kahan acc;
        for (std::uint64_t j = 1; j <= w.dimension(); ++j) acc.add(term(j));
        return Bracket::around(acc.sum, detail::kSumFpFuzz);
    }

    const double beta = w.alpha() * t;
    if (beta <= 1.0) {
        throw DivergentTail("log_one_plus_product: alpha*t = " + std::to_string(beta) +
                            " <= 1, the infinite product diverges");
    }
    const double ct = std::exp(t * log_c);
    const double target = 0.5 * tol;

    auto width_at = [&](double m) {
        const double first_order = detail::power_tail_integral(m, beta) -
                                   detail::power_tail_integral(m + 1.0, beta);
        const double quadratic = 0.5 * ct * ct * detail::power_tail_integral(m, 2.0 * beta);
        return ct * first_order + quadratic;
    };
    std::uint64_t m = 16;
    while (width_at(static_cast<double>(m)) > target) {
        m *= 2;
        if (m > (std::uint64_t{1} << 31)) {
            throw NoConvergence(
                "log_one_plus_product: tail needs too many terms for this tol (loosen tol)");
        }
    }
    detail::Kahan acc;
    for (std::uint64_t j = 1; j <= m; ++j) acc.add(term(j));
    const double md = static_cast<double>(m);
    const double tail_lo = ct * detail::power_tail_integral(md + 1.0, beta) -
                           0.5 * ct * ct * detail::power_tail_integral(md, 2.0 * beta);
    const double tail_hi = ct * detail::power_tail_integral(md, beta);
    const double fuzz = detail::kSumFpFuzz * (std::abs(acc.sum) + tail_hi);
    return {acc.sum + std::max(0.0, tail_lo) - fuzz, acc.sum + tail_hi + fuzz};
}

/// sum_{j=1}^s ln(1 + (c*gamma_j)^t) with absolute error <= tol.
inline double log_one_plus_product(const ProductWeights& w, double c, double t,
                                   double tol = 1e-13) {
    return log_one_plus_product_bracket(w, c, t, tol).mid();
}

}  // namespace truncdim
