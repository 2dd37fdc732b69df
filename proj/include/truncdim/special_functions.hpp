#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace truncdim {

namespace detail {

// Lanczos rational approximation, N = 13, g = 6.024680040776729583740234375,
// tuned for 53-bit doubles (max relative error below 1e-15 across the
// positive axis). The denominator is z(z+1)...(z+11).
inline constexpr double kLanczosG = 6.024680040776729583740234375;

inline constexpr std::array<double, 13> kLanczosNum = {
    23531376880.41075968857200767445163675473,
    42919803642.64909876895789904700198885093,
    35711959237.35566804944018545154716670596,
    17921034426.03720969991975575445893111267,
    6039542586.35202800506429164430729792107,
    1439720407.311721673663223072794912393972,
    248874557.8620541565114603864132294232163,
    31426415.58540019438061423162831820536287,
    2876370.628935372441225409051620849613599,
    186056.2653952234950402949897160456992822,
    8071.672002365816210638002902272250613822,
    210.8242777515793458725097339207133627117,
    2.506628274631000270164908177133837338626,
};

inline constexpr std::array<double, 13> kLanczosDenom = {
    0.0,          39916800.0, 120543840.0, 150917976.0, 105258076.0, 45995730.0, 13339535.0,
    2637558.0,    357423.0,   32670.0,     1925.0,      66.0,        1.0,
};

// num(z)/denom(z) with coefficients stored lowest order first; evaluated in
// 1/z for z > 1 so the big coefficients never overflow intermediates.
inline double lanczos_sum(double z) noexcept {
    double num = 0.0;
    double den = 0.0;
    if (z <= 1.0) {
        for (int i = 12; i >= 0; --i) {
            num = num * z + kLanczosNum[static_cast<std::size_t>(i)];
            den = den * z + kLanczosDenom[static_cast<std::size_t>(i)];
        }
    } else {
        const double rz = 1.0 / z;
        for (int i = 0; i <= 12; ++i) {
            num = num * rz + kLanczosNum[static_cast<std::size_t>(i)];
            den = den * rz + kLanczosDenom[static_cast<std::size_t>(i)];
        }
    }
    return num / den;
}

}  // namespace detail

/// Gamma(a) for a > 0 via the Lanczos approximation:
///   Gamma(z) = S(z) * e^{-t} * t^{z-1/2},  t = z + g - 1/2.
inline double gamma_function(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_function: need a > 0");
    if (a > 171.624) return std::numeric_limits<double>::infinity();  // overflows double
    if (a < 0.5) {
        // reflection keeps the Lanczos argument away from zero
        const double pi = 3.141592653589793238462643383279502884;
        return pi / (std::sin(pi * a) * gamma_function(1.0 - a));
    }
    const double t = a + detail::kLanczosG - 0.5;
    const double s = detail::lanczos_sum(a);
    if (a > 140.0) {
        // split the power to defer overflow of t^{a-1/2}
        const double hp = std::pow(t, 0.5 * (a - 0.5));
        return s * (hp * std::exp(-t)) * hp;
    }
    return s * std::exp(-t) * std::pow(t, a - 0.5);
}

/// Natural log of Gamma(a) for a > 0 (no overflow for large a).
inline double log_gamma(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("log_gamma: need a > 0");
    if (a < 0.5) {
        const double pi = 3.141592653589793238462643383279502884;
        return std::log(pi / std::sin(pi * a)) - log_gamma(1.0 - a);
    }
    const double t = a + detail::kLanczosG - 0.5;
    return std::log(detail::lanczos_sum(a)) - t + (a - 0.5) * std::log(t);
}

/// (r-1)! for integer r >= 1.
inline double factorial_of(int n) {
    if (n < 0) throw std::invalid_argument("factorial_of: need n >= 0");
    return gamma_function(static_cast<double>(n) + 1.0);
}

}  // namespace truncdim
