#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "truncdim/errors.hpp"
#include "truncdim/exponent.hpp"
#include "truncdim/series.hpp"
#include "truncdim/weights.hpp"

namespace truncdim {

/// Brute-force value of sum_{u within [s], u not within [k]} (C1^{|u|} gamma_u)^t
/// by full subset enumeration (sup instead of sum when t = inf, passed as
/// the conjugate exponent). Validation oracle for the closed forms; also
/// behind the CLI --verify flag.
inline double subset_sum_oracle(const ExplicitWeights& w, double c1, std::uint64_t k,
                                Exponent pstar) {
    const int s = w.dimension();
    if (k > static_cast<std::uint64_t>(s)) {
        throw InvalidIndex("subset_sum_oracle: k exceeds s");
    }
    const std::uint32_t n = w.subset_count();
    const std::uint32_t kmask =
        static_cast<std::uint32_t>((std::uint64_t{1} << std::min<std::uint64_t>(
                                        k, static_cast<std::uint64_t>(s))) -
                                   1);

    std::vector<double> c1_pow(static_cast<std::size_t>(s) + 1, 1.0);
    for (int i = 1; i <= s; ++i) c1_pow[static_cast<std::size_t>(i)] = c1_pow[i - 1] * c1;

    if (pstar.is_infinite()) {
        double best = 0.0;
        for (std::uint32_t u = 0; u < n; ++u) {
            if ((u & ~kmask) == 0) continue;
            best = std::max(best, c1_pow[static_cast<std::size_t>(std::popcount(u))] * w.gamma(u));
        }
        return best;
    }
    const double t = pstar.value();
    detail::Kahan acc;
    for (std::uint32_t u = 0; u < n; ++u) {
        if ((u & ~kmask) == 0) continue;
        const double base = c1_pow[static_cast<std::size_t>(std::popcount(u))] * w.gamma(u);
        if (base > 0.0) acc.add(std::pow(base, t));
    }
    return acc.sum;
}

/// Brute-force corner embedding norm by plain nested subset loops,
/// independent of the submask iteration used by the embeddings module.
inline double corner_norm_oracle(const ExplicitWeights& w, double m, Exponent p1, Exponent p2) {
    if (!p1.is_one() && !p1.is_infinite()) {
        throw std::invalid_argument("corner_norm_oracle: p1 must be 1 or inf");
    }
    if (!p2.is_one() && !p2.is_infinite()) {
        throw std::invalid_argument("corner_norm_oracle: p2 must be 1 or inf");
    }
    const int s = w.dimension();
    if (s > 15) throw DimensionTooLarge("corner_norm_oracle: capped at s = 15");
    const std::uint32_t n = w.subset_count();
    const bool sum_over_subsets = p2.is_one();

    double best = 0.0;
    for (std::uint32_t u = 0; u < n; ++u) {
        if (w.gamma(u) <= 0.0) continue;
        double total = 0.0;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (sum_over_subsets) {
                if ((v & u) != v) continue;  // need v within u
                total += w.gamma(u) / w.gamma(v) *
                         std::pow(m, static_cast<double>(std::popcount(u) - std::popcount(v)));
            } else {
                if ((v & u) != 0) continue;  // need v disjoint from u
                total += w.gamma(u | v) / w.gamma(u) *
                         std::pow(m, static_cast<double>(std::popcount(v)));
            }
        }
        best = std::max(best, total);
    }
    return best;
}

}  // namespace truncdim
