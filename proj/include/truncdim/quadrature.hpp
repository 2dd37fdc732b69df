#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "truncdim/errors.hpp"

namespace truncdim {

/// Integration domain: a bounded interval [a, b] or the half line [a, inf).
struct Domain {
    double a = 0.0;
    double b = 1.0;
    bool semi_infinite = false;

    static Domain finite(double a, double b) {
        if (!(a < b)) throw std::invalid_argument("Domain: need a < b");
        return {a, b, false};
    }
    static Domain half_line(double a = 0.0) {
        return {a, std::numeric_limits<double>::infinity(), true};
    }

    bool contains(double x) const noexcept {
        return x >= a && (semi_infinite || x <= b);
    }
};

struct QuadratureResult {
    double value = 0.0;
    double err_estimate = 0.0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule. The Gauss nodes are
// the odd-indexed Kronrod abscissae; no node touches an interval endpoint,
// so integrands may be undefined there.
inline constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment {
    double lo, hi;
    double value;
    double err;

    bool operator<(const Segment& o) const noexcept { return err < o.err; }
};

template <typename F>
Segment gauss_kronrod_15(const F& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);

    double fv[15];
    const double fc = f(c);
    fv[14] = fc;
    double resk = kKronrodW[7] * fc;
    double resg = kGaussW[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodX[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += kKronrodW[j] * (f1 + f2);
        if (j % 2 == 1) resg += kGaussW[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kKronrodW[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kKronrodW[j] * (std::abs(fv[2 * j] - reskh) + std::abs(fv[2 * j + 1] - reskh));
    }
    resasc *= std::abs(h);
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    return {lo, hi, resk * h, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the domain.
///
/// Semi-infinite domains are mapped to (0, 1] via x = a + u/(1-u); the rule
/// never evaluates interval endpoints, so the image point x = inf is never
/// touched. An optional split point forces an initial bisection there (used
/// for integrands with a kink at a known location). Stops when
/// err_estimate <= tol plus a machine-relative floor of the running value
/// (large-magnitude integrals cannot reach an absolute target below their
/// own rounding noise); throws NoConvergence when the subdivision budget
/// runs out first.
template <typename F>
QuadratureResult adaptive_quadrature(const F& f, Domain domain, double tol,
                                     std::optional<double> split_at = std::nullopt,
                                     int max_segments = 4000) {
    if (!(tol > 0.0)) throw std::invalid_argument("adaptive_quadrature: need tol > 0");

    // Work on [lo0, hi0] in transformed coordinates.
    double lo0 = 0.0;
    double hi0 = 1.0;
    std::function<double(double)> g;
    std::optional<double> split_t;
    if (domain.semi_infinite) {
        const double a = domain.a;
        g = [f, a](double u) {
            const double om = 1.0 - u;
            const double x = a + u / om;
            return f(x) / (om * om);
        };
        if (split_at && *split_at > domain.a) {
            const double d = *split_at - domain.a;
            split_t = d / (1.0 + d);
        }
    } else {
        lo0 = domain.a;
        hi0 = domain.b;
        g = [f](double x) { return f(x); };
        if (split_at && *split_at > domain.a && *split_at < domain.b) split_t = *split_at;
    }

    std::priority_queue<detail::Segment> heap;
    double total = 0.0;
    double total_err = 0.0;
    auto push = [&](double lo, double hi) {
        const detail::Segment s = detail::gauss_kronrod_15(g, lo, hi);
        total += s.value;
        total_err += s.err;
        heap.push(s);
    };
    if (split_t) {
        push(lo0, *split_t);
        push(*split_t, hi0);
    } else {
        push(lo0, hi0);
    }

    int segments = static_cast<int>(heap.size());
    auto converged = [&] { return total_err <= tol + 4e-13 * std::abs(total); };
    while (!converged() && segments < max_segments) {
        const detail::Segment worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.err;
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            // interval at machine resolution; put it back and stop splitting it
            total += worst.value;
            total_err += worst.err;
            heap.push({worst.lo, worst.hi, worst.value, 0.0});
            continue;
        }
        push(worst.lo, mid);
        push(mid, worst.hi);
        ++segments;
    }
    if (!converged()) {
        throw NoConvergence("adaptive_quadrature: err_estimate " + std::to_string(total_err) +
                            " > tol after " + std::to_string(segments) + " segments");
    }
    if (!std::isfinite(total)) {
        throw NoConvergence("adaptive_quadrature: non-finite integrand values encountered");
    }
    return {total, total_err};
}

/// Numeric supremum of f over the domain: endpoint-inclusive sampling
/// followed by golden-section refinement around the best sample. Returns
/// +inf when the values keep growing toward the far end of a half line.
template <typename F>
QuadratureResult numeric_sup(const F& f, Domain domain, int samples = 4096) {
    if (samples < 16) samples = 16;
    auto to_x = [&](double u) {
        if (!domain.semi_infinite) return domain.a + u * (domain.b - domain.a);
        return domain.a + u / (1.0 - u);
    };
    const double u_max = domain.semi_infinite
                             ? 1.0 - 1.0 / static_cast<double>(samples)
                             : 1.0;

    double best_u = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i <= samples; ++i) {
        const double u = u_max * static_cast<double>(i) / static_cast<double>(samples);
        const double v = f(to_x(u));
        if (v > best) {
            best = v;
            best_u = u;
            best_i = i;
        }
    }
    if (domain.semi_infinite && best_i >= samples - 1) {
        // still growing at the far end: check a few decades further out
        double x = to_x(u_max);
        double v = best;
        for (int d = 0; d < 6; ++d) {
            x *= 10.0;
            const double v2 = f(x);
            if (v2 < v) break;
            v = v2;
            if (d == 5) return {std::numeric_limits<double>::infinity(), 0.0};
        }
        best = std::max(best, v);
    }

    // golden-section around the best sample (in u coordinates)
    const double du = u_max / static_cast<double>(samples);
    double lo = std::max(0.0, best_u - du);
    double hi = std::min(u_max, best_u + du);
    const double phi = 0.6180339887498948482;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(to_x(x1));
    double f2 = f(to_x(x2));
    for (int it = 0; it < 120 && hi - lo > 1e-15; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(to_x(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(to_x(x1));
        }
    }
    const double refined = std::max({best, f1, f2});
    const double err = std::max(refined - best, 1e-12 * (std::abs(refined) + 1e-300));
    return {refined, err};
}

}  // namespace truncdim
