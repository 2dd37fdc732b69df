#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "truncdim/errors.hpp"
#include "truncdim/exponent.hpp"
#include "truncdim/quadrature.hpp"
#include "truncdim/special_functions.hpp"

namespace truncdim {

enum class Exactness { exact, upper_bound, quadrature };

inline const char* to_string(Exactness e) noexcept {
    switch (e) {
        case Exactness::exact: return "exact";
        case Exactness::upper_bound: return "upper-bound";
        case Exactness::quadrature: return "quadrature";
    }
    return "?";
}

/// A norm constant. +inf is a meaningful value (the constant diverges for
/// that parameter set), not an error.
struct ConstantResult {
    double value = 0.0;
    Exactness exactness = Exactness::exact;
    double err_estimate = 0.0;  ///< populated for quadrature results
    std::string branch;

    bool is_infinite() const noexcept { return std::isinf(value); }
};

enum class GFunction { one_minus_exp, one_minus_cos };

namespace detail {

// base^e with the 0^0 = 1 convention used by the r = 1 kernel formulas.
inline double ipow0(double base, int e) noexcept {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= base;
    return p;
}

inline double g_value(GFunction g, double y) noexcept {
    switch (g) {
        case GFunction::one_minus_exp: return -std::expm1(-y);
        case GFunction::one_minus_cos: return 1.0 - std::cos(y);
    }
    return 0.0;
}

}  // namespace detail

/// The univariate kernel kappa(x, t) and weight psi(t) defining a space
/// family, anchored at zero: kappa(0, .) == 0.
class KernelSpec {
public:
    enum class Variant { anchored_step, poly_exp, smooth_g, custom };

    /// D = [0,1], psi == 1, kappa(x,t) = (x-t)^0_+.
    static KernelSpec anchored_step() {
        KernelSpec k;
        k.variant_ = Variant::anchored_step;
        k.domain_ = Domain::finite(0.0, 1.0);
        return k;
    }

    /// D = [0,inf), kappa(x,t) = (x-t)^{r-1}_+/(r-1)!, psi(t) = e^{lambda t}.
    static KernelSpec poly_exp(int r, double lambda) {
        if (r < 1) throw std::invalid_argument("KernelSpec: poly_exp needs r >= 1");
        if (!std::isfinite(lambda)) throw std::invalid_argument("KernelSpec: lambda not finite");
        KernelSpec k;
        k.variant_ = Variant::poly_exp;
        k.domain_ = Domain::half_line(0.0);
        k.r_ = r;
        k.lambda_ = lambda;
        return k;
    }

    /// D = [0,inf), kappa(x,t) = G(x t) for a bounded smooth G with G(0)=0,
    /// psi(t) = e^{lambda t}.
    static KernelSpec smooth_g(GFunction g, double lambda) {
        if (!std::isfinite(lambda)) throw std::invalid_argument("KernelSpec: lambda not finite");
        KernelSpec k;
        k.variant_ = Variant::smooth_g;
        k.domain_ = Domain::half_line(0.0);
        k.g_ = g;
        k.lambda_ = lambda;
        return k;
    }

    /// User kernel/weight pair on a domain containing 0. Anchoring is
    /// spot-checked at 32 t-samples; certificate_points are x values at
    /// which the caller asserts the kernel norm integral is finite (they are
    /// exercised by verify_certificate()).
    static KernelSpec custom(std::function<double(double, double)> kappa,
                             std::function<double(double)> psi, Domain domain,
                             std::vector<double> certificate_points) {
        if (!domain.contains(0.0)) {
            throw std::invalid_argument("KernelSpec: custom domain must contain the anchor 0");
        }
        if (certificate_points.empty()) {
            throw std::invalid_argument("KernelSpec: custom kernel needs certificate points");
        }
        for (double x : certificate_points) {
            if (!domain.contains(x)) {
                throw std::invalid_argument("KernelSpec: certificate point outside domain");
            }
        }
        KernelSpec k;
        k.variant_ = Variant::custom;
        k.domain_ = domain;
        k.kappa_fn_ = std::move(kappa);
        k.psi_fn_ = std::move(psi);
        k.certificate_ = std::move(certificate_points);

        for (int i = 0; i < 32; ++i) {
            const double u = (static_cast<double>(i) + 0.5) / 32.0;
            const double t = domain.semi_infinite ? domain.a + u / (1.0 - u)
                                                  : domain.a + u * (domain.b - domain.a);
            if (std::abs(k.kappa_fn_(0.0, t)) > 1e-12) {
                throw std::invalid_argument("KernelSpec: custom kernel is not anchored at 0");
            }
        }
        return k;
    }

    Variant variant() const noexcept { return variant_; }
    const Domain& domain() const noexcept { return domain_; }

    int r() const {
        if (variant_ != Variant::poly_exp) throw std::logic_error("KernelSpec: no r");
        return r_;
    }
    double lambda() const {
        if (variant_ != Variant::poly_exp && variant_ != Variant::smooth_g) {
            throw std::logic_error("KernelSpec: no lambda");
        }
        return lambda_;
    }
    GFunction g() const {
        if (variant_ != Variant::smooth_g) throw std::logic_error("KernelSpec: no G");
        return g_;
    }
    const std::vector<double>& certificate_points() const noexcept { return certificate_; }

    /// Pointwise kernel value.
    double kappa(double x, double t) const {
        switch (variant_) {
            case Variant::anchored_step:
                return t < x ? 1.0 : 0.0;
            case Variant::poly_exp:
                if (!(t < x)) return 0.0;
                return detail::ipow0(x - t, r_ - 1) / factorial_of(r_ - 1);
            case Variant::smooth_g:
                return detail::g_value(g_, x * t);
            case Variant::custom:
                return kappa_fn_(x, t);
        }
        return 0.0;
    }

    /// Pointwise weight value, positive a.e.
    double psi(double t) const {
        switch (variant_) {
            case Variant::anchored_step:
                return 1.0;
            case Variant::poly_exp:
            case Variant::smooth_g:
                return std::exp(lambda_ * t);
            case Variant::custom:
                return psi_fn_(t);
        }
        return 1.0;
    }

private:
    KernelSpec() = default;

    Variant variant_ = Variant::anchored_step;
    Domain domain_ = Domain::finite(0.0, 1.0);
    int r_ = 1;
    double lambda_ = 0.0;
    GFunction g_ = GFunction::one_minus_exp;
    std::function<double(double, double)> kappa_fn_;
    std::function<double(double)> psi_fn_;
    std::vector<double> certificate_;
};

/// Probability density on the kernel domain.
class DensitySpec {
public:
    enum class Variant { uniform01, exponential };

    static DensitySpec uniform01() {
        DensitySpec d;
        d.variant_ = Variant::uniform01;
        return d;
    }
    static DensitySpec exponential(double mu) {
        if (!(mu > 0.0)) throw std::invalid_argument("DensitySpec: need mu > 0");
        DensitySpec d;
        d.variant_ = Variant::exponential;
        d.mu_ = mu;
        return d;
    }

    Variant variant() const noexcept { return variant_; }
    double mu() const {
        if (variant_ != Variant::exponential) throw std::logic_error("DensitySpec: no mu");
        return mu_;
    }
    Domain support() const noexcept {
        return variant_ == Variant::uniform01 ? Domain::finite(0.0, 1.0)
                                              : Domain::half_line(0.0);
    }
    double density(double x) const noexcept {
        return variant_ == Variant::uniform01 ? 1.0 : mu_ * std::exp(-mu_ * x);
    }

private:
    DensitySpec() = default;
    Variant variant_ = Variant::uniform01;
    double mu_ = 1.0;
};

struct Approximation {
    Exponent q;
};
struct Integration {};

/// Which linear problem the constant C1 is for: embedding into L_{q,omega}
/// (approximation) or the omega-weighted integral (integration).
class ProblemSpec {
public:
    ProblemSpec(KernelSpec kernel, DensitySpec density, Approximation problem, Exponent p1)
        : kernel_(std::move(kernel)), density_(density), problem_(problem), p1_(p1) {
        validate();
    }
    ProblemSpec(KernelSpec kernel, DensitySpec density, Integration problem, Exponent p1)
        : kernel_(std::move(kernel)), density_(density), problem_(problem), p1_(p1) {
        validate();
    }

    const KernelSpec& kernel() const noexcept { return kernel_; }
    const DensitySpec& density() const noexcept { return density_; }
    const Exponent& p1() const noexcept { return p1_; }
    bool is_approximation() const noexcept {
        return std::holds_alternative<Approximation>(problem_);
    }
    Exponent q() const {
        if (!is_approximation()) throw std::logic_error("ProblemSpec: integration has no q");
        return std::get<Approximation>(problem_).q;
    }

private:
    void validate() const {
        const bool kernel_half_line = kernel_.domain().semi_infinite;
        const bool density_half_line = density_.support().semi_infinite;
        if (kernel_half_line != density_half_line) {
            throw IncompatibleSpec("ProblemSpec: density support does not match kernel domain");
        }
        switch (kernel_.variant()) {
            case KernelSpec::Variant::anchored_step:
                if (density_.variant() != DensitySpec::Variant::uniform01) {
                    throw IncompatibleSpec("ProblemSpec: anchored-step kernel needs the uniform density");
                }
                break;
            case KernelSpec::Variant::poly_exp:
            case KernelSpec::Variant::smooth_g:
                if (density_.variant() != DensitySpec::Variant::exponential) {
                    throw IncompatibleSpec("ProblemSpec: half-line kernels need the exponential density");
                }
                break;
            case KernelSpec::Variant::custom:
                break;  // domain match checked above
        }
    }

    KernelSpec kernel_;
    DensitySpec density_;
    std::variant<Approximation, Integration> problem_;
    Exponent p1_;
};

namespace detail {

// Decade-sum tail test for integral_0^inf h(t) dt: the contributions of
// [10^d, 10^{d+1}] must eventually decay, else the norm integral fails the
// finiteness condition.
template <typename H>
bool tail_decays(const H& h, double from = 1.0) {
    double prev = std::numeric_limits<double>::infinity();
    double total = 0.0;
    double last = 0.0;
    double lo = from;
    for (int d = 0; d < 9; ++d) {
        const double hi = lo * 10.0;
        const Segment sum = gauss_kronrod_15(h, lo, hi);
        last = std::abs(sum.value);
        if (!std::isfinite(last)) return false;
        total += last;
        if (d >= 6 && last > 0.98 * prev && last > 1e-13 * (1.0 + total)) return false;
        prev = last;
        lo = hi;
    }
    return true;
}

}  // namespace detail

/// kappa_hat by direct numerical evaluation of its defining integral (or
/// essential supremum for p1 = 1): the quadrature route, used as the primary
/// path for smooth-G and custom kernels and as the cross-check for every
/// closed form.
inline ConstantResult kappa_hat_quadrature(const KernelSpec& kernel, Exponent p1, double x,
                                           double tol = 1e-10) {
    const Domain d = kernel.domain();
    if (!d.contains(x)) throw std::invalid_argument("kappa_hat: x outside the kernel domain");
    if (x == 0.0) return {0.0, Exactness::exact, 0.0, "anchored at 0"};

    const double inv_p1 = p1.reciprocal();
    if (p1.is_one()) {
        auto h = [&](double t) {
            const double kv = std::abs(kernel.kappa(x, t));
            if (kv <= 0.0) return 0.0;  // psi may underflow out there too
            return kv / kernel.psi(t);
        };
        const QuadratureResult sup = numeric_sup(h, d);
        if (std::isinf(sup.value)) {
            throw DivergentIntegral("kappa_hat: ess sup |kappa(x,.)|/psi is unbounded");
        }
        return {sup.value, Exactness::quadrature, sup.err_estimate, "numeric sup"};
    }

    const Exponent pstar = conjugate(p1);
    const double t_exp = pstar.value();  // finite since p1 > 1
    auto h = [&](double t) {
        const double kv = std::abs(kernel.kappa(x, t));
        if (kv <= 0.0) return 0.0;
        const double v = kv / std::pow(kernel.psi(t), inv_p1);
        return std::pow(v, t_exp);
    };
    if (d.semi_infinite && !detail::tail_decays(h)) {
        throw DivergentIntegral("kappa_hat: norm integral tail does not decay");
    }
    const QuadratureResult integral = adaptive_quadrature(h, d, tol, x);
    if (integral.value <= 0.0) return {0.0, Exactness::quadrature, integral.err_estimate, "quadrature"};
    const double value = std::pow(integral.value, 1.0 / t_exp);
    const double err = value / t_exp * (integral.err_estimate / integral.value);
    return {value, Exactness::quadrature, err, "quadrature"};
}

/// kappa_hat_{p1}(x) = ( integral_D (|kappa(x,t)|/psi(t)^{1/p1})^{p1*} dt )^{1/p1*}.
///
/// Closed forms:
///   anchored step: x^{1/p1*} exactly.
///   poly-exp, p1 = 1: piecewise max formula, exact.
///   poly-exp, p1 = inf: x^r/r! exactly (psi drops out).
///   poly-exp, r = 1, 1 < p1 < inf: exact three-case formula in lambda.
///   poly-exp, r >= 2, 1 < p1 < inf: exact for lambda = 0, upper bounds
///     otherwise (lambda > 0: power envelope; lambda < 0: exponential
///     envelope with the smaller of two tail factors).
/// Smooth-G and custom kernels go through quadrature.
inline ConstantResult kappa_hat(const KernelSpec& kernel, Exponent p1, double x,
                                double tol = 1e-10) {
    const Domain d = kernel.domain();
    if (!d.contains(x)) throw std::invalid_argument("kappa_hat: x outside the kernel domain");

    switch (kernel.variant()) {
        case KernelSpec::Variant::anchored_step: {
            if (x == 0.0) return {0.0, Exactness::exact, 0.0, "anchored at 0"};
            if (p1.is_one()) return {1.0, Exactness::exact, 0.0, "step kernel, ess sup = 1"};
            const double value = std::pow(x, conjugate(p1).reciprocal());
            return {value, Exactness::exact, 0.0, "x^{1/p1*}"};
        }
        case KernelSpec::Variant::poly_exp: {
            if (x == 0.0) return {0.0, Exactness::exact, 0.0, "anchored at 0"};
            const int r = kernel.r();
            const double lam = kernel.lambda();
            const double fact = factorial_of(r - 1);

            if (p1.is_infinite()) {
                // integral_0^x (x-t)^{r-1}/(r-1)! dt = x^r / r!
                const double value = detail::ipow0(x, r) / factorial_of(r);
                return {value, Exactness::exact, 0.0, "p1 = inf: x^r/r!"};
            }
            if (p1.is_one()) {
                if (lam >= 0.0 || x <= static_cast<double>(r - 1) / std::abs(lam)) {
                    const double value = detail::ipow0(x, r - 1) / fact;
                    return {value, Exactness::exact, 0.0, "max at t = 0: x^{r-1}/(r-1)!"};
                }
                const double al = std::abs(lam);
                const double value = detail::ipow0(static_cast<double>(r - 1), r - 1) *
                                     std::exp(al * x - static_cast<double>(r - 1)) /
                                     (detail::ipow0(al, r - 1) * fact);
                return {value, Exactness::exact, 0.0, "max at t = x - (r-1)/|lambda|"};
            }

            const double ps = conjugate(p1).value();
            if (r == 1) {
                double integral;  // integral_0^x e^{-lambda t (p1*-1)} dt
                if (lam == 0.0) {
                    integral = x;
                } else if (lam > 0.0) {
                    const double a = lam * (ps - 1.0);
                    integral = -std::expm1(-a * x) / a;
                } else {
                    const double a = std::abs(lam) * (ps - 1.0);
                    integral = std::expm1(a * x) / a;
                }
                return {std::pow(integral, 1.0 / ps), Exactness::exact, 0.0,
                        "r = 1 exact integral"};
            }
            if (lam == 0.0) {
                const double value = std::pow(x, static_cast<double>(r) - p1.reciprocal()) /
                                     (fact * std::pow((r - 1) * ps + 1.0, 1.0 / ps));
                return {value, Exactness::exact, 0.0, "lambda = 0 exact"};
            }
            if (lam > 0.0) {
                const double value = std::pow(x, static_cast<double>(r) - p1.reciprocal()) /
                                     (fact * std::pow((r - 1) * ps + 1.0, 1.0 / ps));
                return {value, Exactness::upper_bound, 0.0, "lambda > 0 power envelope"};
            }
            const double al = std::abs(lam);
            const double arm_x = x / ((r - 1) * ps + 1.0);
            const double arm_l = 1.0 / (al * (ps - 1.0));
            const double value = std::exp(al * x * p1.reciprocal()) *
                                 detail::ipow0(x, r - 1) / fact *
                                 std::pow(std::min(arm_x, arm_l), 1.0 / ps);
            return {value, Exactness::upper_bound, 0.0,
                    arm_x <= arm_l ? "lambda < 0 envelope, x/( (r-1)p1*+1 ) arm"
                                   : "lambda < 0 envelope, 1/(|lambda|(p1*-1)) arm"};
        }
        case KernelSpec::Variant::smooth_g:
        case KernelSpec::Variant::custom:
            return kappa_hat_quadrature(kernel, p1, x, tol);
    }
    throw std::logic_error("kappa_hat: unknown kernel variant");
}

/// Evaluate kappa_hat at every certificate point of a custom kernel,
/// throwing DivergentIntegral if any fails the finiteness test.
inline void verify_certificate(const KernelSpec& kernel, Exponent p1, double tol = 1e-8) {
    for (double x : kernel.certificate_points()) {
        (void)kappa_hat_quadrature(kernel, p1, x, tol);
    }
}

/// kappa_tilde by nested numerics: outer L_{q,omega} norm of the quadrature
/// kappa_hat. The cross-check route for every closed form below.
inline ConstantResult kappa_tilde_quadrature(const ProblemSpec& ps, double tol = 1e-9) {
    if (!ps.is_approximation()) {
        throw IncompatibleSpec("kappa_tilde: approximation problem required");
    }
    const Exponent q = ps.q();
    const Domain support = ps.density().support();
    const double inner_tol = tol * 0.01;

    if (q.is_infinite()) {
        auto h = [&](double x) {
            try {
                return kappa_hat_quadrature(ps.kernel(), ps.p1(), x, inner_tol).value;
            } catch (const DivergentIntegral&) {
                return std::numeric_limits<double>::infinity();
            } catch (const NoConvergence&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        const QuadratureResult sup = numeric_sup(h, support, 1024);
        if (std::isinf(sup.value)) {
            return {sup.value, Exactness::quadrature, 0.0, "numeric sup diverges"};
        }
        return {sup.value, Exactness::quadrature, sup.err_estimate + inner_tol, "numeric sup"};
    }

    const double qq = q.value();
    double max_inner_err = 0.0;
    auto kappa_hat_value = [&](double x) {
        try {
            const ConstantResult kh = kappa_hat_quadrature(ps.kernel(), ps.p1(), x, inner_tol);
            max_inner_err = std::max(max_inner_err, kh.err_estimate);
            return kh.value;
        } catch (const DivergentIntegral&) {
            return std::numeric_limits<double>::infinity();
        } catch (const NoConvergence&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    // Evaluated as exp(q ln kappa_hat + ln omega): kappa_hat can overflow
    // and omega underflow at the same x; the combined exponent stays sane.
    auto h = [&](double x) {
        const double wx = ps.density().density(x);
        if (wx <= 0.0) return 0.0;
        const double kh = kappa_hat_value(x);
        if (kh <= 0.0) return 0.0;
        return std::exp(qq * std::log(kh) + std::log(wx));
    };
    if (support.semi_infinite && !detail::tail_decays(h)) {
        return {std::numeric_limits<double>::infinity(), Exactness::quadrature, 0.0,
                "outer tail does not decay"};
    }
    const QuadratureResult outer = adaptive_quadrature(h, support, tol);
    if (outer.value <= 0.0) return {0.0, Exactness::quadrature, outer.err_estimate, "quadrature"};
    const double value = std::pow(outer.value, 1.0 / qq);
    // d(V^{1/q}) = V^{1/q-1}/q dV, plus the inner kappa_hat error entering
    // through the integrand with local exponent q.
    const double err =
        value / qq * (outer.err_estimate / outer.value) + max_inner_err * (1.0 + value);
    return {value, Exactness::quadrature, err, "nested quadrature"};
}

/// kappa_tilde_{q,p1,omega} = || kappa_hat_{p1} ||_{L_{q,omega}}, the
/// per-variable operator norm constant C1 of the approximation problem.
///
/// Closed forms (anchored step with uniform density; poly-exp with
/// exponential density, including every divergence split); smooth-G and
/// custom kernels go through nested quadrature.
inline ConstantResult kappa_tilde(const ProblemSpec& ps, double tol = 1e-9) {
    if (!ps.is_approximation()) {
        throw IncompatibleSpec("kappa_tilde: approximation problem required");
    }
    const Exponent q = ps.q();
    const Exponent p1 = ps.p1();
    constexpr double kInf = std::numeric_limits<double>::infinity();

    switch (ps.kernel().variant()) {
        case KernelSpec::Variant::anchored_step: {
            if (q.is_infinite() || p1.is_one()) {
                return {1.0, Exactness::exact, 0.0, "q = inf or p1 = 1"};
            }
            const double qq = q.value();
            const double value = std::pow(1.0 + qq / conjugate(p1).value(), -1.0 / qq);
            return {value, Exactness::exact, 0.0, "(1 + q/p1*)^{-1/q}"};
        }
        case KernelSpec::Variant::poly_exp: {
            const int r = ps.kernel().r();
            const double lam = ps.kernel().lambda();
            const double mu = ps.density().mu();
            const double lfact = log_gamma(static_cast<double>(r));  // ln (r-1)!

            if (p1.is_one()) {
                if (q.is_infinite()) {
                    if (lam >= 0.0 && r == 1) {
                        return {1.0, Exactness::exact, 0.0, "p1 = 1, q = inf, r = 1: sup = 1"};
                    }
                    return {kInf, Exactness::exact, 0.0,
                            "p1 = 1, q = inf: kappa_hat unbounded"};
                }
                const double qq = q.value();
                if (lam >= 0.0) {
                    const double value = std::exp(log_gamma((r - 1) * qq + 1.0) / qq - lfact -
                                                  (r - 1) * std::log(mu));
                    return {value, Exactness::exact, 0.0,
                            "Gamma((r-1)q+1)^{1/q} / ((r-1)! mu^{r-1})"};
                }
                if (mu + lam * qq <= 0.0) {
                    return {kInf, Exactness::exact, 0.0, "mu + lambda q <= 0"};
                }
                // Exponential-envelope tail is exact, the head is bounded by
                // the lambda >= 0 value.
                const double al = std::abs(lam);
                const double x0 = static_cast<double>(r - 1) / al;
                const double head =
                    std::exp(log_gamma((r - 1) * qq + 1.0) - qq * lfact - (r - 1) * qq * std::log(mu));
                const double tail = std::exp(qq * ((r - 1) * (x0 > 0.0 ? std::log(x0) : 0.0) - lfact) -
                                             mu * x0) *
                                    (mu / (mu + lam * qq));
                const double value = std::pow(head + tail, 1.0 / qq);
                return {value, Exactness::upper_bound, 0.0,
                        "p1 = 1, lambda < 0 envelope bound"};
            }

            if (p1.is_infinite()) {
                if (q.is_infinite()) {
                    return {kInf, Exactness::exact, 0.0, "q = inf: x^r/r! unbounded"};
                }
                const double qq = q.value();
                const double value = std::exp(log_gamma(r * qq + 1.0) / qq -
                                              log_gamma(static_cast<double>(r) + 1.0) -
                                              r * std::log(mu));
                return {value, Exactness::exact, 0.0, "Gamma(rq+1)^{1/q} / (r! mu^r)"};
            }

            // 1 < p1 < inf
            if (q.is_infinite()) {
                return {kInf, Exactness::exact, 0.0, "q = inf, p1 > 1: kappa_hat unbounded"};
            }
            const double qq = q.value();
            const double psv = conjugate(p1).value();
            if (lam >= 0.0) {
                const double rp = static_cast<double>(r) - p1.reciprocal();
                const double value =
                    std::exp(log_gamma(rp * qq + 1.0) / qq - lfact -
                             std::log((r - 1) * psv + 1.0) / psv - rp * std::log(mu));
                return {value,
                        lam == 0.0 ? Exactness::exact : Exactness::upper_bound,
                        0.0, "power envelope, Gamma((r-1/p1)q+1)^{1/q}"};
            }
            const double denom = mu + lam * qq / p1.value();
            if (denom <= 0.0) {
                return {kInf, Exactness::exact, 0.0, "mu + lambda q / p1 <= 0"};
            }
            const double al = std::abs(lam);
            const double bound_a =
                std::exp(std::log(mu) / qq + log_gamma((r - 1) * qq + 1.0) / qq - lfact -
                         std::log(al * (psv - 1.0)) / psv -
                         (static_cast<double>(r) - 1.0 + 1.0 / qq) * std::log(denom));
            const double bound_b =
                std::exp(std::log(mu) / qq + log_gamma((r - 1) * qq + qq / psv + 1.0) / qq -
                         lfact - std::log((r - 1) * psv + 1.0) / psv -
                         (static_cast<double>(r) - 1.0 + 1.0 / psv + 1.0 / qq) * std::log(denom));
            const double value = std::min(bound_a, bound_b);
            return {value, Exactness::upper_bound, 0.0,
                    bound_a <= bound_b ? "lambda < 0, exponential-tail arm"
                                       : "lambda < 0, power-tail arm"};
        }
        case KernelSpec::Variant::smooth_g:
        case KernelSpec::Variant::custom:
            return kappa_tilde_quadrature(ps, tol);
    }
    throw std::logic_error("kappa_tilde: unknown kernel variant");
}

/// kappa_bar norm by nested quadrature: inner omega-average of the kernel,
/// outer L_{p1*} norm. Cross-check route and the primary path for kernels
/// without a closed form.
inline ConstantResult kappa_bar_norm_quadrature(const ProblemSpec& ps, double tol = 1e-9) {
    if (ps.is_approximation()) {
        throw IncompatibleSpec("kappa_bar_norm: integration problem required");
    }
    const Exponent p1 = ps.p1();
    const Domain t_domain = ps.kernel().domain();
    const Domain x_domain = ps.density().support();
    const double inner_tol = tol * 0.01;
    const double inv_p1 = p1.reciprocal();

    double max_inner_err = 0.0;
    auto kbar = [&](double t) {
        auto f = [&](double x) {
            return std::abs(ps.kernel().kappa(x, t)) * ps.density().density(x);
        };
        const QuadratureResult inner = adaptive_quadrature(f, x_domain, inner_tol, t);
        max_inner_err = std::max(max_inner_err, inner.err_estimate);
        if (inner.value <= 0.0) return 0.0;  // avoid 0/0 when psi underflows too
        return inner.value / std::pow(ps.kernel().psi(t), inv_p1);
    };

    if (p1.is_one()) {
        const QuadratureResult sup = numeric_sup(kbar, t_domain, 1024);
        if (std::isinf(sup.value)) {
            return {sup.value, Exactness::quadrature, 0.0, "numeric sup diverges"};
        }
        return {sup.value, Exactness::quadrature, sup.err_estimate + max_inner_err,
                "sup of inner averages"};
    }
    const double psv = conjugate(p1).value();
    auto h = [&](double t) { return std::pow(kbar(t), psv); };
    if (t_domain.semi_infinite && !detail::tail_decays(h)) {
        return {std::numeric_limits<double>::infinity(), Exactness::quadrature, 0.0,
                "outer tail does not decay"};
    }
    const QuadratureResult outer = adaptive_quadrature(h, t_domain, tol);
    if (outer.value <= 0.0) return {0.0, Exactness::quadrature, outer.err_estimate, "quadrature"};
    const double value = std::pow(outer.value, 1.0 / psv);
    const double err =
        value / psv * (outer.err_estimate / outer.value) + max_inner_err * (1.0 + value);
    return {value, Exactness::quadrature, err, "nested quadrature"};
}

/// || kappa_bar_{p1,omega} ||_{L_{p1*}}, the per-variable constant C1 of the
/// integration problem; kappa_bar(t) = integral |kappa(x,t)|/psi(t)^{1/p1}
/// omega(x) dx.
///
/// Poly-exp with exponential density has the exact closed form
///   Gamma(r)/((r-1)! mu^{r-1}) * (1/(p1* (lambda/p1 + mu)))^{1/p1*}
/// when mu + lambda/p1 > 0 (the second factor is 1 for p1* = inf), and +inf
/// otherwise.
inline ConstantResult kappa_bar_norm(const ProblemSpec& ps, double tol = 1e-9) {
    if (ps.is_approximation()) {
        throw IncompatibleSpec("kappa_bar_norm: integration problem required");
    }
    const Exponent p1 = ps.p1();
    if (ps.kernel().variant() == KernelSpec::Variant::poly_exp) {
        const int r = ps.kernel().r();
        const double lam = ps.kernel().lambda();
        const double mu = ps.density().mu();
        const double shifted = mu + lam * p1.reciprocal();
        if (shifted <= 0.0) {
            return {std::numeric_limits<double>::infinity(), Exactness::exact, 0.0,
                    "mu + lambda/p1 <= 0"};
        }
        // Gamma(r)/((r-1)! mu^{r-1}) with Gamma(r) = (r-1)!.
        const double prefactor = std::pow(mu, -static_cast<double>(r - 1));
        if (p1.is_one()) {
            return {prefactor, Exactness::exact, 0.0,
                    "p1* = inf: sup_t e^{-(lambda+mu)t} Gamma(r)/((r-1)! mu^{r-1})"};
        }
        const double psv = conjugate(p1).value();
        const double value = prefactor * std::pow(1.0 / (psv * shifted), 1.0 / psv);
        return {value, Exactness::exact, 0.0,
                "Gamma(r)/((r-1)! mu^{r-1}) (p1*(lambda/p1+mu))^{-1/p1*}"};
    }
    return kappa_bar_norm_quadrature(ps, tol);
}

/// C1 for the given problem: kappa_tilde for approximation, the kappa_bar
/// norm for integration.
inline ConstantResult problem_constant(const ProblemSpec& ps, double tol = 1e-9) {
    return ps.is_approximation() ? kappa_tilde(ps, tol) : kappa_bar_norm(ps, tol);
}

}  // namespace truncdim
