#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "truncdim/exponent.hpp"
#include "truncdim/series.hpp"
#include "truncdim/weights.hpp"

using namespace truncdim;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("conjugate exponent basics", "[core]") {
    CHECK(conjugate(Exponent(1.0)).is_infinite());
    CHECK(conjugate(Exponent::infinity()).value() == 1.0);
    CHECK(conjugate(Exponent(2.0)).value() == 2.0);
    // 1/(4/3) + 1/4 = 3/4 + 1/4 = 1
    CHECK_THAT(conjugate(Exponent(4.0 / 3.0)).value(),
               Catch::Matchers::WithinRel(4.0, 1e-15));
    CHECK_THROWS_AS(Exponent(0.5), std::invalid_argument);
    CHECK_THROWS_AS(Exponent(std::nan("")), std::invalid_argument);
}

TEST_CASE("conjugate is an involution on a grid", "[core]") {
    // 100 exponents from 1 to inf. The round trip through p* = 1 + 1/(p-1)
    // stores the reciprocal next to 1, so the recoverable precision scales
    // like p ulps; the tolerance reflects that, and is exact at 1 and inf.
    std::vector<Exponent> grid;
    grid.push_back(Exponent(1.0));
    for (int i = 1; i < 99; ++i) {
        grid.push_back(Exponent(1.0 + 0.1 * i * i));
    }
    grid.push_back(Exponent::infinity());
    for (const auto& p : grid) {
        const Exponent back = conjugate(conjugate(p));
        if (p.is_infinite()) {
            CHECK(back.is_infinite());
        } else if (p.value() == 1.0) {
            CHECK(back.value() == 1.0);
        } else {
            const double ulp_scale =
                std::max(1.0, p.value()) * std::numeric_limits<double>::epsilon();
            CHECK_THAT(back.value(),
                       Catch::Matchers::WithinRel(p.value(), 4.0 * ulp_scale));
        }
    }
}

TEST_CASE("product weights rules and invariants", "[core]") {
    const auto poly = ProductWeights::polynomial(2.0);
    CHECK(poly.infinite_dimension());
    CHECK(poly.gamma(1) == 1.0);
    CHECK(poly.gamma(10) == 0.01);
    CHECK(poly.gamma(100) == 1e-4);  // exact: reciprocal of an exact integer power
    CHECK(poly.monotone());

    const auto seq = ProductWeights::sequence({1.0, 0.5, 0.25});
    CHECK(seq.dimension() == 3);
    CHECK(seq.monotone());
    CHECK_FALSE(ProductWeights::sequence({0.5, 1.0}).monotone());
    CHECK_THROWS_AS(ProductWeights::sequence({1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(ProductWeights::polynomial(0.0), std::invalid_argument);
    CHECK_THROWS_AS(seq.gamma(4), InvalidIndex);
}

TEST_CASE("explicit weights validation", "[core]") {
    // gamma_u > 0 must be downward closed
    CHECK_THROWS_AS(ExplicitWeights(2, {1.0, 0.0, 1.0, 0.5}), std::invalid_argument);
    CHECK_NOTHROW(ExplicitWeights(2, {1.0, 1.0, 0.5, 0.0}));
    CHECK_THROWS_AS(ExplicitWeights(2, {0.0, 1.0, 0.5, 0.1}), std::invalid_argument);

    const auto w = ExplicitWeights::from_product(std::vector<double>{1.0, 0.5});
    CHECK(w.gamma(0b00) == 1.0);
    CHECK(w.gamma(0b01) == 1.0);
    CHECK(w.gamma(0b10) == 0.5);
    CHECK(w.gamma(0b11) == 0.5);
}

TEST_CASE("tail_power_sum against independent zeta(4)", "[core]") {
    // gamma_j = j^-2, t = 2: sum j^-4 = pi^4/90, computed here from scratch
    const double pi = 3.14159265358979323846264338327950288;
    const double zeta4 = pi * pi * pi * pi / 90.0;
    const auto w = ProductWeights::polynomial(2.0);
    const double got = tail_power_sum(w, 0, 2.0, 1e-13);
    CHECK_THAT(got, Catch::Matchers::WithinAbs(zeta4, 1e-13));
}

TEST_CASE("tail_power_sum finite cases", "[core]") {
    const auto w = ProductWeights::polynomial(2.0, 6);
    CHECK(tail_power_sum(w, 6, 2.0, 1e-13) == 0.0);  // empty sum at k = s
    CHECK_THROWS_AS(tail_power_sum(w, 7, 2.0, 1e-13), InvalidIndex);

    // plain summation comparison, t = 1
    double direct = 0.0;
    for (int j = 1; j <= 6; ++j) direct += 1.0 / (static_cast<double>(j) * j);
    CHECK_THAT(tail_power_sum(w, 0, 1.0, 1e-13), Catch::Matchers::WithinAbs(direct, 1e-12));

    const auto seq = ProductWeights::sequence({0.9, 0.7, 0.2});
    double naive = std::pow(0.7, 1.5) + std::pow(0.2, 1.5);
    CHECK_THAT(tail_power_sum(seq, 1, 1.5, 1e-13), Catch::Matchers::WithinAbs(naive, 1e-12));
}

TEST_CASE("tail_power_sum telescoping and monotonicity", "[core]") {
    const auto w = ProductWeights::polynomial(1.5);
    const double t = 2.0;
    double prev = tail_power_sum(w, 0, t, 1e-12);
    for (std::uint64_t k = 0; k < 12; ++k) {
        const double at_k = tail_power_sum(w, k, t, 1e-12);
        const double at_k1 = tail_power_sum(w, k + 1, t, 1e-12);
        CHECK(at_k1 <= at_k);
        CHECK_THAT(at_k - at_k1,
                   Catch::Matchers::WithinAbs(std::pow(w.gamma(k + 1), t), 1e-11));
        CHECK(at_k <= prev);
        prev = at_k;
    }
}

TEST_CASE("tail_power_sum divergence", "[core]") {
    const auto w = ProductWeights::polynomial(0.5);
    CHECK_THROWS_AS(tail_power_sum(w, 0, 2.0, 1e-13), DivergentTail);  // alpha t = 1
    CHECK_NOTHROW(tail_power_sum(w, 0, 2.5, 1e-10));
}

TEST_CASE("log_one_plus_product values", "[core]") {
    const auto w = ProductWeights::polynomial(2.0);
    // frozen from direct summation of ln(1+j^-4) with rigorous tail control
    CHECK_THAT(log_one_plus_product(w, 1.0, 2.0, 1e-13),
               Catch::Matchers::WithinAbs(0.77351012582068795, 1e-12));
    CHECK(log_one_plus_product(w, 0.0, 2.0, 1e-13) == 0.0);

    const auto one = ProductWeights::sequence({1.0});
    CHECK_THAT(log_one_plus_product(one, 1.0, 2.0, 1e-13),
               Catch::Matchers::WithinAbs(std::log(2.0), 1e-14));
}

TEST_CASE("log_one_plus_product is nondecreasing in c and matches naive sums", "[core]") {
    const auto w = ProductWeights::sequence({0.8, 0.5, 0.31, 0.12});
    double prev = 0.0;
    for (double c : {0.0, 0.3, 0.9, 1.7, 4.0}) {
        const double v = log_one_plus_product(w, c, 2.0, 1e-13);
        CHECK(v >= prev);
        prev = v;
        double naive = 0.0;
        for (int j = 1; j <= 4; ++j) naive += std::log1p(std::pow(c * w.gamma(j), 2.0));
        CHECK_THAT(v, Catch::Matchers::WithinAbs(naive, 1e-12));
    }
}

TEST_CASE("bracket interfaces enclose the midpoint result", "[core]") {
    const auto w = ProductWeights::polynomial(2.0);
    for (double tol : {1e-8, 1e-10, 1e-13}) {
        const Bracket b = tail_power_sum_bracket(w, 3, 2.0, tol);
        CHECK(b.hi - b.lo <= tol * 1.0001);
        CHECK(b.lo <= b.mid());
        CHECK(b.mid() <= b.hi);
        const Bracket l = log_one_plus_product_bracket(w, 1.3, 2.0, tol);
        CHECK(l.hi - l.lo <= tol * 1.0001);
    }
    // tighter tolerances only shrink the enclosure
    const double wide = tail_power_sum(w, 2, 2.0, 1e-6);
    const double tight = tail_power_sum(w, 2, 2.0, 1e-14);
    CHECK(rel_diff(wide, tight) < 1e-5);
}
