#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "truncdim/embeddings.hpp"
#include "truncdim/oracles.hpp"

using namespace truncdim;

namespace {

const Exponent kOne(1.0);
const Exponent kInfE = Exponent::infinity();

}  // namespace

TEST_CASE("corner norm product closed form", "[embeddings]") {
    const auto w = ProductWeights::polynomial(2.0, 3);
    const auto r = corner_norm(w, 1.0, kOne, kOne);
    CHECK_THAT(r.value, Catch::Matchers::WithinRel(25.0 / 9.0, 1e-14));
    CHECK(r.exactness == Exactness::exact);
    CHECK(r.corner.has_value());

    // M = 0 collapses every cross term
    CHECK(corner_norm(w, 0.0, kOne, kInfE).value == 1.0);
    const auto we = ExplicitWeights::from_product(std::vector<double>{0.3, 0.2});
    CHECK(corner_norm(we, 0.0, kInfE, kOne).value == 1.0);

    CHECK_THROWS_AS(corner_norm(w, 1.0, Exponent(2.0), kOne), std::invalid_argument);
    CHECK_THROWS_AS(corner_norm(w, -1.0, kOne, kOne), std::invalid_argument);
}

TEST_CASE("corner norm product form matches explicit enumeration", "[embeddings]") {
    const std::vector<double> g = {1.0, 0.25, 1.0 / 9.0};
    const auto wp = ProductWeights::sequence(g);
    const auto we = ExplicitWeights::from_product(g);
    for (const auto& p1 : {kOne, kInfE}) {
        for (const auto& p2 : {kOne, kInfE}) {
            const double prod = corner_norm(wp, 1.0, p1, p2).value;
            const double expl = corner_norm(we, 1.0, p1, p2).value;
            CHECK_THAT(prod, Catch::Matchers::WithinRel(expl, 1e-13));
            CHECK_THAT(prod, Catch::Matchers::WithinRel(25.0 / 9.0, 1e-13));
        }
    }
}

TEST_CASE("all four corners at s = 1 give 1 + g m", "[embeddings]") {
    const double gval = 0.37;
    const double m = 1.21;
    const auto we = ExplicitWeights(1, {1.0, gval});
    for (const auto& p1 : {kOne, kInfE}) {
        for (const auto& p2 : {kOne, kInfE}) {
            CHECK_THAT(corner_norm(we, m, p1, p2).value,
                       Catch::Matchers::WithinRel(1.0 + gval * m, 1e-14));
            CHECK_THAT(corner_norm_oracle(we, m, p1, p2),
                       Catch::Matchers::WithinRel(1.0 + gval * m, 1e-14));
        }
    }
}

TEST_CASE("corner norm random cross-validation against the oracle", "[embeddings]") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    std::uniform_real_distribution<double> mm(0.0, 2.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int s = 1 + static_cast<int>(rng() % 7);
        std::vector<double> table(std::size_t{1} << s);
        for (auto& x : table) x = unit(rng);
        table[0] = 1.0;
        const ExplicitWeights w(s, std::move(table));
        const double m = mm(rng);
        for (const auto& p1 : {kOne, kInfE}) {
            for (const auto& p2 : {kOne, kInfE}) {
                const double a = corner_norm(w, m, p1, p2).value;
                const double b = corner_norm_oracle(w, m, p1, p2);
                CHECK_THAT(a, Catch::Matchers::WithinRel(b, 1e-13));
                CHECK(a >= 1.0);  // the v = u / v = empty term alone is 1
            }
        }
    }
}

TEST_CASE("embedding norms are at least 1", "[embeddings]") {
    // the identity components witness norm >= 1; the product form makes it
    // explicit since every factor is 1 + gamma_j M >= 1
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> unit(0.001, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> g(1 + rng() % 6);
        for (auto& x : g) x = unit(rng);
        const auto w = ProductWeights::sequence(g);
        const double m = unit(rng) * 2.0;
        CHECK(corner_norm(w, m, kOne, kOne).value >= 1.0);
        CHECK(interpolated_bound(w, Exponent(1.0 + 3.0 * unit(rng)), Exponent(2.0), m,
                                 m * 1.5)
                  .value >= 1.0);
    }
}

TEST_CASE("corner norm monotone in M and in each weight", "[embeddings]") {
    const std::vector<double> g = {0.8, 0.4, 0.2};
    const auto w = ExplicitWeights::from_product(g);
    double prev = 0.0;
    for (double m : {0.0, 0.3, 0.9, 1.7}) {
        const double v = corner_norm(w, m, kOne, kOne).value;
        CHECK(v >= prev);
        prev = v;
    }
    auto bumped = g;
    bumped[1] *= 1.5;
    const auto wb = ExplicitWeights::from_product(bumped);
    CHECK(corner_norm(wb, 1.0, kOne, kOne).value >= corner_norm(w, 1.0, kOne, kOne).value);
}

TEST_CASE("infinite-dimensional product corner norm", "[embeddings]") {
    const auto w = ProductWeights::polynomial(2.0);  // sum gamma_j = pi^2/6 < inf
    const double full = corner_norm(w, 1.0, kOne, kOne).value;
    CHECK(std::isfinite(full));
    double prev = 0.0;
    for (std::uint64_t s : {2, 5, 10, 40, 400}) {
        std::vector<double> g;
        for (std::uint64_t j = 1; j <= s; ++j) g.push_back(w.gamma(j));
        const double partial = corner_norm(ProductWeights::sequence(g), 1.0, kOne, kOne).value;
        CHECK(partial >= prev);
        CHECK(partial <= full + 1e-12);
        prev = partial;
    }
    // remaining tail factor at s = 400 is below exp(1/400)
    CHECK(full - prev < 1e-2);

    // non-summable weights: the product diverges
    const auto bad = ProductWeights::polynomial(0.9);
    CHECK_THROWS_AS(corner_norm(bad, 1.0, kOne, kOne), DivergentProduct);
}

TEST_CASE("interpolated bound product formula", "[embeddings]") {
    // p1 = 2, s = 1, gamma = 1, M1 = 1, Minf = 3: sqrt(2) * sqrt(4) = 2 sqrt(2)
    const auto w = ProductWeights::sequence({1.0});
    const auto r = interpolated_bound(w, Exponent(2.0), Exponent(2.0), 1.0, 3.0);
    CHECK_THAT(r.value, Catch::Matchers::WithinRel(2.0 * std::sqrt(2.0), 1e-14));
    CHECK(r.exactness == Exactness::upper_bound);
}

TEST_CASE("interpolated bound degenerates to corners", "[embeddings]") {
    const std::vector<double> g = {0.9, 0.5, 0.25, 0.1};
    const auto wp = ProductWeights::sequence(g);
    const auto we = ExplicitWeights::from_product(g);
    const double m1 = 0.8, minf = 2.3;

    CHECK_THAT(interpolated_bound(wp, kOne, kOne, m1, minf).value,
               Catch::Matchers::WithinRel(corner_norm(wp, m1, kOne, kOne).value, 1e-12));
    CHECK_THAT(interpolated_bound(wp, kInfE, kInfE, m1, minf).value,
               Catch::Matchers::WithinRel(corner_norm(wp, minf, kInfE, kInfE).value, 1e-12));
    CHECK_THAT(interpolated_bound(we, kOne, kOne, m1, minf).value,
               Catch::Matchers::WithinRel(corner_norm(we, m1, kOne, kOne).value, 1e-12));
    CHECK_THAT(interpolated_bound(we, kInfE, kInfE, m1, minf).value,
               Catch::Matchers::WithinRel(corner_norm(we, minf, kInfE, kInfE).value, 1e-12));
}

TEST_CASE("interpolated bound explicit path uses both orderings", "[embeddings]") {
    const std::vector<double> g = {0.9, 0.5};
    const auto we = ExplicitWeights::from_product(g);
    // p1 <= p2 and p2 < p1 variants both finite and at least 1
    const auto a = interpolated_bound(we, Exponent(1.5), Exponent(3.0), 1.0, 2.0);
    const auto b = interpolated_bound(we, Exponent(3.0), Exponent(1.5), 1.0, 2.0);
    CHECK(a.value >= 1.0);
    CHECK(b.value >= 1.0);
    CHECK(std::isfinite(a.value));
    CHECK(std::isfinite(b.value));
}
