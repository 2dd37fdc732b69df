#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "truncdim/oracles.hpp"
#include "truncdim/weights.hpp"

using namespace truncdim;

TEST_CASE("subset_sum_oracle hand counts", "[oracles]") {
    const ExplicitWeights w(2, {1.0, 1.0, 1.0, 1.0});
    // k = 0: {1}, {2}, {1,2} each contribute 1 (empty set lies within [0])
    CHECK(subset_sum_oracle(w, 1.0, 0, Exponent(1.0)) == 3.0);
    CHECK(subset_sum_oracle(w, 1.0, 2, Exponent(1.0)) == 0.0);
    CHECK_THROWS_AS(subset_sum_oracle(w, 1.0, 3, Exponent(1.0)), InvalidIndex);
}

TEST_CASE("subset_sum_oracle hand-expanded weighted sum", "[oracles]") {
    // gamma_u = prod_{j in u} 1/j, C1 = 2, k = 1, t = 2: six subsets not
    // within [1]: {2},{3},{1,2},{1,3},{2,3},{1,2,3} with (C1^{|u|} gamma_u)^2
    // = 1, 4/9, 4, 16/9, 16/36, 64/36 summing to 85/9.
    const auto w =
        ExplicitWeights::from_product(std::vector<double>{1.0, 0.5, 1.0 / 3.0});
    const double got = subset_sum_oracle(w, 2.0, 1, Exponent(2.0));
    CHECK_THAT(got, Catch::Matchers::WithinRel(85.0 / 9.0, 1e-14));
    // sup semantics
    CHECK_THAT(subset_sum_oracle(w, 2.0, 1, Exponent::infinity()),
               Catch::Matchers::WithinRel(2.0, 1e-14));  // {1,2}: 4 * 1/2
}

TEST_CASE("subset sum over all subsets telescopes to the factor product", "[oracles]") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> c1d(0.0, 2.0);
    const double ts[] = {1.0, 2.0, 4.0};
    for (int trial = 0; trial < 200; ++trial) {
        const int s = 1 + static_cast<int>(rng() % 15);
        std::vector<double> g(static_cast<std::size_t>(s));
        for (auto& x : g) x = std::nextafter(unit(rng), 1.0);  // (0, 1]
        const double c1 = std::nextafter(c1d(rng), 2.0);
        const double t = ts[rng() % 3];
        const auto w = ExplicitWeights::from_product(g);
        // k = 0 excludes only the empty set, whose term is 1
        const double lhs = 1.0 + subset_sum_oracle(w, c1, 0, Exponent(t));
        double rhs = 1.0;
        for (double x : g) rhs *= 1.0 + std::pow(c1 * x, t);
        CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-12));
    }
}

TEST_CASE("corner_norm_oracle hand values", "[oracles]") {
    const ExplicitWeights w1(1, {1.0, 0.45});
    CHECK_THAT(corner_norm_oracle(w1, 2.0, Exponent(1.0), Exponent(1.0)),
               Catch::Matchers::WithinRel(1.0 + 0.45 * 2.0, 1e-14));
    CHECK(corner_norm_oracle(w1, 0.0, Exponent(1.0), Exponent::infinity()) == 1.0);

    // s = 2 uniform product weights coincide with the product closed form
    const auto w2 = ExplicitWeights::from_product(std::vector<double>{0.6, 0.6});
    const double expect = (1.0 + 0.6 * 1.3) * (1.0 + 0.6 * 1.3);
    for (const auto& p1 : {Exponent(1.0), Exponent::infinity()}) {
        for (const auto& p2 : {Exponent(1.0), Exponent::infinity()}) {
            CHECK_THAT(corner_norm_oracle(w2, 1.3, p1, p2),
                       Catch::Matchers::WithinRel(expect, 1e-13));
        }
    }
    CHECK_THROWS_AS(corner_norm_oracle(w2, 1.0, Exponent(2.0), Exponent(1.0)),
                    std::invalid_argument);
}
