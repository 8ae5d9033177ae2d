#include "gscol/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using gscol::gauss_rule;
using gscol::integrate;
using gscol::integrate_semi_infinite;

namespace {

// int_0^1 x^k dx
double monomial_integral(int k) { return 1.0 / (k + 1); }

}  // namespace

TEST_CASE("Gauss-Legendre rules satisfy structural invariants", "[quadrature]") {
    for (int q = 1; q <= 16; ++q) {
        const auto& rule = gauss_rule(q);
        REQUIRE(rule.q == q);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(q));
        REQUIRE(rule.weights.size() == static_cast<std::size_t>(q));

        double wsum = 0.0;
        for (int i = 0; i < q; ++i) {
            REQUIRE(rule.nodes[i] > -1.0);
            REQUIRE(rule.nodes[i] < 1.0);
            if (i > 0) REQUIRE(rule.nodes[i] > rule.nodes[i - 1]);
            REQUIRE(rule.weights[i] > 0.0);
            wsum += rule.weights[i];
        }
        REQUIRE_THAT(wsum, Catch::Matchers::WithinAbs(2.0, 1e-14));

        // exact mirror symmetry, including the shared weights
        for (int i = 0; i < q; ++i) {
            REQUIRE(rule.nodes[i] == -rule.nodes[q - 1 - i]);
            REQUIRE(rule.weights[i] == rule.weights[q - 1 - i]);
        }
        if (q % 2 == 1) REQUIRE(rule.nodes[q / 2] == 0.0);
    }
}

TEST_CASE("Known low-order nodes", "[quadrature]") {
    REQUIRE(gauss_rule(1).nodes[0] == 0.0);
    REQUIRE_THAT(gauss_rule(1).weights[0], Catch::Matchers::WithinAbs(2.0, 1e-15));
    REQUIRE_THAT(gauss_rule(2).nodes[1],
                 Catch::Matchers::WithinAbs(0.57735026918962576, 1e-15));
    REQUIRE_THAT(gauss_rule(3).weights[1],
                 Catch::Matchers::WithinAbs(8.0 / 9.0, 1e-15));
}

TEST_CASE("q-point rule integrates polynomials of degree 2q-1 exactly", "[quadrature]") {
    for (int q = 1; q <= 10; ++q) {
        const auto& rule = gauss_rule(q);
        for (int k = 0; k <= 2 * q - 1; ++k) {
            double got = integrate(rule, [k](double x) { return std::pow(x, k); }, 0.0, 1.0);
            REQUIRE_THAT(got, Catch::Matchers::WithinAbs(monomial_integral(k), 1e-14));
        }
    }
}

TEST_CASE("integrate handles interval edge cases", "[quadrature]") {
    const auto& rule = gauss_rule(8);
    auto f = [](double x) { return std::exp(x); };

    REQUIRE(integrate(rule, f, 2.0, 2.0) == 0.0);
    double fwd = integrate(rule, f, 0.0, 1.0);
    REQUIRE_THAT(fwd, Catch::Matchers::WithinAbs(std::exp(1.0) - 1.0, 1e-13));
    REQUIRE_THAT(integrate(rule, f, 1.0, 0.0), Catch::Matchers::WithinAbs(-fwd, 0.0));

    int calls = 0;
    integrate(rule, [&](double) { ++calls; return 1.0; }, 3.0, 3.0);
    REQUIRE(calls == 0);
}

TEST_CASE("Semi-infinite integration of decaying integrands", "[quadrature]") {
    const auto& rule = gauss_rule(16);

    REQUIRE_THAT(integrate_semi_infinite(rule, [](double x) { return std::exp(-x); }, 0.0),
                 Catch::Matchers::WithinRel(1.0, 1e-13));
    REQUIRE_THAT(integrate_semi_infinite(rule, [](double x) { return x * std::exp(-x); }, 0.0),
                 Catch::Matchers::WithinRel(1.0, 1e-13));
    REQUIRE_THAT(integrate_semi_infinite(rule, [](double x) { return std::exp(-x * x); }, 0.0),
                 Catch::Matchers::WithinRel(std::sqrt(std::acos(-1.0)) / 2.0, 1e-13));
    // shifted lower limit: int_2^inf e^{-x} = e^{-2}
    REQUIRE_THAT(integrate_semi_infinite(rule, [](double x) { return std::exp(-x); }, 2.0),
                 Catch::Matchers::WithinRel(std::exp(-2.0), 1e-13));
}

TEST_CASE("Semi-infinite integration rejects non-integrable tails", "[quadrature]") {
    const auto& rule = gauss_rule(16);
    REQUIRE_THROWS_AS(
        integrate_semi_infinite(rule, [](double x) { return 1.0 / (1.0 + x); }, 0.0),
        gscol::ConvergenceError);
}

TEST_CASE("gauss_rule validates its order", "[quadrature]") {
    REQUIRE_THROWS_AS(gauss_rule(0), gscol::ConfigError);
    REQUIRE_THROWS_AS(gauss_rule(-3), gscol::ConfigError);
    REQUIRE_THROWS_AS(gauss_rule(65), gscol::ConfigError);
    REQUIRE_NOTHROW(gauss_rule(64));
}
