#include "gscol/vie.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

using namespace gscol;

namespace {

VieProblem manufactured_exp() {
    // y(t) = 1 + int_0^t y(s) ds has solution y = e^t
    VieProblem p;
    p.forcing = [](double) { return 1.0; };
    p.kernel = [](double, double) { return 1.0; };
    p.T = 1.0;
    return p;
}

double dense_sup_error(const CollocationSolution& sol, double (*exact)(double)) {
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double t = sol.T * i / 2000.0;
        sup = std::max(sup, std::abs(eval(sol, t) - exact(t)));
    }
    return sup;
}

}  // namespace

TEST_CASE("Lagrange basis is cardinal and sums to one", "[vie][lagrange]") {
    std::vector<double> nodes = {1.0 / 3.0, 2.0 / 3.0, 1.0};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto L = lagrange_basis(nodes, nodes[i]);
        for (std::size_t j = 0; j < nodes.size(); ++j)
            REQUIRE_THAT(L[j], Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-14));
    }
    for (double theta : {-0.3, 0.0, 0.1, 0.5, 0.77, 1.0, 1.4}) {
        auto L = lagrange_basis(nodes, theta);
        double s = 0.0;
        for (double v : L) s += v;
        REQUIRE_THAT(s, Catch::Matchers::WithinAbs(1.0, 1e-13));
    }
}

TEST_CASE("Lagrange basis handles small and degenerate node sets", "[vie][lagrange]") {
    REQUIRE(lagrange_basis({0.5}, 0.123) == std::vector<double>{1.0});
    // L_1 for nodes {1/3, 2/3} at 0 extrapolates to 2
    auto L = lagrange_basis({1.0 / 3.0, 2.0 / 3.0}, 0.0);
    REQUIRE_THAT(L[0], Catch::Matchers::WithinAbs(2.0, 1e-14));
    REQUIRE_THAT(L[1], Catch::Matchers::WithinAbs(-1.0, 1e-14));

    REQUIRE_THROWS_AS(lagrange_basis({}, 0.0), ConfigError);
    REQUIRE_THROWS_AS(lagrange_basis({0.4, 0.4}, 0.0), ConfigError);
}

TEST_CASE("Collocation config validation", "[vie]") {
    VieProblem p = manufactured_exp();
    const GaussRule& rule = gauss_rule(8);
    auto solve = [&](CollocationConfig cfg) { return solve_vie(p, cfg, rule); };

    REQUIRE_THROWS_AS(solve({2, {0.0, 0.5}, 8}), ConfigError);       // c1 = 0
    REQUIRE_THROWS_AS(solve({2, {0.6, 0.4}, 8}), ConfigError);       // not increasing
    REQUIRE_THROWS_AS(solve({2, {0.5, 1.1}, 8}), ConfigError);       // beyond 1
    REQUIRE_THROWS_AS(solve({2, {0.5}, 8}), ConfigError);            // size mismatch
    REQUIRE_THROWS_AS(solve({0, {}, 8}), ConfigError);
    REQUIRE_THROWS_AS(solve({2, {1.0 / 3.0, 2.0 / 3.0}, 0}), ConfigError);
}

TEST_CASE("Block matrices for unit kernel match hand integrals", "[vie]") {
    VieProblem p = manufactured_exp();
    CollocationConfig cfg{2, {1.0 / 3.0, 2.0 / 3.0}, 4};
    auto B = build_block_matrices(p, cfg, gauss_rule(8), 2);

    REQUIRE(B.lag.size() == 2);
    // full-panel entries are int_0^1 L_j = 1/2 each
    for (const auto& mat : B.lag)
        for (double v : mat) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(0.5, 1e-14));
    // diagonal: int_0^{1/3} L_j and int_0^{2/3} L_j
    REQUIRE_THAT(B.diag[0], Catch::Matchers::WithinAbs(0.5, 1e-14));          // int_0^{1/3} (2-3s)
    REQUIRE_THAT(B.diag[1], Catch::Matchers::WithinAbs(-1.0 / 6.0, 1e-14));   // int_0^{1/3} (3s-1)
    REQUIRE_THAT(B.diag[2], Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-14));    // int_0^{2/3} (2-3s)
    REQUIRE_THAT(B.diag[3], Catch::Matchers::WithinAbs(0.0, 1e-14));          // int_0^{2/3} (3s-1)

    auto Z = build_block_matrices({p.forcing, [](double, double) { return 0.0; }, 1.0}, cfg,
                                  gauss_rule(8), 2);
    for (const auto& mat : Z.lag)
        for (double v : mat) REQUIRE(v == 0.0);
    for (double v : Z.diag) REQUIRE(v == 0.0);

    REQUIRE_THROWS_AS(build_block_matrices(p, cfg, gauss_rule(8), 4), ConfigError);
    REQUIRE_THROWS_AS(build_block_matrices(p, cfg, gauss_rule(8), -1), ConfigError);
}

TEST_CASE("Zero kernel reduces to interpolation of the forcing", "[vie]") {
    VieProblem p;
    p.forcing = [](double t) { return std::sin(t); };
    p.kernel = [](double, double) { return 0.0; };
    p.T = 2.0;
    CollocationConfig cfg{3, {1.0 / 3.0, 2.0 / 3.0, 1.0}, 10};
    auto sol = solve_vie(p, cfg);
    double h = sol.h();
    for (int n = 0; n < cfg.N; ++n)
        for (int j = 0; j < cfg.m; ++j) {
            double t = (n + cfg.params[j]) * h;
            REQUIRE_THAT(sol.coeffs[n * cfg.m + j],
                         Catch::Matchers::WithinAbs(std::sin(t), 1e-15));
        }
}

TEST_CASE("Manufactured exponential solution converges at order m", "[vie][order]") {
    VieProblem p = manufactured_exp();
    auto exact = [](double t) { return std::exp(t); };

    for (int m : {2, 3}) {
        std::vector<double> params =
            m == 2 ? std::vector<double>{1.0 / 3.0, 2.0 / 3.0}
                   : std::vector<double>{1.0 / 3.0, 2.0 / 3.0, 1.0};
        double prev = 0.0;
        for (int step = 0; step < 4; ++step) {
            int N = 8 << step;
            auto sol = solve_vie(p, {m, params, N});
            double err = dense_sup_error(sol, exact);
            if (step > 0) {
                double order = std::log2(prev / err);
                REQUIRE(order > m - 0.25);
                REQUIRE(order < m + 0.25);
            }
            prev = err;
        }
    }
}

TEST_CASE("eval covers the closed interval and rejects outside points", "[vie]") {
    auto sol = solve_vie(manufactured_exp(), {2, {1.0 / 3.0, 2.0 / 3.0}, 16});
    REQUIRE_NOTHROW(eval(sol, 0.0));
    REQUIRE_NOTHROW(eval(sol, 1.0));
    // theta = 1 extrapolates past the (1/3, 2/3) nodes, so the constant is looser
    REQUIRE_THAT(eval(sol, 1.0), Catch::Matchers::WithinAbs(std::exp(1.0), 5e-3));
    REQUIRE_THROWS_AS(eval(sol, -1e-9), std::domain_error);
    REQUIRE_THROWS_AS(eval(sol, 1.0 + 1e-9), std::domain_error);

    // collocation points reproduce stored coefficients through the cardinal basis
    double h = sol.h();
    REQUIRE(eval(sol, (3 + 1.0 / 3.0) * h) == sol.coeffs[3 * 2 + 0]);
}

TEST_CASE("Residuals vanish at collocation points and detect perturbations", "[vie]") {
    VieProblem p = manufactured_exp();
    CollocationConfig cfg{2, {1.0 / 3.0, 2.0 / 3.0}, 16};
    const GaussRule& rule = gauss_rule(8);
    auto sol = solve_vie(p, cfg, rule);

    double worst = 0.0;
    for (int n = 0; n < cfg.N; ++n)
        for (int i = 0; i < cfg.m; ++i)
            worst = std::max(worst, std::abs(residual(p, sol, rule, n, i)));
    REQUIRE(worst <= 1e-12);

    auto bent = sol;
    bent.coeffs[5 * 2 + 1] += 1e-3;
    REQUIRE(std::abs(residual(p, bent, rule, 5, 1)) > 1e-4);
}

TEST_CASE("Neumann step-size guard triggers on coarse meshes", "[vie]") {
    VieProblem p;
    p.forcing = [](double) { return 1.0; };
    p.kernel = [](double, double) { return 10.0; };
    p.T = 1.0;
    CollocationConfig coarse{2, {1.0 / 3.0, 2.0 / 3.0}, 1};
    REQUIRE_THROWS_AS(solve_vie(p, coarse), StepSizeError);
    CollocationConfig fine{2, {1.0 / 3.0, 2.0 / 3.0}, 64};
    REQUIRE_NOTHROW(solve_vie(p, fine));
}

TEST_CASE("Repeated solves are bitwise identical", "[vie][determinism]") {
    VieProblem p;
    p.forcing = [](double t) { return 1.0 + 0.1 * std::cos(t); };
    p.kernel = [](double t, double s) { return 0.3 * std::exp(-(t - s)); };
    p.T = 4.0;
    CollocationConfig cfg{3, {1.0 / 3.0, 2.0 / 3.0, 1.0}, 64};
    auto a = solve_vie(p, cfg);
    auto b = solve_vie(p, cfg);
    REQUIRE(a.coeffs.size() == b.coeffs.size());
    REQUIRE(std::memcmp(a.coeffs.data(), b.coeffs.data(),
                        a.coeffs.size() * sizeof(double)) == 0);
}
