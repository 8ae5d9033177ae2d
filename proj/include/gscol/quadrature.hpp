#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <vector>

#include "gscol/errors.hpp"

namespace gscol {

// Gauss-Legendre rule on (-1, 1). Nodes ascending and symmetric about 0,
// weights positive and summing to 2. Value type; safe to share once built.
struct GaussRule {
    int q = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// P_q(x) and P_q'(x) by the three-term recurrence.
inline std::pair<double, double> legendre_pd(int q, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    double dp = (q == 1) ? 1.0 : q * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

inline GaussRule make_gauss_rule(int q) {
    GaussRule rule;
    rule.q = q;
    rule.nodes.assign(q, 0.0);
    rule.weights.assign(q, 0.0);
    // Newton from the Chebyshev-like initial guess; roots found for the upper
    // half and mirrored so symmetry holds exactly.
    for (int i = 0; i < (q + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            auto [p, dp] = legendre_pd(q, x);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                converged = true;
                break;
            }
        }
        if (!converged) throw ConvergenceError("gauss_rule: Newton iteration did not converge");
        auto [p, dp] = legendre_pd(q, x);
        (void)p;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        int j = q - 1 - i;
        rule.nodes[j] = x;
        rule.weights[j] = w;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
    }
    if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
    return rule;
}

} // namespace detail

inline constexpr int kMaxGaussOrder = 64;

// Rule of order q (exact for polynomials of degree <= 2q-1). Cached per q.
inline const GaussRule& gauss_rule(int q) {
    if (q < 1 || q > kMaxGaussOrder) throw ConfigError("gauss_rule: order must be in [1, 64]");
    static std::array<GaussRule, kMaxGaussOrder + 1> cache;
    static std::array<std::once_flag, kMaxGaussOrder + 1> built;
    std::call_once(built[q], [q] { cache[q] = detail::make_gauss_rule(q); });
    return cache[q];
}

// Integral of f over [a, b]; a == b returns 0 without evaluating f,
// a > b returns the negated integral over [b, a].
template <class F>
double integrate(const GaussRule& rule, F&& f, double a, double b) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(rule, f, b, a);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < rule.q; ++k) acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * acc;
}

// Integral of f over [a, infinity) for integrands with eventual decay.
// Composite panels [a, a+1], [a+1, a+2], [a+2, a+4], ... with doubling width;
// stops once the last panel contributes less than rel_tol of the running
// total. Panels are capped at offset `cap` past a.
template <class F>
double integrate_semi_infinite(const GaussRule& rule, F&& f, double a, double rel_tol = 1e-13,
                               double cap = 1e4) {
    double total = 0.0;
    double lo = 0.0, hi = 1.0;
    while (true) {
        double panel = integrate(rule, f, a + lo, a + hi);
        total += panel;
        if (std::abs(panel) < rel_tol * std::max(std::abs(total), 1e-300) && lo >= 2.0) break;
        if (hi >= cap)
            throw ConvergenceError("integrate_semi_infinite: no decay before the panel cap");
        lo = hi;
        hi = (hi < 2.0) ? hi + 1.0 : 2.0 * hi;
    }
    return total;
}

} // namespace gscol
