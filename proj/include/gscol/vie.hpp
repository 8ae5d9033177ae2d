#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gscol/errors.hpp"
#include "gscol/quadrature.hpp"

namespace gscol {

// Linear Volterra integral equation of the second kind on [0, T]:
//   y(t) = forcing(t) + int_0^t kernel(t, s) y(s) ds
struct VieProblem {
    std::function<double(double)> forcing;
    std::function<double(double, double)> kernel;
    double T = 0;
};

// Piecewise-polynomial collocation space: degree m-1 on each of the N
// uniform subintervals, collocated at offsets 0 < params[0] < ... < params[m-1] <= 1.
struct CollocationConfig {
    int m = 0;
    std::vector<double> params;
    int N = 0;
};

// coeffs is N x m row-major; coeffs[n*m + j] is the solution value at
// t_n + params[j] * h, the local Lagrange representation on subinterval n.
struct CollocationSolution {
    CollocationConfig config;
    double T = 0;
    std::vector<double> coeffs;

    double h() const { return T / config.N; }
};

// Values of the m Lagrange basis polynomials for the given nodes at theta.
// Nodes closer than 1e-12 are rejected.
inline std::vector<double> lagrange_basis(const std::vector<double>& nodes, double theta) {
    const std::size_t m = nodes.size();
    if (m == 0) throw ConfigError("lagrange_basis: empty node set");
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (std::abs(nodes[a] - nodes[b]) < 1e-12)
                throw ConfigError("lagrange_basis: nodes must be distinct");
    std::vector<double> L(m, 1.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            if (k != j) L[j] *= (theta - nodes[k]) / (nodes[j] - nodes[k]);
    return L;
}

namespace detail {

inline void validate_collocation_config(const CollocationConfig& cfg) {
    if (cfg.m < 1) throw ConfigError("collocation: m must be >= 1");
    if (cfg.N < 1) throw ConfigError("collocation: N must be >= 1");
    if (static_cast<int>(cfg.params.size()) != cfg.m)
        throw ConfigError("collocation: params size must equal m");
    double prev = 0.0;
    for (double c : cfg.params) {
        if (!(c > prev)) throw ConfigError("collocation: params must satisfy 0 < c1 < ... < cm");
        prev = c;
    }
    if (!(cfg.params.back() <= 1.0)) throw ConfigError("collocation: params must lie in (0, 1]");
}

// Quadrature and basis tables reused across all subintervals. Nodes are the
// Gauss points mapped to [0,1] (for the history panels) and to [0, c_i] (for
// the in-panel blocks); basis values at those nodes are fixed per config.
struct CollocationTables {
    int m = 0, q = 0;
    std::vector<double> s_full, w_full;     // q
    std::vector<double> L_full;             // q*m, L_full[k*m+j] = L_j(s_full[k])
    std::vector<double> s_part, w_part;     // m*q, row i: nodes on [0, c_i]
    std::vector<double> L_part;             // m*q*m
};

inline CollocationTables build_tables(const CollocationConfig& cfg, const GaussRule& rule) {
    CollocationTables t;
    t.m = cfg.m;
    t.q = rule.q;
    t.s_full.resize(t.q);
    t.w_full.resize(t.q);
    t.L_full.resize(t.q * t.m);
    for (int k = 0; k < t.q; ++k) {
        t.s_full[k] = 0.5 * (rule.nodes[k] + 1.0);
        t.w_full[k] = 0.5 * rule.weights[k];
        auto L = lagrange_basis(cfg.params, t.s_full[k]);
        for (int j = 0; j < t.m; ++j) t.L_full[k * t.m + j] = L[j];
    }
    t.s_part.resize(t.m * t.q);
    t.w_part.resize(t.m * t.q);
    t.L_part.resize(t.m * t.q * t.m);
    for (int i = 0; i < t.m; ++i) {
        double ci = cfg.params[i];
        for (int k = 0; k < t.q; ++k) {
            double s = 0.5 * ci * (rule.nodes[k] + 1.0);
            t.s_part[i * t.q + k] = s;
            t.w_part[i * t.q + k] = 0.5 * ci * rule.weights[k];
            auto L = lagrange_basis(cfg.params, s);
            for (int j = 0; j < t.m; ++j) t.L_part[(i * t.q + k) * t.m + j] = L[j];
        }
    }
    return t;
}

// In-place LU with partial pivoting; returns false on an exactly singular pivot.
inline bool lu_factor(std::vector<double>& a, std::vector<int>& piv, int m) {
    piv.resize(m);
    for (int col = 0; col < m; ++col) {
        int p = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[r * m + col]) > std::abs(a[p * m + col])) p = r;
        piv[col] = p;
        if (p != col)
            for (int k = 0; k < m; ++k) std::swap(a[col * m + k], a[p * m + k]);
        double d = a[col * m + col];
        if (d == 0.0) return false;
        for (int r = col + 1; r < m; ++r) {
            double f = a[r * m + col] / d;
            a[r * m + col] = f;
            for (int k = col + 1; k < m; ++k) a[r * m + k] -= f * a[col * m + k];
        }
    }
    return true;
}

inline void lu_solve(const std::vector<double>& lu, const std::vector<int>& piv, int m,
                     std::vector<double>& x) {
    for (int col = 0; col < m; ++col)
        if (piv[col] != col) std::swap(x[col], x[piv[col]]);
    for (int r = 1; r < m; ++r)
        for (int k = 0; k < r; ++k) x[r] -= lu[r * m + k] * x[k];
    for (int r = m - 1; r >= 0; --r) {
        for (int k = r + 1; k < m; ++k) x[r] -= lu[r * m + k] * x[k];
        x[r] /= lu[r * m + r];
    }
}

inline double norm1(const std::vector<double>& a, int m) {
    double best = 0.0;
    for (int j = 0; j < m; ++j) {
        double col = 0.0;
        for (int i = 0; i < m; ++i) col += std::abs(a[i * m + j]);
        best = std::max(best, col);
    }
    return best;
}

} // namespace detail

// Matrices of the step-n block system. lag[l](i,j) = int_0^1 K(t_{n,i}, t_l + s h) L_j(s) ds
// for l < n, diag(i,j) = int_0^{c_i} K(t_{n,i}, t_n + s h) L_j(s) ds; both stored
// m x m row-major, without the factor h.
struct BlockMatrices {
    std::vector<std::vector<double>> lag;
    std::vector<double> diag;
};

inline BlockMatrices build_block_matrices(const VieProblem& problem, const CollocationConfig& cfg,
                                          const GaussRule& rule, int n) {
    detail::validate_collocation_config(cfg);
    if (n < 0 || n >= cfg.N) throw ConfigError("build_block_matrices: subinterval out of range");
    auto t = detail::build_tables(cfg, rule);
    const int m = cfg.m, q = rule.q;
    const double h = problem.T / cfg.N, tn = n * h;
    BlockMatrices out;
    out.lag.assign(n, std::vector<double>(m * m, 0.0));
    for (int l = 0; l < n; ++l) {
        double tl = l * h;
        for (int i = 0; i < m; ++i) {
            double ti = tn + cfg.params[i] * h;
            for (int k = 0; k < q; ++k) {
                double kv = t.w_full[k] * problem.kernel(ti, tl + t.s_full[k] * h);
                for (int j = 0; j < m; ++j) out.lag[l][i * m + j] += kv * t.L_full[k * m + j];
            }
        }
    }
    out.diag.assign(m * m, 0.0);
    for (int i = 0; i < m; ++i) {
        double ti = tn + cfg.params[i] * h;
        for (int k = 0; k < q; ++k) {
            double kv = t.w_part[i * q + k] * problem.kernel(ti, tn + t.s_part[i * q + k] * h);
            for (int j = 0; j < m; ++j) out.diag[i * m + j] += kv * t.L_part[(i * q + k) * m + j];
        }
    }
    return out;
}

// Time-stepping collocation solve. Each step solves [I - h B_n] U_n = g_n + G_n
// where G_n accumulates the history panels in fixed ascending order, so
// repeated runs produce bitwise-identical coefficients.
inline CollocationSolution solve_vie(const VieProblem& problem, const CollocationConfig& cfg,
                                     const GaussRule& rule) {
    detail::validate_collocation_config(cfg);
    if (!(problem.T > 0)) throw ConfigError("solve_vie: T must be positive");
    const int m = cfg.m, q = rule.q, N = cfg.N;
    const double h = problem.T / N;
    const auto t = detail::build_tables(cfg, rule);

    CollocationSolution sol;
    sol.config = cfg;
    sol.T = problem.T;
    sol.coeffs.assign(static_cast<std::size_t>(N) * m, 0.0);

    // interp[l*q + k] caches u_h(t_l + s_full[k] h), so each history panel
    // costs m*q kernel evaluations and no repeated basis work.
    std::vector<double> interp(static_cast<std::size_t>(N) * q, 0.0);
    std::vector<double> rhs(m), a(m * m), diag(m * m);
    std::vector<int> piv;

    for (int n = 0; n < N; ++n) {
        const double tn = n * h;
        for (int i = 0; i < m; ++i) {
            const double ti = tn + cfg.params[i] * h;
            double acc = problem.forcing(ti);
            for (int l = 0; l < n; ++l) {
                const double tl = l * h;
                double panel = 0.0;
                for (int k = 0; k < q; ++k)
                    panel += t.w_full[k] * problem.kernel(ti, tl + t.s_full[k] * h) *
                             interp[static_cast<std::size_t>(l) * q + k];
                acc += h * panel;
            }
            rhs[i] = acc;
        }

        std::fill(diag.begin(), diag.end(), 0.0);
        for (int i = 0; i < m; ++i) {
            const double ti = tn + cfg.params[i] * h;
            for (int k = 0; k < q; ++k) {
                double kv = t.w_part[i * q + k] * problem.kernel(ti, tn + t.s_part[i * q + k] * h);
                for (int j = 0; j < m; ++j) diag[i * m + j] += kv * t.L_part[(i * q + k) * m + j];
            }
        }
        if (!(h * detail::norm1(diag, m) < 1.0))
            throw StepSizeError("solve_vie: h * ||B_n||_1 >= 1; increase N");

        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a[i * m + j] = (i == j ? 1.0 : 0.0) - h * diag[i * m + j];
        const double a_norm = detail::norm1(a, m);
        std::vector<double> lu = a;
        if (!detail::lu_factor(lu, piv, m))
            throw NumericalError("solve_vie: singular block system at step " + std::to_string(n));

        // condition estimate via the explicit inverse; m is small.
        double inv_norm = 0.0;
        {
            std::vector<double> inv(m * m, 0.0), e(m);
            for (int j = 0; j < m; ++j) {
                std::fill(e.begin(), e.end(), 0.0);
                e[j] = 1.0;
                detail::lu_solve(lu, piv, m, e);
                for (int i = 0; i < m; ++i) inv[i * m + j] = e[i];
            }
            inv_norm = detail::norm1(inv, m);
        }
        if (a_norm * inv_norm > 1e12)
            throw NumericalError("solve_vie: block system condition estimate exceeds 1e12 at step " +
                                 std::to_string(n));

        detail::lu_solve(lu, piv, m, rhs);
        for (int j = 0; j < m; ++j) sol.coeffs[static_cast<std::size_t>(n) * m + j] = rhs[j];
        for (int k = 0; k < q; ++k) {
            double v = 0.0;
            for (int j = 0; j < m; ++j) v += t.L_full[k * m + j] * rhs[j];
            interp[static_cast<std::size_t>(n) * q + k] = v;
        }
    }
    return sol;
}

inline CollocationSolution solve_vie(const VieProblem& problem, const CollocationConfig& cfg) {
    return solve_vie(problem, cfg, gauss_rule(cfg.m + 6));
}

// Evaluate the collocation solution at t in [0, T]. Right-continuous at the
// interior grid points: t_n evaluates on subinterval n.
inline double eval(const CollocationSolution& sol, double t) {
    if (!(t >= 0.0) || !(t <= sol.T)) throw std::domain_error("eval: t outside [0, T]");
    const int m = sol.config.m, N = sol.config.N;
    const double h = sol.h();
    int n = std::min(static_cast<int>(t / h), N - 1);
    double theta = t / h - n;
    auto L = lagrange_basis(sol.config.params, theta);
    double v = 0.0;
    for (int j = 0; j < m; ++j) v += L[j] * sol.coeffs[static_cast<std::size_t>(n) * m + j];
    return v;
}

// Defect of the collocation equation at collocation point (n, i), using the
// same quadrature composition as the solver; near zero at a valid solution.
inline double residual(const VieProblem& problem, const CollocationSolution& sol,
                       const GaussRule& rule, int n, int i) {
    const CollocationConfig& cfg = sol.config;
    detail::validate_collocation_config(cfg);
    if (n < 0 || n >= cfg.N || i < 0 || i >= cfg.m)
        throw ConfigError("residual: collocation index out of range");
    const auto t = detail::build_tables(cfg, rule);
    const int m = cfg.m, q = rule.q;
    const double h = sol.h(), tn = n * h, ti = tn + cfg.params[i] * h;

    double acc = problem.forcing(ti);
    for (int l = 0; l < n; ++l) {
        const double tl = l * h;
        double panel = 0.0;
        for (int k = 0; k < q; ++k) {
            double u = 0.0;
            for (int j = 0; j < m; ++j)
                u += t.L_full[k * m + j] * sol.coeffs[static_cast<std::size_t>(l) * m + j];
            panel += t.w_full[k] * problem.kernel(ti, tl + t.s_full[k] * h) * u;
        }
        acc += h * panel;
    }
    double panel = 0.0;
    for (int k = 0; k < q; ++k) {
        double u = 0.0;
        for (int j = 0; j < m; ++j)
            u += t.L_part[(i * q + k) * m + j] * sol.coeffs[static_cast<std::size_t>(n) * m + j];
        panel += t.w_part[i * q + k] * problem.kernel(ti, tn + t.s_part[i * q + k] * h) * u;
    }
    acc += h * panel;
    return sol.coeffs[static_cast<std::size_t>(n) * m + i] - acc;
}

} // namespace gscol
