#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "gscol/boundary_value.hpp"
#include "gscol/errors.hpp"
#include "gscol/risk_model.hpp"
#include "gscol/vie.hpp"

namespace gscol {

enum class StudyKind { ExactReferenced, SelfDifference };

struct ConvergenceRow {
    int N = 0;
    double value = 0;  // solution at u_eval
    double error = 0;
    double order = 0;
    bool has_error = false;
    bool has_order = false;
};

struct ConvergenceReport {
    StudyKind kind = StudyKind::SelfDifference;
    double u_eval = 0;
    int m = 0;
    std::vector<double> params;
    double T = 0;
    std::vector<ConvergenceRow> rows;
};

// log2(e_coarse / e_fine); NaN when either error is not positive.
inline double estimate_order(double e_coarse, double e_fine) {
    if (!(e_coarse > 0) || !(e_fine > 0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(e_coarse / e_fine);
}

// sup |u_h - reference| over an equispaced grid on [0, T].
inline double sup_error(const CollocationSolution& sol,
                        const std::function<double(double)>& reference, int grid_points = 3001) {
    if (grid_points < 2) throw ConfigError("sup_error: need at least 2 grid points");
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        double t = sol.T * i / (grid_points - 1);
        worst = std::max(worst, std::abs(eval(sol, t) - reference(t)));
    }
    return worst;
}

inline double self_difference(const CollocationSolution& coarse, const CollocationSolution& fine,
                              double t_eval) {
    return std::abs(eval(coarse, t_eval) - eval(fine, t_eval));
}

struct StudyConfig {
    RiskParams risk;
    ClaimModel model;
    Penalty penalty;
    int m = 2;
    std::vector<double> params = {1.0 / 3.0, 2.0 / 3.0};
    std::vector<int> Ns = {64, 128, 256, 512, 1024, 2048};
    double T = 30.0;
    double u_eval = 5.0;
    StudyKind kind = StudyKind::SelfDifference;
    std::function<double(double)> reference;  // required for ExactReferenced
    int dense_grid = 3001;
};

// Solve the ladder of N values and report per-row errors and observed orders.
// Exact-referenced rows carry sup-grid errors from the first row on;
// self-difference rows pair each N with the previous one, so errors start at
// the second row and orders one row later.
inline ConvergenceReport run_study(const StudyConfig& cfg) {
    if (cfg.Ns.size() < 2) throw ConfigError("run_study: need at least two N values");
    for (std::size_t i = 1; i < cfg.Ns.size(); ++i)
        if (cfg.Ns[i] != 2 * cfg.Ns[i - 1])
            throw ConfigError("run_study: N values must double at each step");
    if (cfg.kind == StudyKind::ExactReferenced && !cfg.reference)
        throw ConfigError("run_study: exact-referenced study needs a reference callable");
    if (!(cfg.u_eval >= 0 && cfg.u_eval <= cfg.T))
        throw ConfigError("run_study: u_eval must lie in [0, T]");

    const double boundary = phi0(cfg.risk, cfg.model, cfg.penalty).value;
    const VieProblem problem = build_gs_vie(cfg.risk, cfg.model, cfg.penalty, boundary, cfg.T);
    const GaussRule& rule = gauss_rule(cfg.m + 6);

    ConvergenceReport report;
    report.kind = cfg.kind;
    report.u_eval = cfg.u_eval;
    report.m = cfg.m;
    report.params = cfg.params;
    report.T = cfg.T;

    CollocationSolution prev;
    for (std::size_t i = 0; i < cfg.Ns.size(); ++i) {
        CollocationConfig cc{cfg.m, cfg.params, cfg.Ns[i]};
        CollocationSolution sol = solve_vie(problem, cc, rule);
        ConvergenceRow row;
        row.N = cfg.Ns[i];
        row.value = eval(sol, cfg.u_eval);
        if (cfg.kind == StudyKind::ExactReferenced) {
            row.error = sup_error(sol, cfg.reference, cfg.dense_grid);
            row.has_error = true;
        } else if (i > 0) {
            row.error = self_difference(prev, sol, cfg.u_eval);
            row.has_error = true;
        }
        std::size_t r = report.rows.size();
        if (row.has_error && r > 0 && report.rows[r - 1].has_error) {
            double p = estimate_order(report.rows[r - 1].error, row.error);
            if (std::isfinite(p)) {
                row.order = p;
                row.has_order = true;
            }
        }
        report.rows.push_back(row);
        prev = std::move(sol);
    }
    return report;
}

} // namespace gscol
