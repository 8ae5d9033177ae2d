#include "gscol/convergence.hpp"
#include "gscol/csv.hpp"
#include "gscol/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace gscol;

namespace {

const RiskParams kStd{1.2, 1.0, 0.01, 0.0};

StudyConfig base_study(StudyKind kind) {
    StudyConfig cfg;
    cfg.risk = kStd;
    cfg.model = ClaimModel::exponential(1.0);
    cfg.penalty = Penalty::ruin_indicator();
    cfg.Ns = {16, 32, 64};
    cfg.T = 5.0;
    cfg.u_eval = 5.0;
    cfg.kind = kind;
    return cfg;
}

}  // namespace

TEST_CASE("Order estimation from error pairs", "[convergence]") {
    REQUIRE_THAT(estimate_order(4e-5, 1e-5), Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(estimate_order(8e-7, 1e-7), Catch::Matchers::WithinAbs(3.0, 1e-12));
    // a reference-style pair
    REQUIRE_THAT(estimate_order(1.8019e-5, 4.5111e-6), Catch::Matchers::WithinAbs(1.998, 2e-3));

    REQUIRE(std::isnan(estimate_order(0.0, 1e-5)));
    REQUIRE(std::isnan(estimate_order(1e-5, 0.0)));
    REQUIRE(std::isnan(estimate_order(-1e-5, 1e-6)));
}

TEST_CASE("Study configuration validation", "[convergence]") {
    auto cfg = base_study(StudyKind::SelfDifference);

    cfg.Ns = {16, 48};
    REQUIRE_THROWS_AS(run_study(cfg), ConfigError);
    cfg.Ns = {16};
    REQUIRE_THROWS_AS(run_study(cfg), ConfigError);
    cfg.Ns = {16, 32};
    cfg.u_eval = 7.0;  // beyond T
    REQUIRE_THROWS_AS(run_study(cfg), ConfigError);

    auto exact = base_study(StudyKind::ExactReferenced);  // missing reference
    REQUIRE_THROWS_AS(run_study(exact), ConfigError);
}

TEST_CASE("Self-difference study row structure and convergence", "[convergence]") {
    auto report = run_study(base_study(StudyKind::SelfDifference));

    REQUIRE(report.rows.size() == 3);
    REQUIRE(report.kind == StudyKind::SelfDifference);
    REQUIRE_FALSE(report.rows[0].has_error);
    REQUIRE(report.rows[1].has_error);
    REQUIRE_FALSE(report.rows[1].has_order);
    REQUIRE(report.rows[2].has_error);
    REQUIRE(report.rows[2].has_order);

    REQUIRE(report.rows[2].error < report.rows[1].error);
    REQUIRE(report.rows[2].order > 1.5);
    REQUIRE(report.rows[2].order < 2.5);
    for (const auto& row : report.rows)
        REQUIRE_THAT(row.value, Catch::Matchers::WithinAbs(0.27054119887373868, 1e-2));
}

TEST_CASE("Exact-referenced study against the ODE oracle", "[convergence]") {
    auto cfg = base_study(StudyKind::ExactReferenced);
    cfg.reference = exponential_ode_oracle(kStd, cfg.model, cfg.penalty, cfg.T);
    auto report = run_study(cfg);

    REQUIRE(report.rows.size() == 3);
    REQUIRE(report.rows[0].has_error);
    REQUIRE_FALSE(report.rows[0].has_order);
    REQUIRE(report.rows[1].has_order);
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        REQUIRE(report.rows[i].error < report.rows[i - 1].error);
        REQUIRE(report.rows[i].order > 1.7);
        REQUIRE(report.rows[i].order < 2.3);
    }
}

TEST_CASE("Identical meshes have zero self-difference", "[convergence]") {
    auto cfg = base_study(StudyKind::SelfDifference);
    VieProblem p = build_gs_vie(kStd, cfg.model, cfg.penalty,
                                phi0(kStd, cfg.model, cfg.penalty).value, cfg.T);
    auto sol = solve_vie(p, {2, cfg.params, 32});
    REQUIRE(self_difference(sol, sol, 5.0) == 0.0);
    REQUIRE(sup_error(sol, [&](double t) { return eval(sol, t); }, 101) == 0.0);
}

TEST_CASE("CSV values survive a parse round-trip", "[convergence][csv]") {
    for (double v : {0.5, 1.0 / 3.0, 1.8019e-5, 0.27054119887373868, 5.7476e-13}) {
        std::string s = format_value(v);
        REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("Report CSV layout", "[convergence][csv]") {
    ConvergenceReport report;
    report.kind = StudyKind::SelfDifference;
    report.rows = {{64, 0.5, 0, 0, false, false},
                   {128, 0.25, 1e-3, 0, true, false},
                   {256, 0.125, 0.0009765625, 2.0, true, true}};
    std::ostringstream os;
    write_report_csv(report, os);

    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    REQUIRE(line == "N,value,error,order");
    std::getline(is, line);
    REQUIRE(line == "64,0.5,,");
    std::getline(is, line);
    REQUIRE(line == "128,0.25,0.001,");
    std::getline(is, line);
    REQUIRE(line == "256,0.125,0.0009765625,2");
    REQUIRE_FALSE(std::getline(is, line));
}
