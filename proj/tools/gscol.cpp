// Command-line driver: solve the expected-penalty equation, print boundary
// values, run convergence ladders, Monte-Carlo checks, and figure tables.
#include <clocale>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gscol/boundary_value.hpp"
#include "gscol/convergence.hpp"
#include "gscol/csv.hpp"
#include "gscol/oracles.hpp"
#include "gscol/risk_model.hpp"
#include "gscol/vie.hpp"

namespace {

struct Options {
    std::string claims = "exp";
    std::string penalty = "ruin";
    int m = 2;
    std::vector<double> params;
    int N = 2048;
    double T = 30.0;
    double c = 1.2;
    double lambda = 1.0;
    double delta = 0.01;
    std::vector<double> u;
    std::uint64_t seed = 1;
    long long paths = 1'000'000;
    long long max_events = 100'000;
    double barrier = -1.0;
    std::string out;
    std::string kind = "auto";       // convergence: auto | exact | self
    int n_min = 64;                  // convergence ladder start
    std::string reference = "auto";  // figures: auto | oracle | self
};

gscol::ClaimModel make_model(const std::string& name) {
    if (name == "exp") return gscol::ClaimModel::exponential(1.0);
    if (name == "erlang2") return gscol::ClaimModel::erlang2(2.0);
    if (name == "combexp") return gscol::ClaimModel::combination(2.0, 1.5, -1.0, 3.0);
    throw gscol::ConfigError("unknown claims model '" + name + "' (exp|erlang2|combexp)");
}

gscol::Penalty make_penalty(const std::string& name) {
    if (name == "ruin") return gscol::Penalty::ruin_indicator();
    if (name == "claimcause") return gscol::Penalty::claim_causing_ruin();
    if (name == "deficit") return gscol::Penalty::deficit_at_ruin();
    throw gscol::ConfigError("unknown penalty '" + name + "' (ruin|claimcause|deficit)");
}

std::vector<double> params_for(const Options& o) {
    if (!o.params.empty()) {
        if (static_cast<int>(o.params.size()) != o.m)
            throw gscol::ConfigError("--params must list exactly m offsets");
        return o.params;
    }
    if (o.m == 2) return {1.0 / 3.0, 2.0 / 3.0};
    if (o.m == 3) return {1.0 / 3.0, 2.0 / 3.0, 1.0};
    throw gscol::ConfigError("no default collocation offsets for m = " + std::to_string(o.m) +
                             "; pass --params");
}

gscol::RiskParams risk_for(const Options& o) {
    gscol::RiskParams p{o.c, o.lambda, o.delta, 0.0};
    gscol::validate(p);
    return p;
}

std::vector<double> default_u_grid(double T) {
    std::vector<double> u;
    int n = static_cast<int>(std::lround(T / 0.1));
    u.reserve(n + 1);
    for (int i = 0; i <= n; ++i) u.push_back(std::min(T, 0.1 * i));
    return u;
}

// Writes through a stream so stdout and --out behave identically.
class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw gscol::ConfigError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void add_model_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--claims", o.claims, "Claim model: exp | erlang2 | combexp (unit-mean)");
    cmd->add_option("--penalty", o.penalty, "Penalty: ruin | claimcause | deficit");
    cmd->add_option("--c", o.c, "Premium rate");
    cmd->add_option("--lambda", o.lambda, "Claim intensity");
    cmd->add_option("--delta", o.delta, "Interest force");
    cmd->add_option("--T", o.T, "Right end of the solve interval");
}

void add_collocation_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--m", o.m, "Collocation points per subinterval");
    cmd->add_option("--params", o.params, "Collocation offsets in (0,1], comma separated")
        ->delimiter(',');
    cmd->add_option("--N", o.N, "Number of subintervals");
}

int run_solve(const Options& o) {
    auto model = make_model(o.claims);
    auto pen = make_penalty(o.penalty);
    auto risk = risk_for(o);
    auto boundary = gscol::phi0(risk, model, pen);
    auto problem = gscol::build_gs_vie(risk, model, pen, boundary.value, o.T);
    gscol::CollocationConfig cfg{o.m, params_for(o), o.N};
    auto sol = gscol::solve_vie(problem, cfg);

    std::vector<double> grid = o.u.empty() ? default_u_grid(o.T) : o.u;
    Output out(o.out);
    out.stream() << "u,value\n";
    for (double u : grid)
        out.stream() << gscol::format_value(u) << ',' << gscol::format_value(gscol::eval(sol, u))
                     << '\n';
    return 0;
}

int run_phi0(const Options& o) {
    auto res = gscol::phi0(risk_for(o), make_model(o.claims), make_penalty(o.penalty));
    Output out(o.out);
    out.stream() << "value,kappa_delta,truncation_point,est_abs_error\n"
                 << gscol::format_value(res.value) << ',' << gscol::format_value(res.kappa_delta)
                 << ',' << gscol::format_value(res.truncation_point) << ','
                 << gscol::format_value(res.est_abs_error) << '\n';
    return 0;
}

int run_convergence(const Options& o) {
    gscol::StudyConfig cfg;
    cfg.risk = risk_for(o);
    cfg.model = make_model(o.claims);
    cfg.penalty = make_penalty(o.penalty);
    cfg.m = o.m;
    cfg.params = params_for(o);
    cfg.T = o.T;
    cfg.u_eval = o.u.empty() ? 5.0 : o.u.front();
    cfg.Ns.clear();
    for (int n = o.n_min; n <= o.N; n *= 2) cfg.Ns.push_back(n);

    bool exact = (o.kind == "exact") ||
                 (o.kind == "auto" && o.claims == "exp");
    if (o.kind != "auto" && o.kind != "exact" && o.kind != "self")
        throw gscol::ConfigError("--kind must be auto, exact, or self");
    if (exact) {
        cfg.kind = gscol::StudyKind::ExactReferenced;
        cfg.reference =
            gscol::exponential_ode_oracle(cfg.risk, cfg.model, cfg.penalty, cfg.T, 1e-12);
    } else {
        cfg.kind = gscol::StudyKind::SelfDifference;
    }

    auto report = gscol::run_study(cfg);
    Output out(o.out);
    gscol::write_report_csv(report, out.stream());
    return 0;
}

int run_mc(const Options& o) {
    auto model = make_model(o.claims);
    auto pen = make_penalty(o.penalty);
    auto risk = risk_for(o);
    std::vector<double> grid = o.u.empty() ? std::vector<double>{0.0, 5.0} : o.u;
    Output out(o.out);
    out.stream() << "u,mean,std_error,paths,censored_fraction\n";
    for (double u : grid) {
        gscol::McConfig cfg;
        cfg.paths = o.paths;
        cfg.seed = o.seed;
        cfg.u0 = u;
        cfg.safe_barrier = o.barrier;
        cfg.max_events = o.max_events;
        auto est = gscol::simulate_gs(risk, model, pen, cfg);
        out.stream() << gscol::format_value(u) << ',' << gscol::format_value(est.mean) << ','
                     << gscol::format_value(est.std_error) << ',' << est.paths << ','
                     << gscol::format_value(est.censored_fraction) << '\n';
    }
    return 0;
}

int run_figures(const Options& o) {
    if (o.out.empty()) throw gscol::ConfigError("figures: --out prefix is required");
    auto model = make_model(o.claims);
    auto pen = make_penalty(o.penalty);
    auto risk = risk_for(o);
    const std::vector<int> Ns = {512, 1024, 2048, 4096};

    auto boundary = gscol::phi0(risk, model, pen);
    auto problem = gscol::build_gs_vie(risk, model, pen, boundary.value, o.T);
    std::vector<double> params = params_for(o);
    std::vector<gscol::CollocationSolution> sols;
    for (int n : Ns) sols.push_back(gscol::solve_vie(problem, {o.m, params, n}));

    if (o.reference != "auto" && o.reference != "oracle" && o.reference != "self")
        throw gscol::ConfigError("--reference must be auto, oracle, or self");
    bool use_oracle = (o.reference == "oracle") || (o.reference == "auto" && o.claims == "exp");
    std::function<double(double)> ref;
    if (use_oracle)
        ref = gscol::exponential_ode_oracle(risk, model, pen, o.T, 1e-12);
    else
        ref = [&sols](double u) { return gscol::eval(sols.back(), u); };

    std::vector<double> grid = o.u.empty() ? default_u_grid(o.T) : o.u;
    std::ofstream values(o.out + "_values.csv", std::ios::binary);
    std::ofstream relerr(o.out + "_relerr.csv", std::ios::binary);
    if (!values || !relerr)
        throw gscol::ConfigError("figures: cannot open output files with prefix '" + o.out + "'");

    values << "u";
    relerr << "u";
    for (int n : Ns) {
        values << ",value_N" << n;
        relerr << ",relerr_N" << n;
    }
    values << '\n';
    relerr << '\n';
    for (double u : grid) {
        double r = ref(u);
        values << gscol::format_value(u);
        relerr << gscol::format_value(u);
        for (const auto& sol : sols) {
            double v = gscol::eval(sol, u);
            values << ',' << gscol::format_value(v);
            relerr << ',' << gscol::format_value(std::abs(v - r) / std::max(std::abs(r), 1e-300));
        }
        values << '\n';
        relerr << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    Options o;
    CLI::App app{"Expected discounted penalty functions for the compound-Poisson "
                 "surplus with interest, via piecewise-polynomial collocation"};
    app.set_config("--config", "", "Config file with key=value lines; flags win on conflict");
    // subcommand flags live in [subcommand] sections; reject unknown keys instead
    // of silently running on defaults
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Solve on [0, T] and print u,value rows");
    add_model_flags(solve, o);
    add_collocation_flags(solve, o);
    solve->add_option("--u", o.u, "Evaluation points (default 0:0.1:T)")->delimiter(',');
    solve->add_option("--out", o.out, "Output CSV path (default stdout)");

    auto* phi0 = app.add_subcommand("phi0", "Boundary value at zero initial surplus");
    add_model_flags(phi0, o);
    phi0->add_option("--out", o.out, "Output CSV path (default stdout)");

    auto* conv = app.add_subcommand("convergence", "Grid-doubling error/order ladder");
    add_model_flags(conv, o);
    add_collocation_flags(conv, o);
    conv->add_option("--Nmin", o.n_min, "Smallest ladder N (doubles up to --N)");
    conv->add_option("--kind", o.kind, "Error kind: auto | exact | self");
    conv->add_option("--u", o.u, "Evaluation point for values/self differences")->delimiter(',');
    conv->add_option("--out", o.out, "Output CSV path (default stdout)");

    auto* mc = app.add_subcommand("mc", "Monte-Carlo estimate at the given surplus levels");
    add_model_flags(mc, o);
    mc->add_option("--u", o.u, "Initial surplus levels (default 0,5)")->delimiter(',');
    mc->add_option("--paths", o.paths, "Simulated paths");
    mc->add_option("--seed", o.seed, "RNG seed");
    mc->add_option("--max-events", o.max_events, "Per-path event cap");
    mc->add_option("--barrier", o.barrier, "Safe barrier (default u0 + 40 mean claims)");
    mc->add_option("--out", o.out, "Output CSV path (default stdout)");

    auto* figures = app.add_subcommand(
        "figures", "Value and relative-error tables across N in {512,1024,2048,4096}");
    add_model_flags(figures, o);
    figures->add_option("--m", o.m, "Collocation points per subinterval");
    figures->add_option("--params", o.params, "Collocation offsets")->delimiter(',');
    figures->add_option("--reference", o.reference, "Reference: auto | oracle | self");
    figures->add_option("--u", o.u, "Evaluation grid (default 0:0.1:T)")->delimiter(',');
    figures->add_option("--out", o.out, "Output prefix; writes <out>_values.csv, <out>_relerr.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (solve->parsed()) return run_solve(o);
        if (phi0->parsed()) return run_phi0(o);
        if (conv->parsed()) return run_convergence(o);
        if (mc->parsed()) return run_mc(o);
        if (figures->parsed()) return run_figures(o);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const gscol::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}
