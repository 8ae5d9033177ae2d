#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "gscol/boundary_value.hpp"
#include "gscol/errors.hpp"
#include "gscol/risk_model.hpp"

namespace gscol {

struct McConfig {
    long long paths = 1'000'000;
    std::uint64_t seed = 1;
    double u0 = 0.0;
    double safe_barrier = -1.0;  // negative: auto u0 + 40 * mean claim
    long long max_events = 100'000;
};

struct McEstimate {
    double mean = 0;
    double std_error = 0;  // NaN when paths == 1
    long long paths = 0;
    double censored_fraction = 0;  // paths that hit max_events unresolved
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based stream: output k of path p is mix64(key(seed, p) + k * odd
// constant). Streams depend only on (seed, path index), so results are
// independent of scheduling and bit-reproducible across runs.
class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t path)
        : key_(mix64(mix64(seed) ^ mix64(path * 0x2545F4914F6CDD1DULL + 1))) {}

    double uniform01() {
        std::uint64_t bits = mix64(key_ + (ctr_++) * 0x9E3779B97F4A7C15ULL);
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// Solve survival(model, x) = v for x > 0 by safeguarded Newton; survival is
// strictly decreasing for the supported models.
inline double invert_survival(const ClaimModel& m, double v) {
    if (v >= 1.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (survival(m, hi) > v) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw ConvergenceError("invert_survival: no bracket before 1e6");
    }
    double x = std::min(hi, std::max(lo, -m.mu * std::log(std::max(v, 1e-300))));
    for (int it = 0; it < 200; ++it) {
        double f = survival(m, x) - v;
        if (f > 0)
            lo = x;
        else
            hi = x;
        double d = density(m, x);
        double step = (d > 0) ? f / d : 0.0;
        double next = x + step;  // survival' = -density
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * (1.0 + x)) return next;
        x = next;
    }
    return x;
}

inline double sample_claim(const ClaimModel& m, PathRng& rng) {
    switch (m.family) {
        case ClaimFamily::Exponential: return rng.exponential(m.rate);
        case ClaimFamily::Erlang2: return rng.exponential(m.rate) + rng.exponential(m.rate);
        case ClaimFamily::CombinationOfExponentials:
        case ClaimFamily::Custom: return invert_survival(m, 1.0 - rng.uniform01());
    }
    throw ConfigError("sample_claim: unknown claim family");
}

// Fixed-shape pairwise reduction; the result does not depend on chunking.
inline double pairwise_sum(const double* a, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

} // namespace detail

// Monte-Carlo estimate of the expected penalty at ruin from initial surplus
// u0. Surplus grows at interest force delta between claims; a path is
// declared survived once it clears safe_barrier (bias at most the ruin
// probability from the barrier), and counts as censored if max_events pass
// without resolution. Deterministic for a fixed (seed, paths).
inline McEstimate simulate_gs(const RiskParams& prm, const ClaimModel& model,
                              const Penalty& penalty, const McConfig& cfg) {
    validate(prm);
    if (prm.alpha != 0.0)
        throw ConfigError("simulate_gs: only alpha = 0 is supported by the pipeline");
    if (!(prm.c > prm.lambda * model.mu))
        throw ConfigError("simulate_gs: positive loading c > lambda * mu required");
    if (cfg.paths < 1) throw ConfigError("simulate_gs: paths must be >= 1");
    if (cfg.max_events < 1) throw ConfigError("simulate_gs: max_events must be >= 1");
    if (!(cfg.u0 >= 0)) throw ConfigError("simulate_gs: u0 must be >= 0");
    const double barrier =
        cfg.safe_barrier < 0 ? cfg.u0 + 40.0 * model.mu : cfg.safe_barrier;

    std::vector<double> payoff(static_cast<std::size_t>(cfg.paths), 0.0);
    long long censored = 0;
    for (long long p = 0; p < cfg.paths; ++p) {
        detail::PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        double u = cfg.u0;
        bool resolved = false;
        for (long long ev = 0; ev < cfg.max_events; ++ev) {
            double dt = rng.exponential(prm.lambda);
            if (prm.delta > 0) {
                double grow = std::exp(prm.delta * dt);
                u = u * grow + prm.c * (grow - 1.0) / prm.delta;
            } else {
                u += prm.c * dt;
            }
            double x = detail::sample_claim(model, rng);
            if (x > u) {
                payoff[static_cast<std::size_t>(p)] = penalty.weight(u, x - u);
                resolved = true;
                break;
            }
            u -= x;
            if (u >= barrier) {
                resolved = true;  // payoff stays 0
                break;
            }
        }
        if (!resolved) ++censored;
    }

    McEstimate est;
    est.paths = cfg.paths;
    est.censored_fraction = static_cast<double>(censored) / static_cast<double>(cfg.paths);
    const std::size_t n = payoff.size();
    est.mean = detail::pairwise_sum(payoff.data(), n) / static_cast<double>(n);
    if (n == 1) {
        est.std_error = std::numeric_limits<double>::quiet_NaN();
    } else {
        for (double& v : payoff) {
            double d = v - est.mean;
            v = d * d;
        }
        double ssd = detail::pairwise_sum(payoff.data(), n);
        est.std_error = std::sqrt(ssd / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
    }
    return est;
}

namespace detail {

struct OdeState {
    double y = 0, dy = 0;
};

// One Dormand-Prince 5(4) step; err receives the embedded-difference norm.
template <class F>
OdeState dp54_step(const F& f, double t, const OdeState& s, double h, double& err) {
    OdeState k[7];
    k[0] = f(t, s);
    OdeState tmp{s.y + h * (0.2 * k[0].y), s.dy + h * (0.2 * k[0].dy)};
    k[1] = f(t + 0.2 * h, tmp);
    tmp = {s.y + h * (3.0 / 40 * k[0].y + 9.0 / 40 * k[1].y),
           s.dy + h * (3.0 / 40 * k[0].dy + 9.0 / 40 * k[1].dy)};
    k[2] = f(t + 0.3 * h, tmp);
    tmp = {s.y + h * (44.0 / 45 * k[0].y - 56.0 / 15 * k[1].y + 32.0 / 9 * k[2].y),
           s.dy + h * (44.0 / 45 * k[0].dy - 56.0 / 15 * k[1].dy + 32.0 / 9 * k[2].dy)};
    k[3] = f(t + 0.8 * h, tmp);
    tmp = {s.y + h * (19372.0 / 6561 * k[0].y - 25360.0 / 2187 * k[1].y + 64448.0 / 6561 * k[2].y -
                      212.0 / 729 * k[3].y),
           s.dy + h * (19372.0 / 6561 * k[0].dy - 25360.0 / 2187 * k[1].dy +
                       64448.0 / 6561 * k[2].dy - 212.0 / 729 * k[3].dy)};
    k[4] = f(t + 8.0 / 9 * h, tmp);
    tmp = {s.y + h * (9017.0 / 3168 * k[0].y - 355.0 / 33 * k[1].y + 46732.0 / 5247 * k[2].y +
                      49.0 / 176 * k[3].y - 5103.0 / 18656 * k[4].y),
           s.dy + h * (9017.0 / 3168 * k[0].dy - 355.0 / 33 * k[1].dy + 46732.0 / 5247 * k[2].dy +
                       49.0 / 176 * k[3].dy - 5103.0 / 18656 * k[4].dy)};
    k[5] = f(t + h, tmp);
    OdeState y5{
        s.y + h * (35.0 / 384 * k[0].y + 500.0 / 1113 * k[2].y + 125.0 / 192 * k[3].y -
                   2187.0 / 6784 * k[4].y + 11.0 / 84 * k[5].y),
        s.dy + h * (35.0 / 384 * k[0].dy + 500.0 / 1113 * k[2].dy + 125.0 / 192 * k[3].dy -
                    2187.0 / 6784 * k[4].dy + 11.0 / 84 * k[5].dy)};
    k[6] = f(t + h, y5);
    double e_y = h * ((35.0 / 384 - 5179.0 / 57600) * k[0].y +
                      (500.0 / 1113 - 7571.0 / 16695) * k[2].y +
                      (125.0 / 192 - 393.0 / 640) * k[3].y +
                      (-2187.0 / 6784 + 92097.0 / 339200) * k[4].y +
                      (11.0 / 84 - 187.0 / 2100) * k[5].y - (1.0 / 40) * k[6].y);
    double e_dy = h * ((35.0 / 384 - 5179.0 / 57600) * k[0].dy +
                       (500.0 / 1113 - 7571.0 / 16695) * k[2].dy +
                       (125.0 / 192 - 393.0 / 640) * k[3].dy +
                       (-2187.0 / 6784 + 92097.0 / 339200) * k[4].dy +
                       (11.0 / 84 - 187.0 / 2100) * k[5].dy - (1.0 / 40) * k[6].dy);
    err = std::max(std::abs(e_y), std::abs(e_dy));
    return y5;
}

template <class F>
OdeState advance(const F& f, double t, OdeState s, double h, double tol, int depth) {
    if (depth > 40) throw ConvergenceError("exponential_ode_oracle: tolerance not achieved");
    double err = 0.0;
    OdeState next = dp54_step(f, t, s, h, err);
    double scale = tol * std::max({1.0, std::abs(next.y), std::abs(next.dy)});
    if (err <= scale) return next;
    OdeState mid = advance(f, t, s, 0.5 * h, tol, depth + 1);
    return advance(f, t + 0.5 * h, mid, 0.5 * h, tol, depth + 1);
}

} // namespace detail

// High-accuracy reference for exponential claims. Differentiating the
// defining integro-differential equation once removes the convolution (the
// exponential tail is an eigenfunction of d/du + rate), leaving
//   y'' = p(u) y' + q(u),
//   p(u) = (lambda - delta)/(c + delta u) - rate,
//   q(u) = -lambda (rate * A(u) + A'(u)) / (c + delta u),
// where q vanishes for the ruin and deficit penalties and equals
// -lambda e^{-rate u}/(c + delta u) for the claim-causing penalty. Initial
// slope y'(0) = (lambda y(0) - lambda A(0)) / c. See docs/ode-oracle.md.
// Returns an evaluator on [0, u_max] backed by a dense checkpoint grid with
// cubic Hermite interpolation.
inline std::function<double(double)> exponential_ode_oracle(const RiskParams& prm,
                                                            const ClaimModel& model,
                                                            const Penalty& penalty, double u_max,
                                                            double tol = 1e-12) {
    validate(prm);
    if (model.family != ClaimFamily::Exponential)
        throw ConfigError("exponential_ode_oracle: claims must be the exponential family");
    if (prm.alpha != 0.0)
        throw ConfigError("exponential_ode_oracle: only alpha = 0 is supported");
    if (penalty.kind == PenaltyKind::Custom)
        throw ConfigError("exponential_ode_oracle: built-in penalty kinds only");
    if (!(u_max > 0)) throw ConfigError("exponential_ode_oracle: u_max must be positive");
    if (!(tol >= 1e-15 && tol <= 1e-2))
        throw ConfigError("exponential_ode_oracle: tol must be in [1e-15, 1e-2]");

    const double rate = model.rate, c = prm.c, lam = prm.lambda, dlt = prm.delta;
    const bool forced = (penalty.kind == PenaltyKind::ClaimCausingRuin);
    auto rhs = [=](double u, const detail::OdeState& s) {
        double p = (lam - dlt) / (c + dlt * u) - rate;
        double q = forced ? -lam * std::exp(-rate * u) / (c + dlt * u) : 0.0;
        return detail::OdeState{s.dy, p * s.dy + q};
    };

    Phi0Result boundary = phi0(prm, model, penalty);
    detail::OdeState s{boundary.value,
                       (lam * boundary.value - lam * penalty_tail(model, penalty, 0.0)) / c};

    const int n_out = std::clamp(static_cast<int>(std::ceil(u_max / 0.002)), 512, 20000);
    const double h = u_max / n_out;
    auto grid = std::make_shared<std::vector<detail::OdeState>>();
    grid->reserve(n_out + 1);
    grid->push_back(s);
    for (int k = 0; k < n_out; ++k) {
        s = detail::advance(rhs, k * h, s, h, tol, 0);
        grid->push_back(s);
    }

    return [grid, h, u_max, n_out](double u) {
        if (!(u >= 0.0) || !(u <= u_max))
            throw std::domain_error("ode oracle: u outside [0, u_max]");
        int k = std::min(static_cast<int>(u / h), n_out - 1);
        double t = u / h - k;
        const detail::OdeState& a = (*grid)[k];
        const detail::OdeState& b = (*grid)[k + 1];
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * a.y + h10 * h * a.dy + h01 * b.y + h11 * h * b.dy;
    };
}

} // namespace gscol
