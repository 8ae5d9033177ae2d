#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gscol/errors.hpp"
#include "gscol/quadrature.hpp"
#include "gscol/vie.hpp"

namespace gscol {

// Classical compound-Poisson surplus with premium rate c, claim intensity
// lambda, constant interest force delta on the surplus, and discount rate
// alpha on the penalty. The computational pipeline supports alpha = 0.
struct RiskParams {
    double c = 0;
    double lambda = 0;
    double delta = 0;
    double alpha = 0;
};

inline void validate(const RiskParams& p) {
    if (!(p.c > 0)) throw ConfigError("RiskParams: premium rate c must be positive");
    if (!(p.lambda > 0)) throw ConfigError("RiskParams: claim intensity lambda must be positive");
    if (!(p.delta >= 0)) throw ConfigError("RiskParams: interest force delta must be >= 0");
    if (!(p.alpha >= 0)) throw ConfigError("RiskParams: discount rate alpha must be >= 0");
}

enum class ClaimFamily { Exponential, Erlang2, CombinationOfExponentials, Custom };

// Claim-size distribution on (0, infinity). Built-in families carry closed
// forms for every transform the pipeline needs; Custom falls back to
// quadrature against the supplied density/cdf.
struct ClaimModel {
    ClaimFamily family = ClaimFamily::Custom;
    double rate = 0.0;                      // Exponential, Erlang2
    double w1 = 0, r1 = 0, w2 = 0, r2 = 0;  // CombinationOfExponentials
    std::function<double(double)> density_fn, cdf_fn;
    double mu = 0.0;                        // mean claim size

    static ClaimModel exponential(double rate) {
        if (!(rate > 0)) throw ConfigError("ClaimModel: exponential rate must be positive");
        ClaimModel m;
        m.family = ClaimFamily::Exponential;
        m.rate = rate;
        m.mu = 1.0 / rate;
        return m;
    }

    static ClaimModel erlang2(double rate) {
        if (!(rate > 0)) throw ConfigError("ClaimModel: erlang2 rate must be positive");
        ClaimModel m;
        m.family = ClaimFamily::Erlang2;
        m.rate = rate;
        m.mu = 2.0 / rate;
        return m;
    }

    // Density w1*r1*exp(-r1 x) + w2*r2*exp(-r2 x). Weights must sum to 1 and
    // may be individually negative as long as the density stays nonnegative,
    // which for two terms reduces to sign conditions at x = 0 and x -> inf.
    static ClaimModel combination(double w1, double r1, double w2, double r2) {
        if (!(r1 > 0) || !(r2 > 0)) throw ConfigError("ClaimModel: combination rates must be positive");
        if (std::abs(w1 + w2 - 1.0) > 1e-12)
            throw ConfigError("ClaimModel: combination weights must sum to 1");
        double at_zero = w1 * r1 + w2 * r2;
        double slow_coeff = (r1 < r2) ? w1 * r1 : (r2 < r1 ? w2 * r2 : at_zero);
        if (at_zero < -1e-15 || slow_coeff < -1e-15)
            throw ConfigError("ClaimModel: combination density is negative somewhere");
        ClaimModel m;
        m.family = ClaimFamily::CombinationOfExponentials;
        m.w1 = w1;
        m.r1 = r1;
        m.w2 = w2;
        m.r2 = r2;
        m.mu = w1 / r1 + w2 / r2;
        return m;
    }

    static ClaimModel custom(std::function<double(double)> density,
                             std::function<double(double)> cdf, double mean) {
        if (!density || !cdf) throw ConfigError("ClaimModel: custom model needs density and cdf");
        if (!(mean > 0)) throw ConfigError("ClaimModel: custom mean must be positive");
        ClaimModel m;
        m.family = ClaimFamily::Custom;
        m.density_fn = std::move(density);
        m.cdf_fn = std::move(cdf);
        m.mu = mean;
        return m;
    }
};

inline double density(const ClaimModel& m, double x) {
    if (!(x >= 0)) throw std::domain_error("density: claim sizes are nonnegative");
    switch (m.family) {
        case ClaimFamily::Exponential: return m.rate * std::exp(-m.rate * x);
        case ClaimFamily::Erlang2: return m.rate * m.rate * x * std::exp(-m.rate * x);
        case ClaimFamily::CombinationOfExponentials:
            return m.w1 * m.r1 * std::exp(-m.r1 * x) + m.w2 * m.r2 * std::exp(-m.r2 * x);
        case ClaimFamily::Custom: return m.density_fn(x);
    }
    throw ConfigError("density: unknown claim family");
}

// 1 - F(x)
inline double survival(const ClaimModel& m, double x) {
    if (!(x >= 0)) throw std::domain_error("survival: claim sizes are nonnegative");
    switch (m.family) {
        case ClaimFamily::Exponential: return std::exp(-m.rate * x);
        case ClaimFamily::Erlang2: return (1.0 + m.rate * x) * std::exp(-m.rate * x);
        case ClaimFamily::CombinationOfExponentials:
            return m.w1 * std::exp(-m.r1 * x) + m.w2 * std::exp(-m.r2 * x);
        case ClaimFamily::Custom: return 1.0 - m.cdf_fn(x);
    }
    throw ConfigError("survival: unknown claim family");
}

enum class PenaltyKind { RuinIndicator, ClaimCausingRuin, DeficitAtRuin, Custom };

// Penalty weight w(x, y): x is the surplus immediately before ruin, y the
// deficit at ruin. The callable is always populated so simulation can use it
// uniformly; the kind picks closed forms where they exist.
struct Penalty {
    PenaltyKind kind = PenaltyKind::Custom;
    std::function<double(double, double)> weight;

    static Penalty ruin_indicator() {
        return {PenaltyKind::RuinIndicator, [](double, double) { return 1.0; }};
    }
    static Penalty claim_causing_ruin() {
        return {PenaltyKind::ClaimCausingRuin, [](double x, double y) { return x + y; }};
    }
    static Penalty deficit_at_ruin() {
        return {PenaltyKind::DeficitAtRuin, [](double, double y) { return y; }};
    }
    static Penalty custom(std::function<double(double, double)> w) {
        if (!w) throw ConfigError("Penalty: custom weight must be callable");
        return {PenaltyKind::Custom, std::move(w)};
    }
};

namespace detail {

inline bool has_closed_forms(const ClaimModel& m, const Penalty& p) {
    return m.family != ClaimFamily::Custom && p.kind != PenaltyKind::Custom;
}

// Built-in families as lists of exponential terms where possible.
inline int mixture_terms(const ClaimModel& m, double* w, double* r) {
    if (m.family == ClaimFamily::Exponential) {
        w[0] = 1.0;
        r[0] = m.rate;
        return 1;
    }
    if (m.family == ClaimFamily::CombinationOfExponentials) {
        w[0] = m.w1;
        r[0] = m.r1;
        w[1] = m.w2;
        r[1] = m.r2;
        return 2;
    }
    return 0;
}

inline double second_moment(const ClaimModel& m) {
    switch (m.family) {
        case ClaimFamily::Exponential: return 2.0 / (m.rate * m.rate);
        case ClaimFamily::Erlang2: return 6.0 / (m.rate * m.rate);
        case ClaimFamily::CombinationOfExponentials:
            return 2.0 * (m.w1 / (m.r1 * m.r1) + m.w2 / (m.r2 * m.r2));
        case ClaimFamily::Custom: {
            const GaussRule& rule = gauss_rule(32);
            // E[X^2] = int_0^inf 2 x (1-F(x)) dx
            return integrate_semi_infinite(
                rule, [&m](double x) { return 2.0 * x * survival(m, x); }, 0.0);
        }
    }
    throw ConfigError("second_moment: unknown claim family");
}

} // namespace detail

// Expected penalty against claims exceeding t:
//   A(t) = int_t^inf w(t, s - t) dF(s)
inline double penalty_tail(const ClaimModel& m, const Penalty& p, double t) {
    if (!(t >= 0)) throw std::domain_error("penalty_tail: t must be >= 0");
    if (detail::has_closed_forms(m, p)) {
        double w[2], r[2];
        int k = detail::mixture_terms(m, w, r);
        if (k > 0) {
            double surv = 0.0, tail = 0.0;
            for (int i = 0; i < k; ++i) {
                surv += w[i] * std::exp(-r[i] * t);
                tail += (w[i] / r[i]) * std::exp(-r[i] * t);
            }
            switch (p.kind) {
                case PenaltyKind::RuinIndicator: return surv;
                case PenaltyKind::DeficitAtRuin: return tail;
                default: return t * surv + tail;  // ClaimCausingRuin
            }
        }
        // Erlang2
        double r2 = m.rate, e = std::exp(-r2 * t);
        switch (p.kind) {
            case PenaltyKind::RuinIndicator: return (1.0 + r2 * t) * e;
            case PenaltyKind::DeficitAtRuin: return (t + 2.0 / r2) * e;
            default: return t * (1.0 + r2 * t) * e + (t + 2.0 / r2) * e;
        }
    }
    const GaussRule& rule = gauss_rule(32);
    return integrate_semi_infinite(
        rule, [&](double y) { return p.weight(t, y) * density(m, t + y); }, 0.0);
}

// Total mass int_0^inf A(t) dt; finite for penalties with finite moment needs.
inline double penalty_mass(const ClaimModel& m, const Penalty& p) {
    if (p.kind == PenaltyKind::RuinIndicator) return m.mu;
    if (p.kind == PenaltyKind::DeficitAtRuin && m.family != ClaimFamily::Custom)
        return 0.5 * detail::second_moment(m);
    if (p.kind == PenaltyKind::ClaimCausingRuin && m.family != ClaimFamily::Custom)
        return detail::second_moment(m);
    const GaussRule& rule = gauss_rule(32);
    return integrate_semi_infinite(rule, [&](double t) { return penalty_tail(m, p, t); }, 0.0);
}

// Running integral int_0^u A(t) dt, closed for built-in pairs.
inline double penalty_tail_integral(const ClaimModel& m, const Penalty& p, double u) {
    if (!(u >= 0)) throw std::domain_error("penalty_tail_integral: u must be >= 0");
    if (detail::has_closed_forms(m, p)) {
        double w[2], r[2];
        int k = detail::mixture_terms(m, w, r);
        if (k > 0) {
            double surv_int = 0.0, tail_int = 0.0, t_surv_int = 0.0;
            for (int i = 0; i < k; ++i) {
                double e = std::exp(-r[i] * u);
                surv_int += (w[i] / r[i]) * (1.0 - e);
                tail_int += (w[i] / (r[i] * r[i])) * (1.0 - e);
                t_surv_int += w[i] * (1.0 / (r[i] * r[i]) - e * (u / r[i] + 1.0 / (r[i] * r[i])));
            }
            switch (p.kind) {
                case PenaltyKind::RuinIndicator: return surv_int;
                case PenaltyKind::DeficitAtRuin: return tail_int;
                default: return t_surv_int + tail_int;
            }
        }
        double r2 = m.rate, e = std::exp(-r2 * u);
        switch (p.kind) {
            case PenaltyKind::RuinIndicator: return 2.0 / r2 - e * (u + 2.0 / r2);
            case PenaltyKind::DeficitAtRuin:
                return 3.0 / (r2 * r2) - e * (u / r2 + 3.0 / (r2 * r2));
            default:
                return 6.0 / (r2 * r2) - e * (u * u + 4.0 * u / r2 + 6.0 / (r2 * r2));
        }
    }
    const GaussRule& rule = gauss_rule(32);
    // No precomputation here; build_gs_vie installs a cumulative table for
    // the hot path instead of calling this in a loop.
    double acc = 0.0, step = 1.0;
    for (double lo = 0.0; lo < u; lo += step)
        acc += integrate(rule, [&](double t) { return penalty_tail(m, p, t); }, lo,
                         std::min(lo + step, u));
    return acc;
}

// Normalized Laplace transform of the survival function:
//   (1/mu) int_0^inf exp(-s x) (1 - F(x)) dx, equal to 1 at s = 0.
inline double survival_transform(const ClaimModel& m, double s) {
    if (!(s >= 0)) throw std::domain_error("survival_transform: s must be >= 0");
    switch (m.family) {
        case ClaimFamily::Exponential: return m.rate / (s + m.rate);
        case ClaimFamily::Erlang2: {
            double r = m.rate, d = s + r;
            return 0.5 * r * (s + 2.0 * r) / (d * d);
        }
        case ClaimFamily::CombinationOfExponentials:
            return (m.w1 / (s + m.r1) + m.w2 / (s + m.r2)) / m.mu;
        case ClaimFamily::Custom: {
            const GaussRule& rule = gauss_rule(32);
            return integrate_semi_infinite(
                       rule, [&](double x) { return std::exp(-s * x) * survival(m, x); }, 0.0) /
                   m.mu;
        }
    }
    throw ConfigError("survival_transform: unknown claim family");
}

// Normalized Laplace transform of the penalty tail:
//   (1/m_A) int_0^inf exp(-s x) A(x) dx, equal to 1 at s = 0.
inline double penalty_transform(const ClaimModel& m, const Penalty& p, double s) {
    if (!(s >= 0)) throw std::domain_error("penalty_transform: s must be >= 0");
    if (detail::has_closed_forms(m, p)) {
        double w[2], r[2];
        int k = detail::mixture_terms(m, w, r);
        double raw = 0.0;
        if (k > 0) {
            for (int i = 0; i < k; ++i) {
                double d = s + r[i];
                switch (p.kind) {
                    case PenaltyKind::RuinIndicator: raw += w[i] / d; break;
                    case PenaltyKind::DeficitAtRuin: raw += (w[i] / r[i]) / d; break;
                    default: raw += w[i] / (d * d) + (w[i] / r[i]) / d; break;
                }
            }
        } else {
            double r2 = m.rate, d = s + r2;
            switch (p.kind) {
                case PenaltyKind::RuinIndicator: raw = 1.0 / d + r2 / (d * d); break;
                case PenaltyKind::DeficitAtRuin: raw = 1.0 / (d * d) + (2.0 / r2) / d; break;
                default:
                    raw = 2.0 / (d * d) + 2.0 * r2 / (d * d * d) + (2.0 / r2) / d;
                    break;
            }
        }
        return raw / penalty_mass(m, p);
    }
    const GaussRule& rule = gauss_rule(32);
    double raw = integrate_semi_infinite(
        rule, [&](double x) { return std::exp(-s * x) * penalty_tail(m, p, x); }, 0.0);
    return raw / penalty_mass(m, p);
}

// Volterra kernel of the defining equation, for 0 <= t <= u:
//   K(u, t) = (delta + alpha + lambda (1 - F(u - t))) / (c + delta u)
inline double gs_kernel(const RiskParams& prm, const ClaimModel& m, double u, double t) {
    if (!(t >= 0) || !(u >= t)) throw std::domain_error("gs_kernel: need 0 <= t <= u");
    return (prm.delta + prm.alpha + prm.lambda * survival(m, u - t)) / (prm.c + prm.delta * u);
}

// Forcing term with the boundary value already known:
//   g(u) = (c phi0 - lambda int_0^u A(t) dt) / (c + delta u)
inline double gs_forcing(const RiskParams& prm, const ClaimModel& m, const Penalty& p,
                         double phi0_value, double u) {
    if (prm.alpha != 0.0)
        throw ConfigError("gs_forcing: only alpha = 0 is supported by the pipeline");
    return (prm.c * phi0_value - prm.lambda * penalty_tail_integral(m, p, u)) /
           (prm.c + prm.delta * u);
}

namespace detail {

// Prefix integrals of a smooth nonnegative function over fixed-width panels;
// evaluation closes the partial panel with the same Gauss rule. Built once
// per problem so the forcing stays cheap during assembly.
class CumulativeTable {
  public:
    CumulativeTable(std::function<double(double)> f, double T, int panels, int q)
        : f_(std::move(f)), width_(T / panels), rule_(&gauss_rule(q)) {
        prefix_.resize(panels + 1);
        prefix_[0] = 0.0;
        for (int k = 0; k < panels; ++k)
            prefix_[k + 1] = prefix_[k] + integrate(*rule_, f_, k * width_, (k + 1) * width_);
    }

    double operator()(double u) const {
        int k = std::min(static_cast<int>(u / width_), static_cast<int>(prefix_.size()) - 2);
        k = std::max(k, 0);
        return prefix_[k] + integrate(*rule_, f_, k * width_, u);
    }

  private:
    std::function<double(double)> f_;
    double width_;
    const GaussRule* rule_;
    std::vector<double> prefix_;
};

} // namespace detail

// Assemble the Volterra problem for the expected-penalty function on [0, T].
// phi0_value is the boundary value at u = 0 (see boundary_value.hpp).
inline VieProblem build_gs_vie(const RiskParams& prm, const ClaimModel& m, const Penalty& p,
                               double phi0_value, double T) {
    validate(prm);
    if (prm.alpha != 0.0)
        throw ConfigError("build_gs_vie: only alpha = 0 is supported by the pipeline");
    if (!(prm.c > prm.lambda * m.mu))
        throw ConfigError("build_gs_vie: positive loading c > lambda * mu required");
    if (!(T > 0)) throw ConfigError("build_gs_vie: T must be positive");

    VieProblem problem;
    problem.T = T;
    problem.kernel = [prm, m](double u, double t) { return gs_kernel(prm, m, u, t); };
    if (detail::has_closed_forms(m, p)) {
        problem.forcing = [prm, m, p, phi0_value](double u) {
            return gs_forcing(prm, m, p, phi0_value, u);
        };
    } else {
        auto table = std::make_shared<detail::CumulativeTable>(
            [m, p](double t) { return penalty_tail(m, p, t); }, T, 4096, 16);
        problem.forcing = [prm, table, phi0_value](double u) {
            return (prm.c * phi0_value - prm.lambda * (*table)(u)) / (prm.c + prm.delta * u);
        };
    }
    return problem;
}

} // namespace gscol
