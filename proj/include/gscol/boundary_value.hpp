#pragma once

#include <cmath>
#include <vector>

#include "gscol/errors.hpp"
#include "gscol/quadrature.hpp"
#include "gscol/risk_model.hpp"

namespace gscol {

struct Phi0Result {
    double value = 0;             // expected penalty started from zero surplus
    double kappa_delta = 0;       // normalizing constant; ruin case uses (kappa-1)/kappa
    double truncation_point = 0;  // where the outer integrand fell below 1e-16 relative
    double est_abs_error = 0;     // quadrature refinement + truncation estimate
};

namespace detail {

// Exponent of the outer integrand:
//   inner(z) = -c z + lambda mu int_0^z survival_transform(delta s) ds.
// Built-in families use the closed antiderivative; Custom builds a cumulative
// ladder once per object (uniform head cells, then geometrically spaced
// checkpoints, cubic Hermite with exact slopes in between). Instances are
// cheap to evaluate but not meant to be shared across threads.
class InnerExponent {
  public:
    InnerExponent(const RiskParams& prm, const ClaimModel& model) : prm_(prm), model_(model) {}

    double operator()(double z) const {
        if (!(z >= 0)) throw std::domain_error("inner_exponent: z must be >= 0");
        const double c = prm_.c, lam = prm_.lambda, d = prm_.delta;
        if (d == 0.0) return -(c - lam * model_.mu) * z;
        switch (model_.family) {
            case ClaimFamily::Exponential:
                return -c * z + (lam / d) * std::log1p(d * z / model_.rate);
            case ClaimFamily::Erlang2: {
                double r = model_.rate;
                return -c * z + (lam / d) * (std::log1p(d * z / r) + 1.0 - r / (d * z + r));
            }
            case ClaimFamily::CombinationOfExponentials:
                return -c * z + (lam / d) * (model_.w1 * std::log1p(d * z / model_.r1) +
                                             model_.w2 * std::log1p(d * z / model_.r2));
            case ClaimFamily::Custom:
                return -c * z + lam * model_.mu * ladder_eval(d * z) / d;
        }
        throw ConfigError("inner_exponent: unknown claim family");
    }

  private:
    // Cumulative Xi(v) = int_0^v survival_transform(model, x) dx on a lazily
    // extended checkpoint ladder; slopes are exact transform values.
    double ladder_eval(double v) const {
        if (v == 0.0) return 0.0;
        extend(v);
        std::size_t lo = 0, hi = vs_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (vs_[mid] <= v ? lo : hi) = mid;
        }
        double va = vs_[lo], vb = vs_[lo + 1], w = vb - va;
        double t = (v - va) / w;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * xi_[lo] + h10 * w * slope_[lo] + h01 * xi_[lo + 1] + h11 * w * slope_[lo + 1];
    }

    void extend(double v_target) const {
        auto f = [this](double x) { return survival_transform(model_, x); };
        if (vs_.empty()) {
            vs_.push_back(0.0);
            xi_.push_back(0.0);
            slope_.push_back(f(0.0));
            // uniform head cells over [0, 1/64]
            for (int k = 1; k <= 64; ++k) push(k * (1.0 / 4096.0), f);
        }
        while (vs_.back() < v_target) push(vs_.back() * kLadderRatio, f);
    }

    template <class F>
    void push(double v, const F& f) const {
        xi_.push_back(xi_.back() + integrate(gauss_rule(32), f, vs_.back(), v));
        vs_.push_back(v);
        slope_.push_back(f(v));
    }

    static constexpr double kLadderRatio = 1.0013547198921082;  // 2^(1/512)

    RiskParams prm_;
    ClaimModel model_;
    mutable std::vector<double> vs_, xi_, slope_;
};

struct OuterIntegral {
    double value = 0;
    double z_star = 0;
    double rel_refine = 0;  // relative change of the last panel-halving pass
};

// Integral over [0, inf) of weight(z) * exp(inner(z)) by width-1 Gauss panels,
// truncated where the exponential factor drops below 1e-16 of the running
// total, then refined by panel halving until the total changes by < 1e-13.
template <class W>
OuterIntegral integrate_outer(const InnerExponent& inner, W&& weight) {
    const GaussRule& rule = gauss_rule(32);
    auto f = [&](double z) { return weight(z) * std::exp(inner(z)); };

    OuterIntegral out;
    double total = 0.0, z = 0.0;
    while (true) {
        total += integrate(rule, f, z, z + 1.0);
        z += 1.0;
        if (z >= 4.0 && std::exp(inner(z)) < 1e-16 * std::max(std::abs(total), 1e-300)) break;
        if (z >= 1e4)
            throw ConvergenceError("integrate_outer: integrand does not decay before z = 1e4");
    }
    out.z_star = z;

    double width = 1.0, prev = total;
    for (int pass = 0;; ++pass) {
        if (pass == 6)
            throw ConvergenceError("integrate_outer: panel refinement failed to settle at 1e-13");
        width *= 0.5;
        double refined = 0.0;
        long long panels = static_cast<long long>(std::ceil(z / width));
        for (long long k = 0; k < panels; ++k)
            refined += integrate(rule, f, k * width, std::min((k + 1) * width, z));
        out.rel_refine = std::abs(refined - prev) / std::max(std::abs(refined), 1e-300);
        prev = refined;
        if (out.rel_refine < 1e-13) break;
    }
    out.value = prev;
    return out;
}

inline void validate_boundary_inputs(const RiskParams& prm, const ClaimModel& model) {
    validate(prm);
    if (prm.alpha != 0.0)
        throw ConfigError("boundary value: only alpha = 0 is supported by the pipeline");
    if (!(prm.c > prm.lambda * model.mu))
        throw ConfigError("boundary value: positive loading c > lambda * mu required");
}

} // namespace detail

inline double inner_exponent(const RiskParams& prm, const ClaimModel& model, double z) {
    detail::validate_boundary_inputs(prm, model);
    return detail::InnerExponent(prm, model)(z);
}

// kappa = c int_0^inf exp(inner(z)) dz; equals c / (c - lambda mu) at delta = 0
// and decreases toward 1 as delta grows.
inline double kappa_delta(const RiskParams& prm, const ClaimModel& model) {
    detail::validate_boundary_inputs(prm, model);
    detail::InnerExponent inner(prm, model);
    return prm.c * detail::integrate_outer(inner, [](double) { return 1.0; }).value;
}

// Boundary value of the expected-penalty function at zero initial surplus:
//   phi0 = (lambda / kappa) int_0^inf Ahat(delta z) exp(inner(z)) dz
// with Ahat the unnormalized Laplace transform of the penalty tail. For the
// ruin indicator the identity phi0 = (kappa - 1) / kappa is used as the
// returned value and the general route must agree with it to 1e-9.
inline Phi0Result phi0(const RiskParams& prm, const ClaimModel& model, const Penalty& penalty) {
    detail::validate_boundary_inputs(prm, model);
    detail::InnerExponent inner(prm, model);

    auto base = detail::integrate_outer(inner, [](double) { return 1.0; });
    double kappa = prm.c * base.value;

    double mass = penalty_mass(model, penalty);
    auto weighted = detail::integrate_outer(inner, [&](double z) {
        return mass * penalty_transform(model, penalty, prm.delta * z);
    });
    double general = prm.lambda * weighted.value / kappa;

    Phi0Result out;
    out.kappa_delta = kappa;
    out.truncation_point = std::max(base.z_star, weighted.z_star);
    if (penalty.kind == PenaltyKind::RuinIndicator) {
        double shortcut = (kappa - 1.0) / kappa;
        if (std::abs(general - shortcut) > 1e-9 * std::max(1.0, std::abs(shortcut)))
            throw NumericalError("phi0: ruin shortcut and general route disagree beyond 1e-9");
        out.value = shortcut;
    } else {
        out.value = general;
    }
    out.est_abs_error =
        std::abs(out.value) * (base.rel_refine + weighted.rel_refine + 1e-15) + 1e-300;
    return out;
}

} // namespace gscol
