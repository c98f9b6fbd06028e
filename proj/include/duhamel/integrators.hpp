#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "duhamel/equations.hpp"
#include "duhamel/error.hpp"
#include "duhamel/field.hpp"
#include "duhamel/phi.hpp"
#include "duhamel/symbol.hpp"

namespace duhamel {

enum class SchemeId { Duhamel1, Duhamel2, ExpEuler, LieSplitting, StrangSplitting, FilteredLie };

inline constexpr std::array<std::string_view, 6> kSchemeNames{"duhamel1", "duhamel2", "exp-euler",
                                                              "lie",      "strang",   "filtered-lie"};

inline std::string_view to_string(SchemeId id) { return kSchemeNames[static_cast<std::size_t>(id)]; }

inline SchemeId scheme_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kSchemeNames.size(); ++i)
        if (kSchemeNames[i] == name) return static_cast<SchemeId>(i);
    if (name == "exp_euler") return SchemeId::ExpEuler;
    if (name == "filtered_lie") return SchemeId::FilteredLie;
    throw Error(ErrorCode::BadParams, "unknown scheme '" + std::string(name) + "'");
}

enum class SplittingVariant { Lie, Strang };

/// Whether `scheme` can be applied to `eq`.
inline bool supports(const EquationSpec& eq, SchemeId scheme) {
    if (scheme == SchemeId::FilteredLie) return eq.kind == EquationKind::Nls && eq.params.power == 1;
    return true;
}

namespace detail {

inline void check_finite(const SpectralField& u, const char* scheme) {
    require(all_finite(u), ErrorCode::NonFiniteState, std::string(scheme) + " produced a non-finite coefficient");
}

// ∫₀ᵗ |u(s)|² ds for the logistic modulus of ∂ₜu = γu(1-|u|²), with a = Re γ.
inline double logistic_mass_integral(double rho0, double a, double t) {
    const double x = 2.0 * a * t;
    if (std::abs(x) < 1e-12) return rho0 * t;
    return std::log1p(rho0 * std::expm1(x)) / (2.0 * a);
}

} // namespace detail

/// Exact flow of ∂ₜu = Σ F_j(u)G_j(ū) sample by sample, for the equations
/// whose pointwise flow has a closed form (heat, Ginzburg-Landau, NLS, half-wave).
inline SpectralField pointwise_flow(const EquationSpec& eq, const SpectralField& u_phys, double tau) {
    require(!u_phys.is_coefficient(), ErrorCode::RepresentationMismatch, "pointwise flow acts on physical samples");
    switch (eq.kind) {
    case EquationKind::Nls:
    case EquationKind::HalfWave: {
        const int p = eq.kind == EquationKind::Nls ? eq.params.power : 1;
        const Complex c(0.0, -static_cast<double>(eq.params.sign) * tau);
        return pointwise(u_phys, [&](Complex v) { return v * std::exp(c * std::pow(std::norm(v), p)); });
    }
    case EquationKind::Heat:
    case EquationKind::GinzburgLandau: {
        const Complex g = eq.params.gamma;
        return pointwise(u_phys, [&](Complex v) {
            const double m = detail::logistic_mass_integral(std::norm(v), g.real(), tau);
            return v * std::exp(g * (tau - m));
        });
    }
    default: break;
    }
    throw Error(ErrorCode::UnsupportedEquation, "no closed-form pointwise flow for " + eq.name);
}

inline bool has_closed_form_flow(EquationKind kind) {
    return kind == EquationKind::Nls || kind == EquationKind::HalfWave || kind == EquationKind::Heat ||
           kind == EquationKind::GinzburgLandau;
}

/// Four classical RK4 substeps on the dealiased right-hand side u' = f(u,ū).
inline SpectralField rk4_flow(const EquationSpec& eq, const SpectralField& u, double tau, int substeps = 4) {
    const double h = tau / substeps;
    SpectralField v = u;
    for (int s = 0; s < substeps; ++s) {
        const SpectralField k1 = eval_f(eq, v);
        const SpectralField k2 = eval_f(eq, v + (0.5 * h) * k1);
        const SpectralField k3 = eval_f(eq, v + (0.5 * h) * k2);
        const SpectralField k4 = eval_f(eq, v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
    }
    return v;
}

/// Flow of ∂ₜu = f(u,ū) over time tau: the closed-form pointwise flow with
/// its increment dealiased where one exists, otherwise RK4 substeps.
inline SpectralField nonlinear_flow(const EquationSpec& eq, const SpectralField& u, double tau) {
    if (eq.components.empty()) return u;
    if (is_klein_gordon_family(eq.kind)) {
        // f(u,ū) depends only on Re u and is purely imaginary in physical
        // space, so the flow is the straight line u + τf(u).
        return u + tau * eval_f(eq, u);
    }
    if (!has_closed_form_flow(eq.kind)) return rk4_flow(eq, u, tau);
    SpectralField inc = to_coefficient(pointwise_flow(eq, to_physical(u), tau)) - u;
    return u + dealias(std::move(inc));
}

/// Reusable one-step map for a fixed (equation, scheme, τ); all τ-dependent
/// multipliers are tabulated once.
class Stepper {
public:
    Stepper(EquationSpec eq, SchemeId scheme, double tau) : eq_(std::move(eq)), scheme_(scheme), tau_(tau) {
        require(tau > 0.0, ErrorCode::BadParams, "tau must be positive");
        require(supports(eq_, scheme_), ErrorCode::UnsupportedEquation,
                std::string(to_string(scheme_)) + " does not support " + eq_.name);
        a_zero_ = eq_.a_symbol.is_zero();
        exp_l_ = eq_.l_symbol.map([&](Complex s) { return std::exp(tau * s); });
        exp_l_half_ = eq_.l_symbol.map([&](Complex s) { return std::exp(0.5 * tau * s); });
        if (!a_zero_) {
            phi1_ = phi_symbol(1, eq_.a_symbol, tau);
            exp_a_ = eq_.a_symbol.map([&](Complex s) { return std::exp(tau * s); });
            exp_minus_a_ = eq_.a_symbol.map([&](Complex s) { return std::exp(-tau * s); });
        }
        phi2_ = a_zero_ ? MultiplierSymbol::from_function(eq_.grid, [](auto, double) { return Complex(0.5); })
                        : phi_symbol(2, eq_.a_symbol, tau);
    }

    const EquationSpec& equation() const { return eq_; }
    SchemeId scheme() const { return scheme_; }
    double tau() const { return tau_; }

    /// One step without the finiteness check.
    SpectralField advance(const SpectralField& u) const {
        require(u.is_coefficient(), ErrorCode::RepresentationMismatch, "steppers take coefficients");
        require(u.grid().same_as(*eq_.grid), ErrorCode::GridMismatch, "field and equation grids differ");
        switch (scheme_) {
        case SchemeId::Duhamel1: return duhamel1(u);
        case SchemeId::Duhamel2: return duhamel2(u);
        case SchemeId::ExpEuler: return apply(exp_l_, u + tau_ * eval_f(eq_, u));
        case SchemeId::LieSplitting: return apply(exp_l_, nonlinear_flow(u));
        case SchemeId::StrangSplitting:
            return apply(exp_l_half_, nonlinear_flow(apply(exp_l_half_, u)));
        case SchemeId::FilteredLie: return filtered_lie(u);
        }
        throw Error(ErrorCode::BadParams, "unhandled scheme");
    }

    SpectralField step(const SpectralField& u) const {
        SpectralField out = advance(u);
        detail::check_finite(out, kSchemeNames[static_cast<std::size_t>(scheme_)].data());
        return out;
    }

    /// Flow of ∂ₜu = f(u,ū) over one step.
    SpectralField nonlinear_flow(const SpectralField& u) const { return duhamel::nonlinear_flow(eq_, u, tau_); }

private:
    // Σ_j F_j(v)·M[G_j(w)] in physical space; M = identity when `filter` is null.
    SpectralField filtered_sum(const SpectralField& v, const SpectralField& w, const MultiplierSymbol* filter) const {
        SpectralField acc(eq_.grid, Representation::Physical);
        for (const auto& c : eq_.components) {
            SpectralField g = c.g_part(w);
            if (filter) g = to_physical(apply(*filter, to_coefficient(g)));
            const SpectralField fv = c.f_part(v);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += fv[i] * g[i];
        }
        return acc;
    }

    SpectralField duhamel1(const SpectralField& u) const {
        const SpectralField up = to_physical(u);
        const SpectralField nl = finish_nonlinear(eq_, filtered_sum(up, conj(up), a_zero_ ? nullptr : &phi1_));
        return apply(exp_l_, u + tau_ * nl);
    }

    SpectralField duhamel2(const SpectralField& u) const {
        const SpectralField up = to_physical(u);
        const SpectralField wp = conj(up);

        // τ(T2 + T3) share the outer e^{τℒ}; both are gathered in physical space.
        SpectralField inner = filtered_sum(up, wp, a_zero_ ? nullptr : &phi1_);
        if (!a_zero_) {
            const SpectralField wa = to_physical(apply(exp_a_, conj(u)));
            for (const auto& c : eq_.components) {
                SpectralField d = apply(exp_minus_a_, to_coefficient(c.g_part(wa)));
                d -= to_coefficient(c.g_part(wp));
                const SpectralField dp = to_physical(apply(phi2_, std::move(d)));
                const SpectralField fv = c.f_part(up);
                for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += fv[i] * dp[i];
            }
        }
        SpectralField outer = tau_ * finish_nonlinear(eq_, inner);

        // τ T4 = τ[ ℬ(F(e^{τℒ}u)·φ₂G(e^{τℒ}ū)) - e^{τℒ}ℬ(F(u)·φ₂G(ū)) ]
        const SpectralField u1 = to_physical(apply(exp_l_, u));
        const SpectralField w1 = to_physical(apply(exp_l_, conj(u)));
        const SpectralField shifted = finish_nonlinear(eq_, filtered_sum(u1, w1, &phi2_));
        outer -= tau_ * finish_nonlinear(eq_, filtered_sum(up, wp, &phi2_));

        // T5 = (τ²/2) e^{τℒ}(D₁f·f + D₂f·f̄)
        const SpectralField f = finish_nonlinear(eq_, filtered_sum(up, wp, nullptr));
        outer += (0.5 * tau_ * tau_) * (jacobian_action(eq_, u, f, 1) + jacobian_action(eq_, u, conj(f), 2));

        return apply(exp_l_, u + outer) + tau_ * shifted;
    }

    SpectralField filtered_lie(const SpectralField& u) const {
        const SpectralField up = to_physical(u);
        const SpectralField wf = a_zero_ ? conj(up) : to_physical(apply(phi1_, conj(u)));
        const Complex c(0.0, -static_cast<double>(eq_.params.sign) * tau_);
        SpectralField moved(eq_.grid, Representation::Physical);
        for (std::size_t i = 0; i < up.size(); ++i) moved[i] = std::exp(c * up[i] * wf[i]) * up[i];
        SpectralField inc = to_coefficient(moved) - u;
        return apply(exp_l_, u + dealias(std::move(inc)));
    }

    EquationSpec eq_;
    SchemeId scheme_;
    double tau_;
    bool a_zero_ = false;
    MultiplierSymbol exp_l_, exp_l_half_, phi1_, phi2_, exp_a_, exp_minus_a_;
};

inline SpectralField step_duhamel1(const EquationSpec& eq, const SpectralField& u, double tau) {
    return Stepper(eq, SchemeId::Duhamel1, tau).step(u);
}

inline SpectralField step_duhamel2(const EquationSpec& eq, const SpectralField& u, double tau) {
    return Stepper(eq, SchemeId::Duhamel2, tau).step(u);
}

inline SpectralField step_exp_euler(const EquationSpec& eq, const SpectralField& u, double tau) {
    return Stepper(eq, SchemeId::ExpEuler, tau).step(u);
}

inline SpectralField step_splitting(const EquationSpec& eq, const SpectralField& u, double tau,
                                    SplittingVariant variant) {
    return Stepper(eq, variant == SplittingVariant::Lie ? SchemeId::LieSplitting : SchemeId::StrangSplitting, tau)
        .step(u);
}

inline SpectralField step_filtered_lie(const EquationSpec& eq, const SpectralField& u, double tau) {
    return Stepper(eq, SchemeId::FilteredLie, tau).step(u);
}

inline SpectralField step(const EquationSpec& eq, SchemeId scheme, const SpectralField& u, double tau) {
    return Stepper(eq, scheme, tau).step(u);
}

inline constexpr double kBlowUpThreshold = 1e8;

struct StepDiagnostics {
    double l2_norm = 0.0;
    double max_coefficient = 0.0;
};

struct Trajectory {
    double tau = 0.0;
    std::vector<double> times;
    std::vector<std::pair<double, SpectralField>> snapshots;
    SpectralField final;
    std::vector<StepDiagnostics> diagnostics;
};

/// Called after every step with the step index (1-based) and the new state.
using StepObserver = std::function<void(std::size_t, const SpectralField&)>;

/// Number of uniform steps of size tau that reach t_end.
inline std::size_t step_count(double tau, double t_end) {
    require(tau > 0.0, ErrorCode::BadParams, "tau must be positive");
    require(t_end >= 0.0, ErrorCode::BadParams, "t_end must be nonnegative");
    const double n = std::round(t_end / tau);
    require(std::abs(n * tau - t_end) <= 1e-12 * std::max(1.0, t_end), ErrorCode::BadParams,
            "t_end is not an integer multiple of tau");
    require(n <= 1e7, ErrorCode::BadParams, "more than 1e7 steps requested");
    return static_cast<std::size_t>(n);
}

inline Trajectory evolve(const Stepper& stepper, const SpectralField& u0, double t_end,
                         const std::vector<double>& snapshot_times = {}, const StepObserver& observer = {}) {
    const double tau = stepper.tau();
    const std::size_t n = step_count(tau, t_end);
    std::vector<std::size_t> snap_steps;
    for (double t : snapshot_times) snap_steps.push_back(step_count(tau, t));

    Trajectory traj;
    traj.tau = tau;
    traj.times.reserve(n + 1);
    traj.diagnostics.reserve(n);
    traj.times.push_back(0.0);
    auto record = [&](std::size_t k, const SpectralField& u) {
        for (std::size_t i = 0; i < snap_steps.size(); ++i)
            if (snap_steps[i] == k) traj.snapshots.emplace_back(snapshot_times[i], u);
    };
    SpectralField u = u0;
    record(0, u);
    for (std::size_t k = 1; k <= n; ++k) {
        u = stepper.advance(u);
        const double m = max_abs(u);
        if (!all_finite(u) || !(m <= kBlowUpThreshold))
            throw BlowUpError(k, std::string(to_string(stepper.scheme())) + " blew up on " +
                                     stepper.equation().name + " at step " + std::to_string(k));
        traj.times.push_back(static_cast<double>(k) * tau);
        traj.diagnostics.push_back({l2_norm(u), m});
        record(k, u);
        if (observer) observer(k, u);
    }
    traj.final = std::move(u);
    return traj;
}

inline Trajectory evolve(const EquationSpec& eq, SchemeId scheme, const SpectralField& u0, double tau, double t_end,
                         const std::vector<double>& snapshot_times = {}, const StepObserver& observer = {}) {
    return evolve(Stepper(eq, scheme, tau), u0, t_end, snapshot_times, observer);
}

} // namespace duhamel
