#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "duhamel/analysis.hpp"
#include "duhamel/equations.hpp"
#include "duhamel/initial_data.hpp"
#include "duhamel/integrators.hpp"
#include "duhamel/phi.hpp"
#include "duhamel/symbol.hpp"

namespace duhamel::harness {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
};

namespace detail {

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
    const double s = std::max(l2_norm(a), l2_norm(b));
    return s > 0.0 ? l2_norm(a - b) / s : 0.0;
}

inline CheckResult at_most(std::string name, double measured, double threshold) {
    return {std::move(name), measured <= threshold, measured, threshold};
}

// Exponential Runge-Kutta step of the parabolic case, written out directly.
inline SpectralField exp_rk_step(const EquationSpec& eq, const SpectralField& u, double tau) {
    auto E = [&](const SpectralField& v) { return propagate(eq.l_symbol, tau, v); };
    const SpectralField f = eval_f(eq, u);
    const SpectralField f_shift = eval_f(eq, E(u));
    const SpectralField jac = jacobian_action(eq, u, f, 1) + jacobian_action(eq, u, conj(f), 2);
    return E(u) + tau * E(f) + (0.5 * tau) * (f_shift - E(f)) + (0.5 * tau * tau) * E(jac);
}

} // namespace detail

/// Exact-tolerance identities: parabolic collapse, filter collapse,
/// unitarity, contraction and the φ-function recurrences.
inline std::vector<CheckResult> structural_checks() {
    std::vector<CheckResult> out;
    const auto grid = make_grid(GridKind::PeriodicTorus, 1, 64);

    {
        EquationParams p;
        p.alpha = 0.5;
        p.gamma = 1.0;
        const auto heat = make_equation(EquationKind::Heat, grid, p);
        const auto u = rough_field(grid, 1.0, 7, 4.0);
        double d1 = 0.0, d2 = 0.0;
        for (double tau : {0.1, 0.01, 1e-3}) {
            d1 = std::max(d1, detail::rel_diff(step_duhamel1(heat, u, tau), step_exp_euler(heat, u, tau)));
            d2 = std::max(d2, detail::rel_diff(step_duhamel2(heat, u, tau), detail::exp_rk_step(heat, u, tau)));
        }
        out.push_back(detail::at_most("parabolic collapse: duhamel1 = exponential Euler (heat)", d1, 1e-13));
        out.push_back(detail::at_most("parabolic collapse: duhamel2 = exponential Runge-Kutta (heat)", d2, 1e-13));
    }
    {
        auto nls = make_equation(EquationKind::Nls, grid);
        nls.a_symbol = MultiplierSymbol::zero(grid);
        const auto u = rough_field(grid, 1.0, 11, 4.0);
        double d = 0.0;
        for (double tau : {0.1, 0.01})
            d = std::max(d, detail::rel_diff(step_filtered_lie(nls, u, tau),
                                             step_splitting(nls, u, tau, SplittingVariant::Lie)));
        out.push_back(detail::at_most("filtered Lie with A = 0 equals Lie splitting", d, 1e-13));
    }
    {
        const auto nls = make_equation(EquationKind::Nls, grid);
        const auto u = rough_field(grid, 0.5, 13, 4.0);
        double d = 0.0;
        for (double t : {-3.0, -0.1, 0.01, 0.7, 25.0})
            d = std::max(d, std::abs(l2_norm(propagate(nls.a_symbol, t, u)) - l2_norm(u)) / l2_norm(u));
        out.push_back(detail::at_most("e^{tA} is unitary", d, 1e-12));
    }
    {
        EquationParams p;
        p.alpha = Complex(1.0, 1.0);
        const auto gl = make_equation(EquationKind::GinzburgLandau, grid, p);
        const auto u = rough_field(grid, 0.5, 17, 4.0);
        double growth = 0.0;
        for (double t : {1e-4, 0.01, 0.5, 3.0})
            growth = std::max(growth, l2_norm(propagate(gl.l_symbol, t, u)) / l2_norm(u) - 1.0);
        out.push_back(detail::at_most("e^{tL} contracts for a dissipative symbol", std::max(growth, 0.0), 1e-14));
    }
    {
        double e1 = 0.0, e2 = 0.0;
        for (int i = -60; i <= 60; ++i) {
            const double mag = std::pow(10.0, std::abs(i) / 10.0 - 3.0);
            const Complex z(0.0, i < 0 ? -mag : (i == 0 ? 0.0 : mag));
            const Complex ez = std::exp(z);
            e1 = std::max(e1, std::abs(z * phi1(z) - (ez - 1.0)));
            e2 = std::max(e2, std::abs(z * phi2(z) - (ez - phi1(z))));
        }
        out.push_back(detail::at_most("z phi1(z) = e^z - 1 on the imaginary axis", e1, 1e-13));
        out.push_back(detail::at_most("z phi2(z) = e^z - phi1(z) on the imaginary axis", e2, 1e-13));
    }
    return out;
}

/// Largest relative L² gap between the generic commutator of
/// H(v,w) = -γ v²w with L = DΔ and the closed-form NLS commutator, over
/// `fields` seeded pairs of smooth fields. Products are formed on a grid of
/// twice the size so that no cubic term aliases.
inline double nls_commutator_gap(int fields = 20, int dim = 2, int modes = 32) {
    const Complex gamma(0.7, 0.2), diffusion(1.0, 0.5);
    const auto grid = make_grid(GridKind::PeriodicTorus, dim, modes);
    const auto fine = make_grid(GridKind::PeriodicTorus, dim, 2 * modes);
    const auto l = symbol_for(OperatorName::AlphaLaplacian, fine, {diffusion, 0.0});
    const Complex c = -gamma;

    CommutatorInput in;
    in.l = l;
    in.h = [c](const std::vector<SpectralField>& v) {
        SpectralField out(v[0].grid_ptr(), Representation::Physical);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * v[0][i] * v[0][i] * v[1][i];
        return out;
    };
    in.derivatives = {
        [c](const std::vector<SpectralField>& v, const SpectralField& h) {
            SpectralField out(h.grid_ptr(), Representation::Physical);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2.0 * c * v[0][i] * v[1][i] * h[i];
            return out;
        },
        [c](const std::vector<SpectralField>& v, const SpectralField& h) {
            SpectralField out(h.grid_ptr(), Representation::Physical);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * v[0][i] * v[0][i] * h[i];
            return out;
        }};

    double worst = 0.0;
    for (int k = 0; k < fields; ++k) {
        const auto seed = static_cast<std::uint64_t>(1000 + 2 * k);
        const SpectralField v = resample(smooth_field(grid, modes / 4, seed, 3.0), fine);
        const SpectralField w = resample(smooth_field(grid, modes / 4, seed + 1, 3.0), fine);
        in.args = {v, w};
        const SpectralField generic = commutator(in);
        const SpectralField closed = nls_commutator_closed_form(v, w, gamma * diffusion);
        worst = std::max(worst, detail::rel_diff(generic, closed));
    }
    return worst;
}

inline std::vector<CheckResult> commutator_checks() {
    return {detail::at_most("NLS commutator: generic evaluator = closed form (20 fields)", nls_commutator_gap(), 1e-10)};
}

} // namespace duhamel::harness
