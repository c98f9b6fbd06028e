#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "duhamel/equations.hpp"
#include "duhamel/error.hpp"
#include "duhamel/field.hpp"
#include "duhamel/integrators.hpp"
#include "duhamel/symbol.hpp"

namespace duhamel {

/// H(v₁,…,vₙ) on physical samples.
using MultiMap = std::function<SpectralField(const std::vector<SpectralField>&)>;
/// (v, h) ↦ DᵢH(v)·h on physical samples.
using DirectionalMap = std::function<SpectralField(const std::vector<SpectralField>&, const SpectralField&)>;
/// (v, h, k) ↦ D²ᵢⱼH(v)[h, k] on physical samples.
using SecondDirectionalMap =
    std::function<SpectralField(const std::vector<SpectralField>&, const SpectralField&, const SpectralField&)>;

struct CommutatorInput {
    MultiMap h;
    std::vector<DirectionalMap> derivatives;
    /// Optional n×n table; when empty, commutator2 needs `finite_difference_fallback`.
    std::vector<std::vector<SecondDirectionalMap>> second_derivatives;
    MultiplierSymbol l;
    std::vector<SpectralField> args; ///< coefficients
    bool finite_difference_fallback = false;
};

namespace detail {

inline void check_arity(const CommutatorInput& in) {
    require(static_cast<bool>(in.h), ErrorCode::ArityMismatch, "commutator needs a value map");
    require(in.derivatives.size() == in.args.size(), ErrorCode::ArityMismatch,
            "one derivative map is needed per argument");
    for (const auto& a : in.args) {
        require(a.is_coefficient(), ErrorCode::RepresentationMismatch, "commutator arguments are coefficients");
        require(a.grid().same_as(in.l.grid()), ErrorCode::GridMismatch, "argument and symbol grids differ");
    }
}

inline std::vector<SpectralField> physical_all(const std::vector<SpectralField>& args) {
    std::vector<SpectralField> out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back(to_physical(a));
    return out;
}

inline SpectralField apply_physical(const MultiplierSymbol& l, const SpectralField& phys) {
    return to_physical(apply(l, to_coefficient(phys)));
}

// 𝒞[H,L](v) without the final projection, in coefficients.
inline SpectralField raw_commutator(const CommutatorInput& in, const std::vector<SpectralField>& args) {
    const auto v = physical_all(args);
    SpectralField out = Complex(-1.0) * apply(in.l, to_coefficient(in.h(v)));
    for (std::size_t i = 0; i < v.size(); ++i)
        out += to_coefficient(in.derivatives[i](v, to_physical(apply(in.l, args[i]))));
    return out;
}

} // namespace detail

/// 𝒞[H,L](v) = -L(H(v)) + Σᵢ DᵢH(v)·(L vᵢ), dealiased.
inline SpectralField commutator(const CommutatorInput& in) {
    detail::check_arity(in);
    return dealias(detail::raw_commutator(in, in.args));
}

/// 𝒞[𝒞[H,L],L](v). With second-derivative maps the outer derivative is
/// expanded exactly:
///   Dⱼ𝒞(v)·k = -L DⱼH(v)k + Σᵢ D²ᵢⱼH(v)[Lvᵢ, k] + DⱼH(v)[Lk];
/// otherwise Dⱼ𝒞 is taken by central differences of 𝒞 itself.
inline SpectralField commutator2(const CommutatorInput& in) {
    detail::check_arity(in);
    const std::size_t n = in.args.size();
    const bool exact = !in.second_derivatives.empty();
    if (exact) {
        require(in.second_derivatives.size() == n, ErrorCode::ArityMismatch, "second derivatives must be n×n");
        for (const auto& row : in.second_derivatives)
            require(row.size() == n, ErrorCode::ArityMismatch, "second derivatives must be n×n");
    } else {
        require(in.finite_difference_fallback, ErrorCode::MissingSecondDerivatives,
                "commutator2 needs second-derivative maps or the finite-difference fallback");
    }

    const auto v = detail::physical_all(in.args);
    std::vector<SpectralField> lv, lv_phys, llv_phys;
    for (const auto& a : in.args) {
        lv.push_back(apply(in.l, a));
        lv_phys.push_back(to_physical(lv.back()));
        llv_phys.push_back(to_physical(apply(in.l, lv.back())));
    }

    SpectralField out = Complex(-1.0) * apply(in.l, detail::raw_commutator(in, in.args));
    for (std::size_t j = 0; j < n; ++j) {
        if (exact) {
            out -= apply(in.l, to_coefficient(in.derivatives[j](v, lv_phys[j])));
            SpectralField acc = in.derivatives[j](v, llv_phys[j]);
            for (std::size_t i = 0; i < n; ++i) acc += in.second_derivatives[i][j](v, lv_phys[i], lv_phys[j]);
            out += to_coefficient(acc);
        } else {
            const double eps =
                1e-5 * std::max(1.0, l2_norm(in.args[j])) / std::max(1e-30, l2_norm(lv[j]));
            auto plus = in.args, minus = in.args;
            plus[j] += eps * lv[j];
            minus[j] -= eps * lv[j];
            out += Complex(0.5 / eps) * (detail::raw_commutator(in, plus) - detail::raw_commutator(in, minus));
        }
    }
    return dealias(std::move(out));
}

/// Symbol i·k_axis of ∂_axis on a torus grid.
inline MultiplierSymbol derivative_symbol(const GridPtr& grid, int axis) {
    require(grid->kind() == GridKind::PeriodicTorus, ErrorCode::UnsupportedOnBasis, "gradients need the torus");
    require(axis >= 0 && axis < grid->dim(), ErrorCode::InvalidDim, "axis out of range");
    return MultiplierSymbol::from_function(grid, [axis](const auto& k, double) {
        return Complex(0.0, static_cast<double>(k[static_cast<std::size_t>(axis)]));
    });
}

/// γD·(4v ∇v·∇w + 2(∇v·∇v) w), gradients spectral, products pointwise, dealiased.
inline SpectralField nls_commutator_closed_form(const SpectralField& v, const SpectralField& w, Complex gamma_d) {
    v.check_compatible(w);
    require(v.is_coefficient(), ErrorCode::RepresentationMismatch, "closed form takes coefficients");
    const GridPtr& g = v.grid_ptr();
    const SpectralField vp = to_physical(v);
    const SpectralField wp = to_physical(w);
    SpectralField vv(g, Representation::Physical), vw(g, Representation::Physical);
    for (int a = 0; a < g->dim(); ++a) {
        const auto d = derivative_symbol(g, a);
        const SpectralField dv = to_physical(apply(d, v));
        const SpectralField dw = to_physical(apply(d, w));
        for (std::size_t i = 0; i < vv.size(); ++i) {
            vv[i] += dv[i] * dv[i];
            vw[i] += dv[i] * dw[i];
        }
    }
    SpectralField out(g, Representation::Physical);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gamma_d * (4.0 * vp[i] * vw[i] + 2.0 * vv[i] * wp[i]);
    return dealias(to_coefficient(out));
}

struct OrderSample {
    double tau = 0.0;
    double error = 0.0;
    bool operator==(const OrderSample&) const = default;
};

struct OrderFit {
    std::vector<OrderSample> samples;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    bool operator==(const OrderFit&) const = default;
};

/// Least-squares line through (log τ, log error).
inline OrderFit fit_order(std::vector<OrderSample> samples) {
    require(samples.size() >= 3, ErrorCode::TooFewSamples, "an order fit needs at least 3 samples");
    for (const auto& s : samples)
        require(s.error > 0.0 && s.tau > 0.0, ErrorCode::NonPositiveError, "errors and step sizes must be positive");
    const double n = static_cast<double>(samples.size());
    double mx = 0.0, my = 0.0;
    for (const auto& s : samples) {
        mx += std::log(s.tau);
        my += std::log(s.error);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
        const double dx = std::log(s.tau) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(s.error) - my);
    }
    require(sxx > 0.0, ErrorCode::DegenerateFit, "all step sizes coincide");
    OrderFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double r2 = 0.0;
    for (const auto& s : samples) {
        const double d = std::log(s.error) - (fit.intercept + fit.slope * std::log(s.tau));
        r2 += d * d;
    }
    fit.residual = std::sqrt(r2 / n);
    fit.samples = std::move(samples);
    return fit;
}

/// Default error norm index per equation: H¹ for the Klein-Gordon family, L² otherwise.
inline double default_norm_index(const EquationSpec& eq) { return is_klein_gordon_family(eq.kind) ? 1.0 : 0.0; }

inline constexpr int kProbeReferenceSubsteps = 64;

/// One step of size tau resolved by 64 Strang substeps.
inline SpectralField reference_one_step(const EquationSpec& eq, const SpectralField& u, double tau) {
    const SchemeId ref = supports(eq, SchemeId::StrangSplitting) ? SchemeId::StrangSplitting : SchemeId::Duhamel2;
    const Stepper stepper(eq, ref, tau / kProbeReferenceSubsteps);
    SpectralField v = u;
    for (int s = 0; s < kProbeReferenceSubsteps; ++s) v = stepper.step(v);
    return v;
}

/// Measures the one-step defect ‖Φ_τ(u) - reference(τ,u)‖_{H^s} over tau_list and fits its order.
inline OrderFit local_error_probe(const EquationSpec& eq, SchemeId scheme, const SpectralField& u,
                                  const std::vector<double>& tau_list, std::optional<double> norm_index = {}) {
    require(tau_list.size() >= 4, ErrorCode::TooFewSamples, "a probe needs at least 4 step sizes");
    const double s = norm_index.value_or(default_norm_index(eq));
    std::vector<OrderSample> samples;
    bool any_above_floor = false;
    for (double tau : tau_list) {
        const double err = sobolev_norm(step(eq, scheme, u, tau) - reference_one_step(eq, u, tau), s);
        any_above_floor = any_above_floor || err >= 1e-14;
        samples.push_back({tau, err});
    }
    require(any_above_floor, ErrorCode::DegenerateFit, "all one-step defects are below 1e-14");
    return fit_order(std::move(samples));
}

} // namespace duhamel
