#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "duhamel/error.hpp"
#include "duhamel/field.hpp"
#include "duhamel/symbol.hpp"

namespace duhamel {

enum class EquationKind { Heat, Nls, GinzburgLandau, HalfWave, KgQuadratic, SineGordon, WaveQuadratic };

inline constexpr std::array<std::string_view, 7> kEquationNames{
    "heat", "nls", "ginzburg_landau", "half_wave", "kg_quadratic", "sine_gordon", "wave_quadratic"};

inline EquationKind equation_kind_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kEquationNames.size(); ++i)
        if (kEquationNames[i] == name) return static_cast<EquationKind>(i);
    throw Error(ErrorCode::BadParams, "unknown equation '" + std::string(name) + "'");
}

inline std::string_view to_string(EquationKind kind) { return kEquationNames[static_cast<std::size_t>(kind)]; }

inline bool is_klein_gordon_family(EquationKind k) {
    return k == EquationKind::KgQuadratic || k == EquationKind::SineGordon || k == EquationKind::WaveQuadratic;
}

enum class JacobianMode { Analytic, FiniteDifference };

struct EquationParams {
    Complex alpha{1.0, 0.0}; ///< diffusion/dispersion coefficient D of the Ginzburg-Landau family
    Complex gamma{1.0, 0.0}; ///< reaction coefficient of γu(1-|u|²)
    double mass = 1.0;       ///< Klein-Gordon mass; artificial mass for the wave equation
    int sign = 1;            ///< equation reads i∂ₜu + ℒ... = sign·|u|^{2p}u
    int power = 1;           ///< p in |u|^{2p}u
    JacobianMode jacobian = JacobianMode::Analytic;
};

/// Scalar map z ↦ h(z) applied sample by sample. The batched form avoids an
/// indirect call per sample in the hot loops.
class ScalarMap {
public:
    ScalarMap() = default;
    template <typename Fn>
        requires(std::is_invocable_r_v<Complex, Fn, Complex> && !std::same_as<std::decay_t<Fn>, ScalarMap>)
    ScalarMap(Fn fn)
        : scalar_(fn), batch_([fn](std::span<const Complex> in, std::span<Complex> out) {
              for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
          }) {}

    Complex operator()(Complex z) const { return scalar_(z); }

    /// Physical field of h(v).
    SpectralField operator()(const SpectralField& v) const {
        SpectralField out(v.grid_ptr(), v.representation());
        batch_(v.values(), out.values());
        return out;
    }

private:
    std::function<Complex(Complex)> scalar_;
    std::function<void(std::span<const Complex>, std::span<Complex>)> batch_;
};

/// One term F_j(v)·G_j(w) of the tensorized nonlinearity, with derivatives.
struct NonlinearityComponent {
    ScalarMap f_part;
    ScalarMap f_prime;
    ScalarMap g_part;
    ScalarMap g_prime;
    std::string label;
};

/// f(v,w) = ℬ( Σ_j F_j(v)·G_j(w) ) together with the generator ℒ and 𝒜 = -ℒ + conj(ℒ).
struct EquationSpec {
    std::string name;
    EquationKind kind{};
    GridPtr grid;
    MultiplierSymbol l_symbol;
    MultiplierSymbol a_symbol;
    std::optional<MultiplierSymbol> b_symbol; ///< nullopt means the identity
    std::vector<NonlinearityComponent> components;
    EquationParams params;

    bool is_parabolic() const { return a_symbol.is_zero(); }
};

namespace detail {

inline Complex ipow(Complex z, int n) {
    Complex r(1.0);
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

inline NonlinearityComponent component(ScalarMap f, ScalarMap df, ScalarMap g, ScalarMap dg, std::string label) {
    return {std::move(f), std::move(df), std::move(g), std::move(dg), std::move(label)};
}

inline ScalarMap constant(Complex c) {
    return [c](Complex) { return c; };
}

// Components of -i/4 (v+w)^2 + c (v+w)/2 ... scaled by the Klein-Gordon prefactor.
inline std::vector<NonlinearityComponent> klein_gordon_quadratic(double linear_shift) {
    const Complex I(0.0, 1.0);
    std::vector<NonlinearityComponent> c;
    c.push_back(component([=](Complex v) { return -0.25 * I * v * v; }, [=](Complex v) { return -0.5 * I * v; },
                          constant(1.0), constant(0.0), "-(i/4)v^2 * 1"));
    c.push_back(component(constant(-0.25 * I), constant(0.0), [](Complex w) { return w * w; },
                          [](Complex w) { return 2.0 * w; }, "-(i/4) * w^2"));
    c.push_back(component([=](Complex v) { return -0.5 * I * v; }, constant(-0.5 * I), [](Complex w) { return w; },
                          constant(1.0), "-(i/2)v * w"));
    if (linear_shift != 0.0) {
        const Complex s = -0.5 * I * linear_shift;
        c.push_back(component([=](Complex v) { return s * v; }, constant(s), constant(1.0), constant(0.0),
                              "-(i m^2/2)v * 1"));
        c.push_back(component(constant(s), constant(0.0), [](Complex w) { return w; }, constant(1.0),
                              "-(i m^2/2) * w"));
    }
    return c;
}

} // namespace detail

/// Builds a catalog equation on `grid`.
///
/// heat            ∂ₜu = αΔu + γu(1-|u|²), α>0 and γ real
/// nls             i∂ₜu + Δu = sign·|u|^{2p}u
/// ginzburg_landau ∂ₜu = αΔu + γu(1-|u|²), Re α >= 0
/// half_wave       i∂ₜu + |∇|u = sign·|u|²u
/// kg_quadratic    ∂ₜₜz - Δz + m²z = z²           (first-order complex form)
/// sine_gordon     ∂ₜₜz - Δz + m²z = -sin z
/// wave_quadratic  ∂ₜₜz - Δz = z², shifted by an artificial mass m
inline EquationSpec make_equation(EquationKind kind, const GridPtr& grid, const EquationParams& params = {}) {
    const Complex I(0.0, 1.0);
    const bool torus = grid->kind() == GridKind::PeriodicTorus;
    EquationSpec eq;
    eq.name = std::string(to_string(kind));
    eq.kind = kind;
    eq.grid = grid;
    eq.params = params;

    switch (kind) {
    case EquationKind::Heat:
    case EquationKind::GinzburgLandau: {
        if (kind == EquationKind::Heat) {
            require(params.alpha.imag() == 0.0 && params.alpha.real() > 0.0, ErrorCode::BadParams,
                    "heat needs a real positive diffusion coefficient");
            require(params.gamma.imag() == 0.0, ErrorCode::BadParams, "heat needs a real reaction coefficient");
        }
        require(params.alpha.real() >= 0.0, ErrorCode::BadParams, "Re alpha must be nonnegative");
        eq.l_symbol = symbol_for(OperatorName::AlphaLaplacian, grid, {params.alpha, 0.0});
        const Complex g = params.gamma;
        eq.components.push_back(detail::component([=](Complex v) { return g * v; }, detail::constant(g),
                                                  detail::constant(1.0), detail::constant(0.0), "gamma v * 1"));
        eq.components.push_back(detail::component([=](Complex v) { return -g * v * v; },
                                                  [=](Complex v) { return -2.0 * g * v; },
                                                  [](Complex w) { return w; }, detail::constant(1.0),
                                                  "-gamma v^2 * w"));
        break;
    }
    case EquationKind::Nls:
    case EquationKind::HalfWave: {
        require(params.sign == 1 || params.sign == -1, ErrorCode::BadParams, "sign must be +1 or -1");
        const int p = kind == EquationKind::Nls ? params.power : 1;
        require(p >= 1, ErrorCode::BadParams, "power must be a positive integer");
        require(torus || kind == EquationKind::Nls, ErrorCode::UnsupportedOnBasis,
                "half-wave needs the periodic torus");
        eq.l_symbol = symbol_for(kind == EquationKind::Nls ? OperatorName::ILaplacian : OperatorName::HalfWave, grid);
        const Complex c = -static_cast<double>(params.sign) * I;
        eq.components.push_back(detail::component(
            [=](Complex v) { return c * detail::ipow(v, p + 1); },
            [=](Complex v) { return c * static_cast<double>(p + 1) * detail::ipow(v, p); },
            [=](Complex w) { return detail::ipow(w, p); },
            [=](Complex w) { return static_cast<double>(p) * detail::ipow(w, p - 1); }, "-sign i v^(p+1) * w^p"));
        break;
    }
    case EquationKind::KgQuadratic:
    case EquationKind::SineGordon:
    case EquationKind::WaveQuadratic: {
        require(params.mass != 0.0, ErrorCode::ZeroMass, "Klein-Gordon type equations need m != 0");
        require(torus, ErrorCode::UnsupportedOnBasis, "Klein-Gordon type equations need the periodic torus");
        eq.l_symbol = symbol_for(OperatorName::KgBracket, grid, {1.0, params.mass});
        eq.b_symbol = symbol_for(OperatorName::KgBracketInverse, grid, {1.0, params.mass});
        if (kind == EquationKind::SineGordon) {
            eq.components.push_back(detail::component(
                [=](Complex v) { return I * std::sin(0.5 * v); }, [=](Complex v) { return 0.5 * I * std::cos(0.5 * v); },
                [](Complex w) { return std::cos(0.5 * w); }, [](Complex w) { return -0.5 * std::sin(0.5 * w); },
                "i sin(v/2) * cos(w/2)"));
            eq.components.push_back(detail::component(
                [=](Complex v) { return I * std::cos(0.5 * v); }, [=](Complex v) { return -0.5 * I * std::sin(0.5 * v); },
                [](Complex w) { return std::sin(0.5 * w); }, [](Complex w) { return 0.5 * std::cos(0.5 * w); },
                "i cos(v/2) * sin(w/2)"));
        } else {
            const double shift = kind == EquationKind::WaveQuadratic ? params.mass * params.mass : 0.0;
            eq.components = detail::klein_gordon_quadratic(shift);
        }
        break;
    }
    }
    eq.a_symbol = a_symbol(eq.l_symbol);
    return eq;
}

inline EquationSpec make_equation(std::string_view name, const GridPtr& grid, const EquationParams& params = {}) {
    return make_equation(equation_kind_from_string(name), grid, params);
}

/// ℬ followed by the two-thirds rule, applied to a physical-space sum.
inline SpectralField finish_nonlinear(const EquationSpec& eq, const SpectralField& physical_sum) {
    SpectralField c = to_coefficient(physical_sum);
    if (eq.b_symbol) c = apply(*eq.b_symbol, std::move(c));
    return dealias(std::move(c));
}

/// f(v,w) for independent physical-space arguments v and w.
inline SpectralField eval_tensorized(const EquationSpec& eq, const SpectralField& v_phys, const SpectralField& w_phys) {
    v_phys.check_compatible(w_phys);
    require(!v_phys.is_coefficient(), ErrorCode::RepresentationMismatch, "tensorized form takes physical samples");
    require(v_phys.grid().same_as(*eq.grid), ErrorCode::GridMismatch, "field and equation grids differ");
    SpectralField acc(v_phys.grid_ptr(), Representation::Physical);
    for (const auto& c : eq.components) {
        const SpectralField fv = c.f_part(v_phys);
        const SpectralField gw = c.g_part(w_phys);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += fv[i] * gw[i];
    }
    return finish_nonlinear(eq, acc);
}

/// f(u, ū), returned in coefficients.
inline SpectralField eval_f(const EquationSpec& eq, const SpectralField& u) {
    require(u.is_coefficient(), ErrorCode::RepresentationMismatch, "eval_f expects coefficients");
    require(u.grid().same_as(*eq.grid), ErrorCode::GridMismatch, "field and equation grids differ");
    const SpectralField up = to_physical(u);
    return eval_tensorized(eq, up, conj(up));
}

/// D_slot f(u,ū)·h. Analytic mode differentiates the components; finite
/// difference mode perturbs only the slot's argument of the tensorized form.
inline SpectralField jacobian_action(const EquationSpec& eq, const SpectralField& u, const SpectralField& h, int slot,
                                     std::optional<JacobianMode> mode = std::nullopt) {
    require(slot == 1 || slot == 2, ErrorCode::BadParams, "slot must be 1 or 2");
    require(u.is_coefficient() && h.is_coefficient(), ErrorCode::RepresentationMismatch,
            "jacobian_action expects coefficients");
    require(u.grid().same_as(*eq.grid) && h.grid().same_as(*eq.grid), ErrorCode::GridMismatch,
            "field and equation grids differ");
    const SpectralField up = to_physical(u);
    const SpectralField wp = conj(up);
    const SpectralField hp = to_physical(h);

    if (mode.value_or(eq.params.jacobian) == JacobianMode::FiniteDifference) {
        const double eps = 1e-5 * std::max(1.0, l2_norm(u)) / std::max(1e-30, l2_norm(h));
        SpectralField plus = slot == 1 ? up : wp;
        SpectralField minus = plus;
        for (std::size_t i = 0; i < plus.size(); ++i) {
            plus[i] += eps * hp[i];
            minus[i] -= eps * hp[i];
        }
        SpectralField diff = slot == 1 ? eval_tensorized(eq, plus, wp) - eval_tensorized(eq, minus, wp)
                                       : eval_tensorized(eq, up, plus) - eval_tensorized(eq, up, minus);
        return diff *= Complex(0.5 / eps);
    }

    SpectralField acc(eq.grid, Representation::Physical);
    for (const auto& c : eq.components) {
        const SpectralField a = slot == 1 ? c.f_prime(up) : c.f_part(up);
        const SpectralField b = slot == 1 ? c.g_part(wp) : c.g_prime(wp);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * b[i] * hp[i];
    }
    return finish_nonlinear(eq, acc);
}

/// Real Klein-Gordon state (z, ∂ₜz) in coefficients.
struct KGState {
    SpectralField z;
    SpectralField zt;
    double mass = 1.0;
};

namespace detail {
inline SpectralField real_part_physical(const SpectralField& coeffs) {
    SpectralField p = to_physical(coeffs);
    for (auto& v : p.values()) v = v.real();
    return to_coefficient(p);
}
} // namespace detail

/// u = z - i⟨∇⟩ₘ⁻¹ ∂ₜz
inline SpectralField kg_to_u(const KGState& state) {
    require(state.mass != 0.0, ErrorCode::ZeroMass, "transform needs m != 0");
    const auto inv = symbol_for(OperatorName::KgBracketInverse, state.z.grid_ptr(), {1.0, state.mass});
    return state.z - Complex(0.0, 1.0) * apply(inv, state.zt);
}

/// z = Re u, ∂ₜz = -⟨∇⟩ₘ Im u
inline KGState kg_from_u(const SpectralField& u, double mass) {
    require(mass != 0.0, ErrorCode::ZeroMass, "transform needs m != 0");
    require(u.is_coefficient(), ErrorCode::RepresentationMismatch, "kg_from_u expects coefficients");
    const SpectralField ubar = conj(u);
    const SpectralField re = Complex(0.5) * (u + ubar);
    const SpectralField im = Complex(0.0, -0.5) * (u - ubar);
    const SpectralField zt = Complex(-1.0) * apply(japanese_bracket(u.grid_ptr(), mass), im);
    return {detail::real_part_physical(re), detail::real_part_physical(zt), mass};
}

} // namespace duhamel
