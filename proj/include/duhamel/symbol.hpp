#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "duhamel/error.hpp"
#include "duhamel/field.hpp"
#include "duhamel/grid.hpp"

namespace duhamel {

/// Diagonal operator given by one complex value per mode.
class MultiplierSymbol {
public:
    MultiplierSymbol() = default;
    MultiplierSymbol(GridPtr grid, std::vector<Complex> values) : grid_(std::move(grid)), values_(std::move(values)) {
        require(values_.size() == grid_->size(), ErrorCode::GridMismatch, "symbol length does not match grid");
    }

    /// Builds σ(k) from the frequency vector of each mode.
    template <typename Fn>
    static MultiplierSymbol from_function(GridPtr grid, Fn&& fn) {
        std::vector<Complex> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->frequencies(i), grid->k_squared(i));
        return MultiplierSymbol(std::move(grid), std::move(v));
    }

    static MultiplierSymbol zero(GridPtr grid) {
        const std::size_t n = grid->size();
        return MultiplierSymbol(std::move(grid), std::vector<Complex>(n, 0.0));
    }

    const GridPtr& grid_ptr() const { return grid_; }
    const Grid& grid() const { return *grid_; }
    std::size_t size() const { return values_.size(); }
    const Complex& operator[](std::size_t i) const { return values_[i]; }
    std::span<const Complex> values() const { return values_; }

    bool is_dissipative() const {
        for (const auto& v : values_)
            if (v.real() > 0.0) return false;
        return true;
    }
    bool is_skew() const {
        for (const auto& v : values_)
            if (v.real() != 0.0) return false;
        return true;
    }
    /// σ(-k) = σ(k) for every mode (always true on the sine basis).
    bool is_even() const {
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] != values_[grid_->mirror(i)]) return false;
        return true;
    }
    bool is_zero() const {
        for (const auto& v : values_)
            if (v != Complex(0.0)) return false;
        return true;
    }

    MultiplierSymbol inverse() const {
        std::vector<Complex> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / values_[i];
        return MultiplierSymbol(grid_, std::move(v));
    }

    MultiplierSymbol scaled(Complex s) const {
        std::vector<Complex> v(values_);
        for (auto& x : v) x *= s;
        return MultiplierSymbol(grid_, std::move(v));
    }

    /// Symbol of the composition: pointwise function of σ.
    template <typename Fn>
    MultiplierSymbol map(Fn&& fn) const {
        std::vector<Complex> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(values_[i]);
        return MultiplierSymbol(grid_, std::move(v));
    }

private:
    GridPtr grid_;
    std::vector<Complex> values_;
};

inline SpectralField apply(const MultiplierSymbol& symbol, SpectralField field) {
    require(field.is_coefficient(), ErrorCode::RepresentationMismatch, "multipliers act on coefficients");
    require(symbol.grid().same_as(field.grid()), ErrorCode::GridMismatch, "symbol and field grids differ");
    for (std::size_t i = 0; i < field.size(); ++i) field[i] *= symbol[i];
    return field;
}

enum class OperatorName { Laplacian, AlphaLaplacian, ILaplacian, HalfWave, KgBracket, KgBracketInverse };

inline OperatorName operator_from_string(std::string_view name) {
    if (name == "laplacian") return OperatorName::Laplacian;
    if (name == "alpha_laplacian") return OperatorName::AlphaLaplacian;
    if (name == "i_laplacian") return OperatorName::ILaplacian;
    if (name == "half_wave") return OperatorName::HalfWave;
    if (name == "kg_bracket") return OperatorName::KgBracket;
    if (name == "kg_bracket_inverse") return OperatorName::KgBracketInverse;
    throw Error(ErrorCode::BadParams, "unknown operator '" + std::string(name) + "'");
}

struct SymbolParams {
    Complex alpha{1.0, 0.0};
    double mass = 1.0;
};

/// Catalog of the diagonal operators used by the equations.
inline MultiplierSymbol symbol_for(OperatorName name, const GridPtr& grid, const SymbolParams& params = {}) {
    const bool torus = grid->kind() == GridKind::PeriodicTorus;
    const Complex I(0.0, 1.0);
    switch (name) {
    case OperatorName::Laplacian:
        return MultiplierSymbol::from_function(grid, [](auto, double k2) { return Complex(-k2); });
    case OperatorName::AlphaLaplacian:
        return MultiplierSymbol::from_function(grid, [&](auto, double k2) { return -params.alpha * k2; });
    case OperatorName::ILaplacian:
        return MultiplierSymbol::from_function(grid, [&](auto, double k2) { return -I * k2; });
    default: break;
    }
    require(torus, ErrorCode::UnsupportedOnBasis, "only Laplacian-type operators live on the sine basis");
    const double m2 = params.mass * params.mass;
    switch (name) {
    case OperatorName::HalfWave:
        return MultiplierSymbol::from_function(grid, [&](auto, double k2) { return I * std::sqrt(k2); });
    case OperatorName::KgBracket:
        return MultiplierSymbol::from_function(grid, [&](auto, double k2) { return I * std::sqrt(k2 + m2); });
    case OperatorName::KgBracketInverse:
        require(params.mass != 0.0, ErrorCode::ZeroMass, "the inverse bracket needs a nonzero mass");
        return MultiplierSymbol::from_function(grid, [&](auto, double k2) { return Complex(1.0 / std::sqrt(k2 + m2)); });
    default: break;
    }
    throw Error(ErrorCode::BadParams, "unhandled operator");
}

/// Real symbol √(|k|² + m²).
inline MultiplierSymbol japanese_bracket(const GridPtr& grid, double mass) {
    const double m2 = mass * mass;
    return MultiplierSymbol::from_function(grid, [&](auto, double k2) { return Complex(std::sqrt(k2 + m2)); });
}

/// Symbol of -L + conj(L): σ_A(k) = -σ_L(k) + conj(σ_L(k)), which is skew.
/// Only even symbols are accepted, since then conj(L) has symbol conj(σ_L(k)).
inline MultiplierSymbol a_symbol(const MultiplierSymbol& l_symbol) {
    require(l_symbol.is_even(), ErrorCode::NonEvenSymbol, "conjugate operator is only formed for even symbols");
    return l_symbol.map([](Complex s) { return Complex(0.0, -2.0 * s.imag()); });
}

/// Multiplies each coefficient by exp(t σ(k)).
inline SpectralField propagate(const MultiplierSymbol& symbol, double t, SpectralField field) {
    require(field.is_coefficient(), ErrorCode::RepresentationMismatch, "propagation acts on coefficients");
    require(t >= 0.0 || symbol.is_skew(), ErrorCode::NegativeTimeForSemigroup,
            "backward propagation of a dissipative semigroup");
    require(symbol.grid().same_as(field.grid()), ErrorCode::GridMismatch, "symbol and field grids differ");
    if (t == 0.0) return field;
    for (std::size_t i = 0; i < field.size(); ++i) field[i] *= std::exp(t * symbol[i]);
    return field;
}

} // namespace duhamel
