#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "duhamel/error.hpp"
#include "duhamel/field.hpp"
#include "duhamel/symbol.hpp"

namespace duhamel {

namespace detail {

inline constexpr double kPhiSeriesRadius = 1.0;
inline constexpr std::size_t kPhiSeriesDegree = 20;

// φ₁(z) = Σ zⁿ/(n+1)!,  φ₂(z) = Σ zⁿ/(n!(n+2))
inline constexpr auto phi_series_coefficients(int order) {
    std::array<double, kPhiSeriesDegree + 1> c{};
    double factorial = 1.0;
    for (std::size_t n = 0; n <= kPhiSeriesDegree; ++n) {
        if (n > 0) factorial *= static_cast<double>(n);
        c[n] = order == 1 ? 1.0 / (factorial * static_cast<double>(n + 1))
                          : 1.0 / (factorial * static_cast<double>(n + 2));
    }
    return c;
}

inline Complex horner(const std::array<double, kPhiSeriesDegree + 1>& c, Complex z) {
    Complex acc = c[kPhiSeriesDegree];
    for (std::size_t n = kPhiSeriesDegree; n-- > 0;) acc = acc * z + c[n];
    return acc;
}

// e^z - 1 without cancellation for small |z|.
inline Complex expm1(Complex z) {
    const double x = z.real(), y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

} // namespace detail

/// φ₁(z) = (e^z - 1)/z, with φ₁(0) = 1.
inline Complex phi1(Complex z) {
    static const auto coeffs = detail::phi_series_coefficients(1);
    if (std::abs(z) < detail::kPhiSeriesRadius) return detail::horner(coeffs, z);
    return detail::expm1(z) / z;
}

/// φ₂(z) = (e^z - φ₁(z))/z, with φ₂(0) = 1/2.
inline Complex phi2(Complex z) {
    static const auto coeffs = detail::phi_series_coefficients(2);
    if (std::abs(z) < detail::kPhiSeriesRadius) return detail::horner(coeffs, z);
    return (std::exp(z) - phi1(z)) / z;
}

inline Complex phi(int order, Complex z) {
    require(order == 1 || order == 2, ErrorCode::InvalidOrder, "phi order must be 1 or 2");
    return order == 1 ? phi1(z) : phi2(z);
}

/// Multiplier φ_order(τ σ_A(k)).
inline MultiplierSymbol phi_symbol(int order, const MultiplierSymbol& symbol_a, double tau) {
    require(order == 1 || order == 2, ErrorCode::InvalidOrder, "phi order must be 1 or 2");
    require(symbol_a.is_skew(), ErrorCode::NonSkewSymbol, "phi functions are applied to skew generators");
    return symbol_a.map([&](Complex s) { return phi(order, tau * s); });
}

inline SpectralField phi_apply(int order, const MultiplierSymbol& symbol_a, double tau, const SpectralField& field) {
    return apply(phi_symbol(order, symbol_a, tau), field);
}

} // namespace duhamel
