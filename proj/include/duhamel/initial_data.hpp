#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "duhamel/error.hpp"
#include "duhamel/field.hpp"

namespace duhamel {

namespace detail {

// Uniform double in [0,1) from the top 53 bits; mt19937_64 output is fully
// specified, so this is reproducible across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline SpectralField rescaled(SpectralField f, double s, double target_norm) {
    const double n = sobolev_norm(f, s);
    if (n > 0.0) f *= Complex(target_norm / n);
    return f;
}

} // namespace detail

/// Random data sitting in H^gamma but just outside H^{gamma+1/8}:
/// û_k = ⟨k⟩^{-(gamma + d/2 + 1/8)} e^{iθ_k}, rescaled to the requested
/// H^gamma norm. Sine-basis data uses real amplitudes with random signs.
inline SpectralField rough_field(const GridPtr& grid, double gamma, std::uint64_t seed, double target_norm) {
    require(gamma >= 0.0, ErrorCode::BadParams, "gamma must be nonnegative");
    require(target_norm > 0.0, ErrorCode::BadParams, "target_norm must be positive");
    std::mt19937_64 rng(seed);
    const double decay = gamma + 0.5 * grid->dim() + 0.125;
    const bool torus = grid->kind() == GridKind::PeriodicTorus;
    SpectralField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double amp = std::pow(1.0 + grid->k_squared(i), -0.5 * decay);
        const double r = detail::unit_uniform(rng);
        if (torus)
            f[i] = std::polar(amp, 2.0 * std::numbers::pi * r);
        else
            f[i] = r < 0.5 ? -amp : amp;
    }
    return detail::rescaled(std::move(f), gamma, target_norm);
}

/// Band-limited random data: modes with every |k_i| <= cutoff, amplitude
/// ⟨k⟩^{-2} and random phase, rescaled to the requested L² norm.
inline SpectralField smooth_field(const GridPtr& grid, int cutoff, std::uint64_t seed, double target_norm) {
    require(cutoff >= 1, ErrorCode::BadParams, "cutoff must be positive");
    require(target_norm > 0.0, ErrorCode::BadParams, "target_norm must be positive");
    std::mt19937_64 rng(seed);
    const bool torus = grid->kind() == GridKind::PeriodicTorus;
    SpectralField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = detail::unit_uniform(rng);
        if (grid->max_abs_frequency(i) > cutoff) continue;
        const double amp = 1.0 / (1.0 + grid->k_squared(i));
        if (torus)
            f[i] = std::polar(amp, 2.0 * std::numbers::pi * r);
        else
            f[i] = r < 0.5 ? -amp : amp;
    }
    return detail::rescaled(std::move(f), 0.0, target_norm);
}

} // namespace duhamel
