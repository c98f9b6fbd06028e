#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "duhamel/field.hpp"
#include "duhamel/grid.hpp"

namespace duhamel::testing {

/// Seeded field with independent Gaussian coefficients on every mode.
inline SpectralField random_field(const GridPtr& grid, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    SpectralField f(grid);
    for (auto& v : f.values()) v = {n(rng), n(rng)};
    return f;
}

/// Random field restricted to modes with every |k_i| <= cutoff.
inline SpectralField band_limited(const GridPtr& grid, int cutoff, std::uint64_t seed, double scale = 1.0) {
    SpectralField f = random_field(grid, seed, scale);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (grid->max_abs_frequency(i) > cutoff) f[i] = 0.0;
    return f;
}

inline double rel_l2(const SpectralField& a, const SpectralField& b) {
    const double s = std::max(l2_norm(a), l2_norm(b));
    return s > 0.0 ? l2_norm(a - b) / s : 0.0;
}

/// Physical field whose samples are fn(x) at the grid coordinates (1-D).
template <typename Fn>
SpectralField sample_1d(const GridPtr& grid, Fn&& fn) {
    SpectralField f(grid, Representation::Physical);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(grid->coordinate(i, 0));
    return f;
}

} // namespace duhamel::testing
