#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "duhamel/error.hpp"
#include "duhamel/grid.hpp"

namespace duhamel {

enum class Representation { Coefficient, Physical };
enum class Direction { ToPhysical, ToCoefficient };

/// A state vector on a grid, held either as spectral coefficients or as
/// physical samples. Value type: copies are deep and independent.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(GridPtr grid, Representation rep = Representation::Coefficient)
        : grid_(std::move(grid)), values_(grid_->size()), rep_(rep) {}
    SpectralField(GridPtr grid, std::vector<Complex> values, Representation rep)
        : grid_(std::move(grid)), values_(std::move(values)), rep_(rep) {
        require(values_.size() == grid_->size(), ErrorCode::GridMismatch,
                "value count does not match the grid");
    }

    const GridPtr& grid_ptr() const { return grid_; }
    const Grid& grid() const { return *grid_; }
    Representation representation() const { return rep_; }
    bool is_coefficient() const { return rep_ == Representation::Coefficient; }

    std::size_t size() const { return values_.size(); }
    std::span<Complex> values() & { return values_; }
    std::span<const Complex> values() const& { return values_; }
    /// A span into a temporary would dangle.
    std::span<const Complex> values() const&& = delete;
    Complex& operator[](std::size_t i) { return values_[i]; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }

    bool compatible_with(const SpectralField& other) const {
        return grid_ && other.grid_ && grid_->same_as(*other.grid_) && rep_ == other.rep_;
    }

    SpectralField& operator+=(const SpectralField& other) {
        check_compatible(other);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& other) {
        check_compatible(other);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }
    SpectralField& operator*=(Complex s) {
        for (auto& v : values_) v *= s;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, Complex s) { return a *= s; }

    void check_compatible(const SpectralField& other) const {
        require(grid_ && other.grid_ && grid_->same_as(*other.grid_), ErrorCode::GridMismatch,
                "fields live on different grids");
        require(rep_ == other.rep_, ErrorCode::RepresentationMismatch,
                "fields are in different representations");
    }

private:
    GridPtr grid_;
    std::vector<Complex> values_;
    Representation rep_ = Representation::Coefficient;
};

inline SpectralField transform(const SpectralField& field, Direction direction) {
    const bool to_phys = direction == Direction::ToPhysical;
    require(field.is_coefficient() == to_phys, ErrorCode::RepresentationMismatch,
            to_phys ? "field is already physical" : "field is already in coefficients");
    SpectralField out(field.grid_ptr(), to_phys ? Representation::Physical : Representation::Coefficient);
    if (to_phys)
        field.grid().backward(field.values(), out.values());
    else
        field.grid().forward(field.values(), out.values());
    return out;
}

inline SpectralField to_physical(const SpectralField& f) { return transform(f, Direction::ToPhysical); }
inline SpectralField to_coefficient(const SpectralField& f) { return transform(f, Direction::ToCoefficient); }

/// Complex conjugate of the represented function. In coefficient space this
/// maps the torus coefficient at k to the conjugate of the one at -k; sine
/// coefficients are conjugated in place.
inline SpectralField conj(const SpectralField& field) {
    SpectralField out(field.grid_ptr(), field.representation());
    const Grid& g = field.grid();
    const bool mirror = field.is_coefficient() && g.kind() == GridKind::PeriodicTorus;
    for (std::size_t i = 0; i < field.size(); ++i)
        out[i] = std::conj(field[mirror ? g.mirror(i) : i]);
    return out;
}

/// Pointwise product of two physical fields.
inline SpectralField multiply(const SpectralField& a, const SpectralField& b) {
    a.check_compatible(b);
    require(!a.is_coefficient(), ErrorCode::RepresentationMismatch, "products are formed in physical space");
    SpectralField out(a.grid_ptr(), Representation::Physical);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

/// Applies a scalar map sample by sample; the field must be physical.
template <typename Fn>
SpectralField pointwise(const SpectralField& field, Fn&& fn) {
    require(!field.is_coefficient(), ErrorCode::RepresentationMismatch, "pointwise maps act on physical samples");
    SpectralField out(field.grid_ptr(), Representation::Physical);
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = fn(field[i]);
    return out;
}

/// ( Σ_k (1+|k|²)^s |û_k|² )^{1/2}
inline double sobolev_norm(const SpectralField& field, double s) {
    require(field.is_coefficient(), ErrorCode::RepresentationMismatch, "Sobolev norms need coefficients");
    const Grid& g = field.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double w = s == 0.0 ? 1.0 : std::pow(1.0 + g.k_squared(i), s);
        acc += w * std::norm(field[i]);
    }
    return std::sqrt(acc);
}

inline double l2_norm(const SpectralField& field) {
    double acc = 0.0;
    for (const auto& v : field.values()) acc += std::norm(v);
    return std::sqrt(acc);
}

inline double max_abs(const SpectralField& field) {
    double m = 0.0;
    for (const auto& v : field.values()) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const SpectralField& field) {
    return std::all_of(field.values().begin(), field.values().end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

/// Largest frequency magnitude kept by the two-thirds rule.
inline int dealias_cutoff(const Grid& g) { return (2 * g.resolved_frequency()) / 3; }

/// Two-thirds rule: zero every mode with some |k_i| above the cutoff.
inline SpectralField dealias(SpectralField field) {
    require(field.is_coefficient(), ErrorCode::RepresentationMismatch, "dealiasing acts on coefficients");
    const Grid& g = field.grid();
    const int cutoff = dealias_cutoff(g);
    for (std::size_t i = 0; i < field.size(); ++i)
        if (g.max_abs_frequency(i) > cutoff) field[i] = 0.0;
    return field;
}

/// Moves coefficients onto another grid of the same kind and dimension,
/// zero-padding or truncating by frequency.
inline SpectralField resample(const SpectralField& field, const GridPtr& target) {
    require(field.is_coefficient(), ErrorCode::RepresentationMismatch, "resampling acts on coefficients");
    const Grid& src = field.grid();
    require(src.kind() == target->kind() && src.dim() == target->dim(), ErrorCode::GridMismatch,
            "resampling needs the same grid kind and dimension");
    // Unitary coefficients scale with the square root of the sample count.
    const bool torus = src.kind() == GridKind::PeriodicTorus;
    const double scale = torus ? std::sqrt(static_cast<double>(target->size()) / static_cast<double>(src.size()))
                               : std::sqrt((target->modes_per_dim() + 1.0) / (src.modes_per_dim() + 1.0));
    const int half = target->modes_per_dim() / 2;
    SpectralField out(target, Representation::Coefficient);
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (field[i] == Complex(0.0)) continue;
        std::size_t idx = 0;
        bool fits = true;
        for (int a = 0; a < src.dim(); ++a) {
            const int k = src.frequency(i, a);
            int slot = 0;
            if (torus) {
                fits = fits && k >= -half && k < half;
                slot = k >= 0 ? k : k + target->modes_per_dim();
            } else {
                fits = fits && k <= target->modes_per_dim();
                slot = k - 1;
            }
            idx = idx * static_cast<std::size_t>(target->modes_per_dim()) + static_cast<std::size_t>(slot);
        }
        if (fits) out[idx] = field[i] * scale;
    }
    return out;
}

} // namespace duhamel
