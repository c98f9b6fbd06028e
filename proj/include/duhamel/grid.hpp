#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "duhamel/error.hpp"

namespace duhamel {

using Complex = std::complex<double>;

enum class GridKind { PeriodicTorus, DirichletInterval };

inline std::string to_string(GridKind kind) {
    return kind == GridKind::PeriodicTorus ? "torus" : "dirichlet";
}

namespace detail {
// FFTW's planner is not reentrant; execution on caller-supplied arrays is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Discretization of the spatial domain together with its transform plans.
///
/// Torus grids sample [0,2π)^d at N points per axis and index modes in FFT
/// order, so storage slot j on an axis carries frequency j for j < N/2 and
/// j - N otherwise. Dirichlet grids sample (0,π) at x_j = jπ/(N+1) and carry
/// sine modes k = 1..N. Grids are immutable once built and are shared between
/// fields through std::shared_ptr.
class Grid {
public:
    Grid(GridKind kind, int dim, int modes_per_dim) : kind_(kind), dim_(dim), n_(modes_per_dim) {
        require(dim >= 1 && dim <= 3, ErrorCode::InvalidDim, "dim must be 1, 2 or 3");
        require(modes_per_dim >= 8 && (modes_per_dim & (modes_per_dim - 1)) == 0,
                ErrorCode::InvalidModeCount, "modes_per_dim must be a power of two >= 8");
        require(kind == GridKind::PeriodicTorus || dim == 1, ErrorCode::KindDimMismatch,
                "Dirichlet interval grids are one-dimensional");
        size_ = 1;
        for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(n_);
        build_tables();
        build_plans();
    }

    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    ~Grid() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        for (auto& p : plans_)
            for (fftw_plan q : {p.forward, p.backward, p.sine})
                if (q) fftw_destroy_plan(q);
    }

    GridKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int modes_per_dim() const { return n_; }
    std::size_t size() const { return size_; }

    /// Signed frequency of storage slot `index` along `axis`.
    int frequency(std::size_t index, int axis) const {
        return freq_[index * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)];
    }
    std::array<int, 3> frequencies(std::size_t index) const {
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < dim_; ++a) k[static_cast<std::size_t>(a)] = frequency(index, a);
        return k;
    }
    double k_squared(std::size_t index) const { return k2_[index]; }
    int max_abs_frequency(std::size_t index) const { return kmax_[index]; }
    /// Slot holding frequency -k (modulo N). Dirichlet grids map to themselves.
    std::size_t mirror(std::size_t index) const { return mirror_[index]; }
    /// Largest resolvable frequency magnitude per axis.
    int resolved_frequency() const { return kind_ == GridKind::PeriodicTorus ? n_ / 2 : n_; }

    /// Physical coordinate of sample `index` along `axis`.
    double coordinate(std::size_t index, int axis) const {
        const std::size_t j = axis_slot(index, axis);
        if (kind_ == GridKind::PeriodicTorus) return 2.0 * std::numbers::pi * static_cast<double>(j) / n_;
        return std::numbers::pi * static_cast<double>(j + 1) / (n_ + 1);
    }

    bool same_as(const Grid& other) const {
        return kind_ == other.kind_ && dim_ == other.dim_ && n_ == other.n_;
    }

    /// Physical samples -> coefficients (unitary normalization).
    void forward(std::span<const Complex> in, std::span<Complex> out) const { execute(in, out, true); }
    /// Coefficients -> physical samples (unitary normalization).
    void backward(std::span<const Complex> in, std::span<Complex> out) const { execute(in, out, false); }

private:
    std::size_t axis_slot(std::size_t index, int axis) const {
        std::size_t stride = 1;
        for (int a = dim_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(n_);
        return (index / stride) % static_cast<std::size_t>(n_);
    }

    void build_tables() {
        const auto D = static_cast<std::size_t>(dim_);
        freq_.resize(size_ * D);
        k2_.resize(size_);
        kmax_.resize(size_);
        mirror_.resize(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            double k2 = 0.0;
            int kmax = 0;
            std::size_t mirror = 0;
            for (int a = 0; a < dim_; ++a) {
                const std::size_t j = axis_slot(i, a);
                int k = 0;
                std::size_t mj = j;
                if (kind_ == GridKind::PeriodicTorus) {
                    k = j < static_cast<std::size_t>(n_ / 2) ? static_cast<int>(j) : static_cast<int>(j) - n_;
                    mj = (static_cast<std::size_t>(n_) - j) % static_cast<std::size_t>(n_);
                } else {
                    k = static_cast<int>(j) + 1;
                }
                freq_[i * D + static_cast<std::size_t>(a)] = k;
                k2 += static_cast<double>(k) * k;
                kmax = std::max(kmax, std::abs(k));
                mirror = mirror * static_cast<std::size_t>(n_) + mj;
            }
            k2_[i] = k2;
            kmax_[i] = kmax;
            mirror_[i] = mirror;
        }
    }

    void build_plans() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        // Plans made on aligned arrays may use SIMD codelets; the unaligned set
        // serves arrays that do not share FFTW's alignment.
        const std::size_t len = kind_ == GridKind::PeriodicTorus ? size_ : 2 * (size_ + 1);
        auto* a = static_cast<double*>(fftw_malloc(2 * len * sizeof(double)));
        auto* b = static_cast<double*>(fftw_malloc(2 * len * sizeof(double)));
        for (int s = 0; s < 2; ++s) {
            const unsigned flags = s == 0 ? FFTW_ESTIMATE : FFTW_ESTIMATE | FFTW_UNALIGNED;
            Plans& p = plans_[s];
            if (kind_ == GridKind::PeriodicTorus) {
                std::array<int, 3> dims{n_, n_, n_};
                auto* pa = reinterpret_cast<fftw_complex*>(a);
                auto* pb = reinterpret_cast<fftw_complex*>(b);
                p.forward = fftw_plan_dft(dim_, dims.data(), pa, pb, FFTW_FORWARD, flags);
                p.backward = fftw_plan_dft(dim_, dims.data(), pa, pb, FFTW_BACKWARD, flags);
            } else {
                p.sine = fftw_plan_dft_1d(2 * (n_ + 1), reinterpret_cast<fftw_complex*>(a),
                                          reinterpret_cast<fftw_complex*>(b), FFTW_FORWARD, flags);
            }
        }
        fftw_free(a);
        fftw_free(b);
    }

    static bool aligned(const void* p) { return fftw_alignment_of(static_cast<double*>(const_cast<void*>(p))) == 0; }

    void execute(std::span<const Complex> in, std::span<Complex> out, bool forward) const {
        if (kind_ == GridKind::PeriodicTorus) {
            // fftw_execute_dft never writes to its input for out-of-place plans.
            auto* pin = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
            auto* pout = reinterpret_cast<fftw_complex*>(out.data());
            const Plans& p = plans_[aligned(pin) && aligned(pout) ? 0 : 1];
            fftw_execute_dft(forward ? p.forward : p.backward, pin, pout);
            const double scale = 1.0 / std::sqrt(static_cast<double>(size_));
            for (auto& v : out) v *= scale;
            return;
        }
        // DST-I is its own inverse once scaled to an orthogonal matrix. It is
        // read off one complex DFT of the odd extension of length M = 2(N+1):
        // Y_k = -2i Σ_j x_j sin(πjk/(N+1)).
        const std::size_t m = 2 * (size_ + 1);
        SineScratch& s = sine_scratch(m);
        s.in[0] = 0.0;
        s.in[size_ + 1] = 0.0;
        for (std::size_t j = 1; j <= size_; ++j) {
            s.in[j] = in[j - 1];
            s.in[m - j] = -in[j - 1];
        }
        const Plans& p = plans_[aligned(s.in) && aligned(s.out) ? 0 : 1];
        fftw_execute_dft(p.sine, reinterpret_cast<fftw_complex*>(s.in), reinterpret_cast<fftw_complex*>(s.out));
        const Complex scale(0.0, 1.0 / std::sqrt(2.0 * (n_ + 1)));
        for (std::size_t k = 1; k <= size_; ++k) out[k - 1] = s.out[k] * scale;
    }

    // Per-thread FFTW-aligned buffers for the odd extension.
    struct SineScratch {
        Complex* in = nullptr;
        Complex* out = nullptr;
        std::size_t len = 0;
        SineScratch() = default;
        SineScratch(const SineScratch&) = delete;
        SineScratch& operator=(const SineScratch&) = delete;
        ~SineScratch() {
            fftw_free(in);
            fftw_free(out);
        }
    };

    static SineScratch& sine_scratch(std::size_t len) {
        thread_local SineScratch s;
        if (s.len < len) {
            fftw_free(s.in);
            fftw_free(s.out);
            s.in = static_cast<Complex*>(fftw_malloc(len * sizeof(Complex)));
            s.out = static_cast<Complex*>(fftw_malloc(len * sizeof(Complex)));
            s.len = len;
        }
        return s;
    }

    GridKind kind_;
    int dim_;
    int n_;
    std::size_t size_ = 0;
    std::vector<int> freq_;
    std::vector<double> k2_;
    std::vector<int> kmax_;
    std::vector<std::size_t> mirror_;
    struct Plans {
        fftw_plan forward = nullptr;
        fftw_plan backward = nullptr;
        fftw_plan sine = nullptr;
    };
    std::array<Plans, 2> plans_{};
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(GridKind kind, int dim, int modes_per_dim) {
    return std::make_shared<const Grid>(kind, dim, modes_per_dim);
}

} // namespace duhamel
