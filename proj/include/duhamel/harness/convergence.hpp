#pragma once

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "duhamel/analysis.hpp"
#include "duhamel/equations.hpp"
#include "duhamel/harness/config.hpp"
#include "duhamel/harness/reference.hpp"
#include "duhamel/initial_data.hpp"
#include "duhamel/integrators.hpp"
#include "duhamel/version.hpp"

namespace duhamel::harness {

struct CellResult {
    std::string scheme;
    std::uint64_t seed = 0;
    double tau = 0.0;
    std::optional<double> error;        ///< absent when the run blew up
    std::string status = "ok";          ///< "ok" or "blowup"
    std::optional<std::uint64_t> blowup_step;
    std::optional<double> literal_error; ///< Klein-Gordon only: ‖∂ₜz - Im u‖_{L²}
    double seconds = 0.0;
    bool operator==(const CellResult&) const = default;
};

struct SeedFit {
    std::uint64_t seed = 0;
    std::optional<OrderFit> fit;
    std::uint32_t monotone_violations = 0; ///< error increases beyond the fit residual as τ shrinks
    bool operator==(const SeedFit&) const = default;
};

struct SchemeSummary {
    std::string scheme;
    std::vector<SeedFit> fits;
    std::optional<double> median_slope;
    bool operator==(const SchemeSummary&) const = default;
};

struct SeedReference {
    std::uint64_t seed = 0;
    double initial_norm = 0.0; ///< H^error_norm norm of u₀
    ReferenceInfo info;
    bool operator==(const SeedReference&) const = default;
};

struct ConvergenceReport {
    ExperimentConfig config;
    std::string library_version = kVersion;
    std::string fftw_version;
    std::vector<SeedReference> references;
    std::vector<CellResult> cells;
    std::vector<SchemeSummary> summaries;
    double wall_seconds = 0.0;
    bool operator==(const ConvergenceReport&) const = default;
};


struct RunOptions {
    unsigned threads = 1;
    std::optional<std::filesystem::path> cache_dir; ///< defaults to <out_dir>/refcache
    std::function<void(const std::string&)> progress;
};

inline SpectralField initial_field(const ExperimentConfig& c, const GridPtr& grid, std::uint64_t seed) {
    return c.initial.kind == InitialDataKind::Rough ? rough_field(grid, c.initial.gamma, seed, c.initial.target_norm)
                                                    : smooth_field(grid, c.initial.cutoff, seed, c.initial.target_norm);
}

/// Error of u against the reference in the H^s norm; for the Klein-Gordon
/// family both are mapped back to (z, ∂ₜz) and measured as
/// ‖Δz‖_{H^s} + ‖Δ∂ₜz‖_{H^{s-1}}.
inline double measure_error(const EquationSpec& eq, const SpectralField& u, const SpectralField& ref, double s) {
    if (!is_klein_gordon_family(eq.kind)) return sobolev_norm(u - ref, s);
    const KGState a = kg_from_u(u, eq.params.mass);
    const KGState b = kg_from_u(ref, eq.params.mass);
    return sobolev_norm(a.z - b.z, s) + sobolev_norm(a.zt - b.zt, s - 1.0);
}

/// ‖∂ₜz_ref - Im u‖_{L²}, the Klein-Gordon error read literally.
inline double literal_kg_error(const EquationSpec& eq, const SpectralField& u, const SpectralField& ref) {
    const KGState b = kg_from_u(ref, eq.params.mass);
    const SpectralField im = Complex(0.0, -0.5) * (u - conj(u));
    return l2_norm(b.zt - im);
}

/// Counts τ-halvings where the error grew by more than the fit residual allows.
inline std::uint32_t monotone_violations(const std::vector<OrderSample>& samples, double residual) {
    std::uint32_t n = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].tau < samples[i - 1].tau && samples[i].error > samples[i - 1].error * std::exp(residual)) ++n;
    return n;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// For each seed: rough or smooth u₀, a cached cross-checked reference, then
/// every (scheme, τ) cell; slopes are fitted per seed and summarised by the median.
inline ConvergenceReport run_convergence(const ExperimentConfig& config, const RunOptions& options = {}) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const auto grid = make_grid(config.grid_kind, config.dim, config.modes);
    const auto eq = make_equation(config.equation, grid, config.params);
    const std::filesystem::path cache = options.cache_dir.value_or(std::filesystem::path(config.out_dir) / "refcache");
    const double tau_ref = reference_step(config.taus.back(), config.reference.factor, config.t_end);
    auto say = [&](const std::string& msg) {
        if (options.progress) options.progress(msg);
    };

    ConvergenceReport report;
    report.config = config;
    report.fftw_version = fftw_version;

    for (std::uint64_t seed : config.seeds) {
        const SpectralField u0 = initial_field(config, grid, seed);
        say(fmt::format("seed {}: reference at tau_ref = {:.6g}", seed, tau_ref));

        std::vector<SpectralField> ref_path; // reference at multiples of the finest tau
        SeedReference sr{seed, sobolev_norm(u0, config.error_norm), {}};
        ReferenceResult ref;
        if (config.error_max_over_steps) {
            std::vector<double> times;
            const std::size_t n = step_count(config.taus.back(), config.t_end);
            for (std::size_t k = 0; k <= n; ++k) times.push_back(static_cast<double>(k) * config.taus.back());
            // Snapshot times must land on reference steps.
            const double fine_ref = config.taus.back() / std::round(config.taus.back() / tau_ref);
            ReferencePolicy no_cache = config.reference;
            no_cache.cache = false;
            ref = reference_solution(eq, u0, config.t_end, fine_ref, no_cache);
            Trajectory traj = evolve(eq, SchemeId::Duhamel2, u0, fine_ref, config.t_end, times);
            for (auto& snap : traj.snapshots) ref_path.push_back(std::move(snap.second));
        } else {
            ref = reference_solution(eq, u0, config.t_end, tau_ref, config.reference, cache);
        }
        sr.info = ref.info;
        report.references.push_back(sr);
        if (ref.info.cross_check_diff)
            say(fmt::format("seed {}: reference cross-check difference {:.3e}{}", seed, *ref.info.cross_check_diff,
                            ref.info.cache_hit ? " (cached)" : ""));

        const std::size_t base = report.cells.size();
        for (auto s : config.schemes)
            for (double tau : config.taus) {
                CellResult cell;
                cell.scheme = std::string(to_string(s));
                cell.seed = seed;
                cell.tau = tau;
                report.cells.push_back(cell);
            }
        detail::parallel_for(report.cells.size() - base, options.threads, [&](std::size_t i) {
            CellResult& cell = report.cells[base + i];
            const auto t0 = std::chrono::steady_clock::now();
            const Stepper stepper(eq, scheme_from_string(cell.scheme), cell.tau);
            double running_max = 0.0;
            StepObserver observer;
            if (config.error_max_over_steps) {
                const auto stride = static_cast<std::size_t>(std::llround(cell.tau / config.taus.back()));
                observer = [&](std::size_t k, const SpectralField& u) {
                    running_max = std::max(running_max, measure_error(eq, u, ref_path[k * stride], config.error_norm));
                };
            }
            try {
                const Trajectory traj = evolve(stepper, u0, config.t_end, {}, observer);
                cell.error = config.error_max_over_steps
                                 ? running_max
                                 : measure_error(eq, traj.final, ref.field, config.error_norm);
                if (is_klein_gordon_family(eq.kind)) cell.literal_error = literal_kg_error(eq, traj.final, ref.field);
            } catch (const BlowUpError& e) {
                cell.status = "blowup";
                cell.blowup_step = e.step();
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        });
    }

    for (auto s : config.schemes) {
        SchemeSummary summary;
        summary.scheme = std::string(to_string(s));
        std::vector<double> slopes;
        for (std::uint64_t seed : config.seeds) {
            SeedFit sf;
            sf.seed = seed;
            std::vector<OrderSample> samples;
            for (const auto& c : report.cells)
                if (c.scheme == summary.scheme && c.seed == seed && c.error && *c.error > 0.0)
                    samples.push_back({c.tau, *c.error});
            if (samples.size() >= 3) {
                sf.fit = fit_order(samples);
                sf.monotone_violations = monotone_violations(sf.fit->samples, sf.fit->residual);
                slopes.push_back(sf.fit->slope);
            }
            summary.fits.push_back(std::move(sf));
        }
        if (!slopes.empty()) summary.median_slope = detail::median(slopes);
        report.summaries.push_back(std::move(summary));
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

/// Median slope of one scheme in a report.
inline std::optional<double> median_slope(const ConvergenceReport& r, SchemeId scheme) {
    for (const auto& s : r.summaries)
        if (s.scheme == to_string(scheme)) return s.median_slope;
    return std::nullopt;
}

} // namespace duhamel::harness
