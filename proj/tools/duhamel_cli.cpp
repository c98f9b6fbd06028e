#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "duhamel/analysis.hpp"
#include "duhamel/equations.hpp"
#include "duhamel/harness/config.hpp"
#include "duhamel/harness/convergence.hpp"
#include "duhamel/harness/report.hpp"
#include "duhamel/harness/step_check.hpp"

namespace {

namespace fs = std::filesystem;
using namespace duhamel;
using namespace duhamel::harness;

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

ExperimentConfig load_with_overrides(const std::string& path, const GlobalOptions& g) {
    ExperimentConfig c = load_config(path);
    if (g.seed) c.seeds = {*g.seed};
    if (g.out_dir) c.out_dir = *g.out_dir;
    return c;
}

int run_converge(const std::string& path, const GlobalOptions& g) {
    const ExperimentConfig c = load_with_overrides(path, g);
    RunOptions opts;
    opts.threads = g.threads;
    opts.progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
    const ConvergenceReport r = run_convergence(c, opts);
    const auto files = emit_report(r, c.out_dir, c.formats);

    fmt::print("{} on {} ({}D, N={}), error norm H^{}\n", c.label.empty() ? c.equation : c.label, to_string(c.grid_kind),
               c.dim, c.modes, c.error_norm);
    for (const auto& s : r.summaries) {
        std::string per_seed;
        for (const auto& f : s.fits)
            per_seed += f.fit ? fmt::format(" {:.3f}", f.fit->slope) : std::string(" -");
        fmt::print("  {:<13} median slope {:>7}   per seed:{}\n", s.scheme,
                   s.median_slope ? fmt::format("{:.3f}", *s.median_slope) : std::string("-"), per_seed);
    }
    for (const auto& cell : r.cells)
        if (cell.status != "ok")
            fmt::print("  {} seed {} tau {:.6g}: {} at step {}\n", cell.scheme, cell.seed, cell.tau, cell.status,
                       cell.blowup_step.value_or(0));
    for (const auto& f : files) fmt::print("  wrote {}\n", f.string());
    return 0;
}

int run_probe(const std::string& path, const GlobalOptions& g) {
    const ExperimentConfig c = load_with_overrides(path, g);
    if (c.probe.taus.empty()) throw Error(ErrorCode::InvalidConfig, "field 'probe.taus': required for probe runs");
    const auto grid = make_grid(c.grid_kind, c.dim, c.modes);
    const auto eq = make_equation(c.equation, grid, c.params);
    std::string csv = "equation,scheme,seed,tau,defect,norm_index\n";
    const double norm = c.probe.norm_index.value_or(default_norm_index(eq));
    fmt::print("one-step defect slopes for {} (H^{} norm)\n", c.equation, norm);
    for (auto s : c.schemes) {
        std::string line;
        for (std::uint64_t seed : c.seeds) {
            const OrderFit fit = local_error_probe(eq, s, initial_field(c, grid, seed), c.probe.taus, norm);
            line += fmt::format(" {:.3f}", fit.slope);
            for (const auto& sample : fit.samples)
                csv += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", c.equation, to_string(s), seed, sample.tau,
                                   sample.error, norm);
        }
        fmt::print("  {:<13} per seed:{}\n", to_string(s), line);
    }
    const fs::path out = fs::path(c.out_dir) / "probe.csv";
    write_text(out, csv);
    fmt::print("  wrote {}\n", out.string());
    return 0;
}

int run_step_check() {
    auto checks = structural_checks();
    for (auto& c : commutator_checks()) checks.push_back(std::move(c));
    bool ok = true;
    for (const auto& c : checks) {
        fmt::print("[{}] {}: {:.3e} (limit {:.1e})\n", c.passed ? "PASS" : "FAIL", c.name, c.measured, c.threshold);
        ok = ok && c.passed;
    }
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-regularity Duhamel integrators: convergence experiments and consistency checks"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--seed", g.seed, "Run a single seed instead of the configured list");
    app.add_option("--out-dir", g.out_dir, "Directory for reports and the reference cache");
    app.add_option("--threads", g.threads, "Worker threads for convergence cells")->check(CLI::PositiveNumber);

    std::string config;
    auto* converge = app.add_subcommand("converge", "Run a convergence sweep described by a config file");
    converge->add_option("config", config, "Experiment config (YAML)")->required();
    auto* probe = app.add_subcommand("probe", "Measure one-step defect orders for the configured schemes");
    probe->add_option("config", config, "Experiment config (YAML) with a probe section")->required();
    auto* step_check = app.add_subcommand("step-check", "Run the exact-tolerance identity suite");
    auto* list = app.add_subcommand("list-equations", "Print the equation catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*list) {
            for (auto name : kEquationNames) std::cout << name << '\n';
            return 0;
        }
        if (*step_check) return run_step_check();
        if (*converge) return run_converge(config, g);
        if (*probe) return run_probe(config, g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_numerical_failure(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
