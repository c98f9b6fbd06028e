// Runs every acceptance criterion over the shipped configs and prints one
// PASS/FAIL line per criterion. Exit status 0 only when all pass.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "duhamel/analysis.hpp"
#include "duhamel/harness/config.hpp"
#include "duhamel/harness/convergence.hpp"
#include "duhamel/harness/report.hpp"
#include "duhamel/harness/step_check.hpp"

namespace fs = std::filesystem;
using namespace duhamel;
using namespace duhamel::harness;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Context {
    fs::path configs;
    fs::path work;
    unsigned threads = 1;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs a shipped config with a fresh reference cache under the work directory.
ConvergenceReport run_config(const Context& ctx, const std::string& name) {
    ExperimentConfig c = load_config(ctx.configs / (name + ".yaml"));
    c.out_dir = (ctx.work / name).string();
    fs::remove_all(c.out_dir);
    RunOptions opts;
    opts.threads = ctx.threads;
    opts.progress = [&name](const std::string& msg) { std::cerr << "  [" << name << "] " << msg << '\n'; };
    ConvergenceReport r = run_convergence(c, opts);
    emit_report(r, c.out_dir, c.formats);
    return r;
}

std::string slope_text(const std::optional<double>& s) { return s ? fmt::format("{:.3f}", *s) : "n/a"; }

// Median slope of `scheme` compared against [lo, hi].
bool slope_within(const ConvergenceReport& r, SchemeId scheme, double lo, double hi, std::string& detail) {
    const auto s = median_slope(r, scheme);
    if (!detail.empty()) detail += ", ";
    detail += fmt::format("{} {}", to_string(scheme), slope_text(s));
    return s && *s >= lo && *s <= hi;
}

std::string runtime_text(double seconds, double limit) { return fmt::format("{:.1f} s (limit {:.0f} s)", seconds, limit); }

Outcome smooth_baseline(const Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConvergenceReport r = run_config(ctx, "nls_smooth");
    const double secs = seconds_since(t0);
    std::string d;
    bool ok = slope_within(r, SchemeId::Duhamel1, 0.9, 1.1, d);
    ok = slope_within(r, SchemeId::Duhamel2, 1.9, 2.1, d) && ok;
    ok = slope_within(r, SchemeId::StrangSplitting, 1.9, 2.1, d) && ok;
    return {ok && secs <= 120.0, d + "; " + runtime_text(secs, 120.0)};
}

Outcome rough_first_order(const Context& ctx) {
    std::string d;
    bool ok = true;
    for (const char* name : {"nls_rough", "gl_rough"}) {
        const ConvergenceReport r = run_config(ctx, name);
        std::string part;
        ok = slope_within(r, SchemeId::Duhamel1, 0.85, 1e9, part) && ok;
        part += fmt::format(" (exp-euler {}, informational)", slope_text(median_slope(r, SchemeId::ExpEuler)));
        d += (d.empty() ? "" : "; ") + std::string(name) + ": " + part;
    }
    return {ok, d};
}

Outcome single_slope(const Context& ctx, const std::string& name, SchemeId scheme, double min_slope,
                     std::optional<double> limit = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConvergenceReport r = run_config(ctx, name);
    const double secs = seconds_since(t0);
    std::string d;
    bool ok = slope_within(r, scheme, min_slope, 1e9, d);
    if (limit) {
        d += "; " + runtime_text(secs, *limit);
        ok = ok && secs <= *limit;
    }
    return {ok, name + ": " + d};
}

Outcome klein_gordon_1d(const Context& ctx) {
    std::string d;
    bool ok = true;
    for (const char* name : {"kg_quadratic_1d", "sine_gordon_1d"}) {
        const Outcome o = single_slope(ctx, name, SchemeId::Duhamel1, 0.85);
        ok = ok && o.passed;
        d += (d.empty() ? "" : "; ") + o.detail;
    }
    return {ok, d};
}

Outcome structural(const Context&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = structural_checks();
    const double secs = seconds_since(t0);
    std::size_t passed = 0;
    std::string failed;
    for (const auto& c : checks) {
        if (c.passed)
            ++passed;
        else
            failed += fmt::format("; failed: {} ({:.3e} > {:.1e})", c.name, c.measured, c.threshold);
    }
    return {passed == checks.size() && secs < 10.0,
            fmt::format("{}/{} identities; {:.2f} s (limit 10 s){}", passed, checks.size(), secs, failed)};
}

Outcome commutator_oracle(const Context& ctx) {
    const double gap = nls_commutator_gap();
    bool ok = gap <= 1e-10;
    std::string d = fmt::format("closed-form gap {:.2e} over 20 fields", gap);

    const ExperimentConfig c = load_config(ctx.configs / "nls_smooth.yaml");
    const auto grid = make_grid(c.grid_kind, c.dim, c.modes);
    const auto eq = make_equation(c.equation, grid, c.params);
    for (auto [scheme, target] : {std::pair{SchemeId::Duhamel1, 2.0}, std::pair{SchemeId::Duhamel2, 3.0}}) {
        d += fmt::format("; {} defect slopes", to_string(scheme));
        for (std::uint64_t seed : {1, 2, 3}) {
            const double s = local_error_probe(eq, scheme, initial_field(c, grid, seed), c.probe.taus).slope;
            d += fmt::format(" {:.3f}", s);
            ok = ok && std::abs(s - target) <= 0.2;
        }
    }
    return {ok, d};
}

Outcome determinism(const Context& ctx) {
    ExperimentConfig c = load_config(ctx.configs / "nls_rough.yaml");
    c.seeds = {7};
    c.modes = 64;
    std::vector<std::string> csv;
    std::vector<ConvergenceReport> reports;
    for (const char* run : {"a", "b"}) {
        c.out_dir = (ctx.work / "determinism" / run).string();
        fs::remove_all(c.out_dir);
        RunOptions opts;
        opts.threads = std::string(run) == "a" ? 1u : ctx.threads;
        reports.push_back(run_convergence(c, opts));
        emit_report(reports.back(), c.out_dir, {"csv", "json"});
        csv.push_back(to_csv(reports.back()));
    }
    const bool same_csv = csv[0] == csv[1];
    const std::string text = to_json_text(reports[0]);
    const ConvergenceReport back = report_from_json(text);
    const bool round_trip = back == reports[0] && to_json_text(back) == text;
    return {same_csv && round_trip, fmt::format("CSV {} across runs ({} bytes); JSON round trip {}",
                                                same_csv ? "byte-identical" : "differs", csv[0].size(),
                                                round_trip ? "lossless" : "lossy")};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
    Context ctx;
    std::string configs = "configs", work = "acceptance_work";
    std::vector<int> only;
    ctx.threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--configs", configs, "Directory holding the shipped configs");
    app.add_option("--work-dir", work, "Scratch directory for reports and reference caches");
    app.add_option("--threads", ctx.threads, "Worker threads for convergence cells")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);
    ctx.configs = configs;
    ctx.work = work;

    const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria{
        {"smooth-data baseline orders (1-D NLS)", smooth_baseline},
        {"rough-data first order (1-D NLS and GL)", rough_first_order},
        {"half-wave 1-D first order",
         [](const Context& c) { return single_slope(c, "half_wave_1d", SchemeId::Duhamel1, 0.85); }},
        {"half-wave 2-D second order",
         [](const Context& c) { return single_slope(c, "half_wave_2d", SchemeId::Duhamel2, 1.7, 600.0); }},
        {"Klein-Gordon 1-D first order (quadratic, sine-Gordon)", klein_gordon_1d},
        {"Klein-Gordon 3-D quadratic second order",
         [](const Context& c) { return single_slope(c, "kg_quadratic_3d", SchemeId::Duhamel2, 1.7, 1200.0); }},
        {"Dirichlet GL 1-D first order",
         [](const Context& c) { return single_slope(c, "gl_dirichlet", SchemeId::Duhamel1, 0.85); }},
        {"structural identities", structural},
        {"commutator oracle and one-step defect orders", commutator_oracle},
        {"determinism and serialization", determinism},
    };

    const std::set<int> selected(only.begin(), only.end());
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        all = all && o.passed;
        std::cout << fmt::format("[{}] {:>2} {}: {}", o.passed ? "PASS" : "FAIL", id, criteria[i].first, o.detail)
                  << std::endl;
    }
    return all ? 0 : 1;
}
