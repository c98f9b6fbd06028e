#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "duhamel/analysis.hpp"
#include "duhamel/error.hpp"
#include "duhamel/harness/config.hpp"
#include "duhamel/harness/convergence.hpp"

namespace duhamel {

inline void to_json(nlohmann::json& j, const OrderSample& s) { j = {{"tau", s.tau}, {"error", s.error}}; }
inline void from_json(const nlohmann::json& j, OrderSample& s) {
    j.at("tau").get_to(s.tau);
    j.at("error").get_to(s.error);
}
inline void to_json(nlohmann::json& j, const OrderFit& f) {
    j = {{"samples", f.samples}, {"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}
inline void from_json(const nlohmann::json& j, OrderFit& f) {
    j.at("samples").get_to(f.samples);
    j.at("slope").get_to(f.slope);
    j.at("intercept").get_to(f.intercept);
    j.at("residual").get_to(f.residual);
}

} // namespace duhamel

namespace duhamel::harness {

using nlohmann::json;

namespace detail {

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }
inline Complex complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

} // namespace detail

inline void to_json(json& j, const ExperimentConfig& c) {
    std::vector<std::string> schemes;
    for (auto s : c.schemes) schemes.emplace_back(to_string(s));
    j = {{"label", c.label},
         {"equation",
          {{"name", c.equation},
           {"params",
            {{"alpha", detail::complex_json(c.params.alpha)},
             {"gamma", detail::complex_json(c.params.gamma)},
             {"mass", c.params.mass},
             {"sign", c.params.sign},
             {"power", c.params.power},
             {"jacobian", to_string(c.params.jacobian)}}}}},
         {"grid", {{"kind", to_string(c.grid_kind)}, {"dim", c.dim}, {"modes", c.modes}}},
         {"initial_data",
          {{"kind", c.initial.kind == InitialDataKind::Rough ? "rough" : "smooth"},
           {"gamma", c.initial.gamma},
           {"target_norm", c.initial.target_norm},
           {"cutoff", c.initial.cutoff}}},
         {"schemes", schemes},
         {"seeds", c.seeds},
         {"taus", c.taus},
         {"t_end", c.t_end},
         {"error_norm", c.error_norm},
         {"error_at", c.error_max_over_steps ? "max" : "final"},
         {"reference",
          {{"factor", c.reference.factor},
           {"cross_check", c.reference.cross_check ? json(std::string(to_string(*c.reference.cross_check)))
                                                   : json(nullptr)},
           {"tolerance", c.reference.tolerance},
           {"cache", c.reference.cache}}},
         {"probe", {{"taus", c.probe.taus}, {"norm", detail::opt(c.probe.norm_index)}}},
         {"output", {{"dir", c.out_dir}, {"formats", c.formats}}}};
}

inline void from_json(const json& j, ExperimentConfig& c) {
    j.at("label").get_to(c.label);
    const json& eq = j.at("equation");
    eq.at("name").get_to(c.equation);
    const json& p = eq.at("params");
    c.params.alpha = detail::complex_from(p.at("alpha"));
    c.params.gamma = detail::complex_from(p.at("gamma"));
    p.at("mass").get_to(c.params.mass);
    p.at("sign").get_to(c.params.sign);
    p.at("power").get_to(c.params.power);
    c.params.jacobian = jacobian_mode_from_string(p.at("jacobian").get<std::string>());
    const json& g = j.at("grid");
    c.grid_kind = grid_kind_from_string(g.at("kind").get<std::string>());
    g.at("dim").get_to(c.dim);
    g.at("modes").get_to(c.modes);
    const json& init = j.at("initial_data");
    c.initial.kind = init.at("kind").get<std::string>() == "rough" ? InitialDataKind::Rough : InitialDataKind::Smooth;
    init.at("gamma").get_to(c.initial.gamma);
    init.at("target_norm").get_to(c.initial.target_norm);
    init.at("cutoff").get_to(c.initial.cutoff);
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(scheme_from_string(s.get<std::string>()));
    j.at("seeds").get_to(c.seeds);
    j.at("taus").get_to(c.taus);
    j.at("t_end").get_to(c.t_end);
    j.at("error_norm").get_to(c.error_norm);
    c.error_max_over_steps = j.at("error_at").get<std::string>() == "max";
    const json& r = j.at("reference");
    r.at("factor").get_to(c.reference.factor);
    if (r.at("cross_check").is_null())
        c.reference.cross_check.reset();
    else
        c.reference.cross_check = scheme_from_string(r.at("cross_check").get<std::string>());
    r.at("tolerance").get_to(c.reference.tolerance);
    r.at("cache").get_to(c.reference.cache);
    j.at("probe").at("taus").get_to(c.probe.taus);
    c.probe.norm_index = detail::opt_from<double>(j.at("probe"), "norm");
    j.at("output").at("dir").get_to(c.out_dir);
    j.at("output").at("formats").get_to(c.formats);
}

inline void to_json(json& j, const ReferenceInfo& r) {
    j = {{"scheme", r.scheme},
         {"tau_ref", r.tau_ref},
         {"steps", r.steps},
         {"checksum", r.checksum},
         {"cache_key", r.cache_key},
         {"cache_hit", r.cache_hit},
         {"cross_check_scheme", detail::opt(r.cross_check_scheme)},
         {"cross_check_diff", detail::opt(r.cross_check_diff)},
         {"seconds", r.seconds}};
}

inline void from_json(const json& j, ReferenceInfo& r) {
    j.at("scheme").get_to(r.scheme);
    j.at("tau_ref").get_to(r.tau_ref);
    j.at("steps").get_to(r.steps);
    j.at("checksum").get_to(r.checksum);
    j.at("cache_key").get_to(r.cache_key);
    j.at("cache_hit").get_to(r.cache_hit);
    r.cross_check_scheme = detail::opt_from<std::string>(j, "cross_check_scheme");
    r.cross_check_diff = detail::opt_from<double>(j, "cross_check_diff");
    j.at("seconds").get_to(r.seconds);
}

inline void to_json(json& j, const SeedReference& s) {
    j = {{"seed", s.seed}, {"initial_norm", s.initial_norm}, {"reference", s.info}};
}
inline void from_json(const json& j, SeedReference& s) {
    j.at("seed").get_to(s.seed);
    j.at("initial_norm").get_to(s.initial_norm);
    j.at("reference").get_to(s.info);
}

inline void to_json(json& j, const CellResult& c) {
    j = {{"scheme", c.scheme},
         {"seed", c.seed},
         {"tau", c.tau},
         {"error", detail::opt(c.error)},
         {"status", c.status},
         {"blowup_step", detail::opt(c.blowup_step)},
         {"literal_error", detail::opt(c.literal_error)},
         {"seconds", c.seconds}};
}
inline void from_json(const json& j, CellResult& c) {
    j.at("scheme").get_to(c.scheme);
    j.at("seed").get_to(c.seed);
    j.at("tau").get_to(c.tau);
    c.error = detail::opt_from<double>(j, "error");
    j.at("status").get_to(c.status);
    c.blowup_step = detail::opt_from<std::uint64_t>(j, "blowup_step");
    c.literal_error = detail::opt_from<double>(j, "literal_error");
    j.at("seconds").get_to(c.seconds);
}

inline void to_json(json& j, const SeedFit& s) {
    j = {{"seed", s.seed}, {"fit", detail::opt(s.fit)}, {"monotone_violations", s.monotone_violations}};
}
inline void from_json(const json& j, SeedFit& s) {
    j.at("seed").get_to(s.seed);
    s.fit = detail::opt_from<OrderFit>(j, "fit");
    j.at("monotone_violations").get_to(s.monotone_violations);
}

inline void to_json(json& j, const SchemeSummary& s) {
    j = {{"scheme", s.scheme}, {"fits", s.fits}, {"median_slope", detail::opt(s.median_slope)}};
}
inline void from_json(const json& j, SchemeSummary& s) {
    j.at("scheme").get_to(s.scheme);
    j.at("fits").get_to(s.fits);
    s.median_slope = detail::opt_from<double>(j, "median_slope");
}

inline void to_json(json& j, const ConvergenceReport& r) {
    j = {{"config", r.config},
         {"versions", {{"library", r.library_version}, {"fftw", r.fftw_version}}},
         {"references", r.references},
         {"cells", r.cells},
         {"summaries", r.summaries},
         {"wall_seconds", r.wall_seconds}};
}
inline void from_json(const json& j, ConvergenceReport& r) {
    j.at("config").get_to(r.config);
    j.at("versions").at("library").get_to(r.library_version);
    j.at("versions").at("fftw").get_to(r.fftw_version);
    j.at("references").get_to(r.references);
    j.at("cells").get_to(r.cells);
    j.at("summaries").get_to(r.summaries);
    j.at("wall_seconds").get_to(r.wall_seconds);
}

inline std::string to_json_text(const ConvergenceReport& r) { return json(r).dump(2); }
inline ConvergenceReport report_from_json(const std::string& text) { return json::parse(text).get<ConvergenceReport>(); }

inline constexpr const char* kCsvHeader = "equation,scheme,seed,gamma,tau,error,norm_index,status";

/// One row per (scheme, seed, τ) cell; doubles use 17 significant digits so
/// the text is a pure function of the numbers.
inline std::string to_csv(const ConvergenceReport& r) {
    std::string out = std::string(kCsvHeader) + "\n";
    const double gamma = r.config.initial.reported_gamma();
    for (const auto& c : r.cells)
        out += fmt::format("{},{},{},{:.17g},{:.17g},{},{:.17g},{}\n", r.config.equation, c.scheme, c.seed, gamma,
                           c.tau, c.error ? fmt::format("{:.17g}", *c.error) : std::string("nan"),
                           r.config.error_norm, c.status);
    return out;
}

/// Whitespace table: τ followed by the median error over seeds of each scheme.
inline std::string to_plot_data(const ConvergenceReport& r) {
    std::string out = "# tau";
    for (const auto& s : r.summaries) out += " " + s.scheme;
    out += "\n";
    for (double tau : r.config.taus) {
        out += fmt::format("{:.17g}", tau);
        for (const auto& s : r.summaries) {
            std::vector<double> errs;
            for (const auto& c : r.cells)
                if (c.scheme == s.scheme && c.tau == tau && c.error) errs.push_back(*c.error);
            out += errs.empty() ? std::string(" nan") : fmt::format(" {:.17g}", detail::median(errs));
        }
        out += "\n";
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    os << text;
    if (!os) throw Error(ErrorCode::IoError, "short write to '" + path.string() + "'");
}

/// Writes convergence.csv and/or report.json plus plot_data.tsv into `dir`;
/// returns the paths written.
inline std::vector<std::filesystem::path> emit_report(const ConvergenceReport& r, const std::filesystem::path& dir,
                                                      const std::vector<std::string>& formats) {
    std::vector<std::filesystem::path> written;
    for (const auto& f : formats) {
        if (f == "csv") {
            written.push_back(dir / "convergence.csv");
            write_text(written.back(), to_csv(r));
        } else if (f == "json") {
            written.push_back(dir / "report.json");
            write_text(written.back(), to_json_text(r));
        } else {
            throw Error(ErrorCode::IoError, "unknown report format '" + f + "'");
        }
    }
    written.push_back(dir / "plot_data.tsv");
    write_text(written.back(), to_plot_data(r));
    return written;
}

} // namespace duhamel::harness
