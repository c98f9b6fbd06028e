#pragma once

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "duhamel/equations.hpp"
#include "duhamel/error.hpp"
#include "duhamel/grid.hpp"
#include "duhamel/integrators.hpp"

namespace duhamel::harness {

enum class InitialDataKind { Rough, Smooth };

struct InitialDataSpec {
    InitialDataKind kind = InitialDataKind::Rough;
    double gamma = 1.0;       ///< Sobolev index of rough data
    double target_norm = 1.0; ///< H^gamma norm (rough) or L² norm (smooth) of the coefficients
    int cutoff = 8;           ///< spectrum cutoff of smooth data

    /// Index reported in result tables; band-limited data lies in every H^s.
    double reported_gamma() const {
        return kind == InitialDataKind::Rough ? gamma : std::numeric_limits<double>::infinity();
    }
    bool operator==(const InitialDataSpec&) const = default;
};

struct ReferencePolicy {
    double factor = 100.0;                              ///< τ_ref = min(taus)/factor
    std::optional<SchemeId> cross_check = SchemeId::StrangSplitting;
    double tolerance = 1e-8;                            ///< relative L² agreement required
    bool cache = true;
    bool operator==(const ReferencePolicy&) const = default;
};

struct ProbeSpec {
    std::vector<double> taus;
    std::optional<double> norm_index;
    bool operator==(const ProbeSpec&) const = default;
};

struct ExperimentConfig {
    std::string label;
    std::string equation;
    EquationParams params;
    GridKind grid_kind = GridKind::PeriodicTorus;
    int dim = 1;
    int modes = 256;
    InitialDataSpec initial;
    std::vector<SchemeId> schemes;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<double> taus;
    double t_end = 1.0;
    double error_norm = 0.0;
    bool error_max_over_steps = false;
    ReferencePolicy reference;
    ProbeSpec probe;
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    bool operator==(const ExperimentConfig& o) const {
        return label == o.label && equation == o.equation && params.alpha == o.params.alpha &&
               params.gamma == o.params.gamma && params.mass == o.params.mass && params.sign == o.params.sign &&
               params.power == o.params.power && params.jacobian == o.params.jacobian && grid_kind == o.grid_kind &&
               dim == o.dim && modes == o.modes && initial == o.initial && schemes == o.schemes && seeds == o.seeds &&
               taus == o.taus && t_end == o.t_end && error_norm == o.error_norm &&
               error_max_over_steps == o.error_max_over_steps && reference == o.reference && probe == o.probe &&
               out_dir == o.out_dir && formats == o.formats;
    }
};

inline GridKind grid_kind_from_string(const std::string& s) {
    if (s == "torus") return GridKind::PeriodicTorus;
    if (s == "dirichlet") return GridKind::DirichletInterval;
    throw Error(ErrorCode::InvalidConfig, "unknown grid kind '" + s + "'");
}

inline std::string to_string(JacobianMode m) { return m == JacobianMode::Analytic ? "analytic" : "finite_difference"; }

inline JacobianMode jacobian_mode_from_string(const std::string& s) {
    if (s == "analytic") return JacobianMode::Analytic;
    if (s == "finite_difference") return JacobianMode::FiniteDifference;
    throw Error(ErrorCode::InvalidConfig, "unknown jacobian mode '" + s + "'");
}

/// Checks the cross-field invariants of a config and that its equation,
/// grid and schemes can be built.
inline void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& field, const std::string& msg) {
        throw Error(ErrorCode::InvalidConfig, "field '" + field + "': " + msg);
    };
    if (c.taus.size() < 4) fail("taus", "at least 4 step sizes are required");
    for (std::size_t i = 0; i < c.taus.size(); ++i) {
        if (!(c.taus[i] > 0.0)) fail("taus", "step sizes must be positive");
        if (i > 0 && !(c.taus[i] < c.taus[i - 1])) fail("taus", "step sizes must be strictly decreasing");
    }
    if (!(c.t_end > 0.0)) fail("t_end", "must be positive");
    for (double tau : c.taus) {
        const double n = std::round(c.t_end / tau);
        if (std::abs(n * tau - c.t_end) > 1e-12) fail("t_end", "must be an integer multiple of every tau");
    }
    if (c.error_max_over_steps) {
        const double fine = c.taus.back();
        for (double tau : c.taus)
            if (std::abs(std::round(tau / fine) * fine - tau) > 1e-12)
                fail("error_at", "max-over-steps errors need every tau to be a multiple of the smallest");
    }
    if (c.schemes.empty()) fail("schemes", "at least one scheme is required");
    if (c.seeds.empty()) fail("seeds", "at least one seed is required");
    if (!(c.reference.factor >= 1.0)) fail("reference.factor", "must be at least 1");
    if (!(c.reference.tolerance > 0.0)) fail("reference.tolerance", "must be positive");
    if (c.formats.empty()) fail("output.formats", "at least one format is required");
    for (const auto& f : c.formats)
        if (f != "csv" && f != "json") fail("output.formats", "unknown format '" + f + "'");
    if (!c.probe.taus.empty() && c.probe.taus.size() < 4) fail("probe.taus", "at least 4 step sizes are required");
    if (c.initial.kind == InitialDataKind::Rough && c.initial.gamma < 0.0)
        fail("initial_data.gamma", "must be nonnegative");
    if (!(c.initial.target_norm > 0.0)) fail("initial_data.target_norm", "must be positive");
    try {
        const auto grid = make_grid(c.grid_kind, c.dim, c.modes);
        const auto eq = make_equation(c.equation, grid, c.params);
        for (auto s : c.schemes)
            if (!supports(eq, s)) fail("schemes", std::string(to_string(s)) + " does not support " + c.equation);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw;
        fail("equation/grid", e.what());
    }
}

namespace detail {

// Diagnostic naming the offending field and its line in the source file.
[[noreturn]] inline void config_error(const YAML::Node& node, const std::string& field, const std::string& msg) {
    std::ostringstream os;
    if (node.IsDefined() && node.Mark().line >= 0) os << "line " << node.Mark().line + 1 << ", ";
    os << "field '" << field << "': " << msg;
    throw Error(ErrorCode::InvalidConfig, os.str());
}

template <typename T>
T read(const YAML::Node& node, const std::string& field) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        config_error(node, field, "has the wrong type");
    }
}

template <typename T>
T read_or(const YAML::Node& parent, const char* key, const std::string& field, T fallback) {
    const YAML::Node n = parent[key];
    return n ? read<T>(n, field) : fallback;
}

inline Complex read_complex(const YAML::Node& node, const std::string& field) {
    if (node.IsSequence()) {
        if (node.size() != 2) config_error(node, field, "complex values are [re, im]");
        return {read<double>(node[0], field), read<double>(node[1], field)};
    }
    return {read<double>(node, field), 0.0};
}

inline void reject_unknown(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> keys) {
    if (!node.IsMap()) config_error(node, section, "must be a mapping");
    for (const auto& kv : node) {
        const auto k = kv.first.as<std::string>();
        bool known = false;
        for (const char* allowed : keys) known = known || k == allowed;
        if (!known) config_error(kv.first, section.empty() ? k : section + "." + k, "unknown key");
    }
}

inline std::vector<double> read_taus(const YAML::Node& node, const std::string& field) {
    std::vector<double> taus;
    if (node.IsSequence()) {
        for (const auto& t : node) taus.push_back(read<double>(t, field));
    } else if (node.IsMap()) {
        reject_unknown(node, field, {"powers_of_two"});
        const YAML::Node p = node["powers_of_two"];
        if (!p || !p.IsSequence() || p.size() != 2) config_error(node, field, "powers_of_two is [first, last]");
        const int a = read<int>(p[0], field), b = read<int>(p[1], field);
        if (b < a) config_error(p, field, "powers_of_two needs first <= last");
        for (int k = a; k <= b; ++k) taus.push_back(std::ldexp(1.0, -k));
    } else {
        config_error(node, field, "must be a list or {powers_of_two: [first, last]}");
    }
    return taus;
}

} // namespace detail

/// Parses a YAML experiment description; diagnostics carry line and field.
inline ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    using detail::config_error;
    using detail::read;
    using detail::read_or;
    if (!root.IsMap()) config_error(root, "<root>", "the config must be a mapping");
    detail::reject_unknown(root, "", {"label", "equation", "grid", "initial_data", "schemes", "seeds", "taus", "t_end",
                                      "error_norm", "error_at", "reference", "probe", "output"});

    ExperimentConfig c;
    c.label = read_or<std::string>(root, "label", "label", "");

    const YAML::Node eq = root["equation"];
    if (!eq) config_error(root, "equation", "is required");
    detail::reject_unknown(eq, "equation", {"name", "params"});
    if (!eq["name"]) config_error(eq, "equation.name", "is required");
    c.equation = read<std::string>(eq["name"], "equation.name");
    try {
        equation_kind_from_string(c.equation);
    } catch (const Error&) {
        config_error(eq["name"], "equation.name", "unknown equation '" + c.equation + "'");
    }
    if (const YAML::Node p = eq["params"]) {
        detail::reject_unknown(p, "equation.params", {"alpha", "gamma", "mass", "sign", "power", "jacobian"});
        if (p["alpha"]) c.params.alpha = detail::read_complex(p["alpha"], "equation.params.alpha");
        if (p["gamma"]) c.params.gamma = detail::read_complex(p["gamma"], "equation.params.gamma");
        c.params.mass = read_or<double>(p, "mass", "equation.params.mass", c.params.mass);
        c.params.sign = read_or<int>(p, "sign", "equation.params.sign", c.params.sign);
        c.params.power = read_or<int>(p, "power", "equation.params.power", c.params.power);
        if (p["jacobian"]) {
            try {
                c.params.jacobian = jacobian_mode_from_string(read<std::string>(p["jacobian"], "equation.params.jacobian"));
            } catch (const Error&) {
                config_error(p["jacobian"], "equation.params.jacobian", "must be analytic or finite_difference");
            }
        }
    }

    const YAML::Node grid = root["grid"];
    if (!grid) config_error(root, "grid", "is required");
    detail::reject_unknown(grid, "grid", {"kind", "dim", "modes"});
    try {
        c.grid_kind = grid_kind_from_string(read_or<std::string>(grid, "kind", "grid.kind", "torus"));
    } catch (const Error&) {
        config_error(grid["kind"], "grid.kind", "must be torus or dirichlet");
    }
    c.dim = read_or<int>(grid, "dim", "grid.dim", 1);
    c.modes = read_or<int>(grid, "modes", "grid.modes", 256);

    const YAML::Node init = root["initial_data"];
    if (!init) config_error(root, "initial_data", "is required");
    detail::reject_unknown(init, "initial_data", {"kind", "gamma", "target_norm", "cutoff"});
    const auto kind = read_or<std::string>(init, "kind", "initial_data.kind", "rough");
    if (kind == "rough")
        c.initial.kind = InitialDataKind::Rough;
    else if (kind == "smooth")
        c.initial.kind = InitialDataKind::Smooth;
    else
        config_error(init["kind"], "initial_data.kind", "must be rough or smooth");
    if (c.initial.kind == InitialDataKind::Rough && !init["gamma"])
        config_error(init, "initial_data.gamma", "is required for rough data");
    c.initial.gamma = read_or<double>(init, "gamma", "initial_data.gamma", c.initial.gamma);
    c.initial.target_norm = read_or<double>(init, "target_norm", "initial_data.target_norm", c.initial.target_norm);
    c.initial.cutoff = read_or<int>(init, "cutoff", "initial_data.cutoff", c.initial.cutoff);

    const YAML::Node schemes = root["schemes"];
    if (!schemes || !schemes.IsSequence()) config_error(root, "schemes", "must be a list of scheme names");
    for (const auto& s : schemes) {
        try {
            c.schemes.push_back(scheme_from_string(read<std::string>(s, "schemes")));
        } catch (const Error&) {
            config_error(s, "schemes", "unknown scheme '" + s.as<std::string>() + "'");
        }
    }

    if (const YAML::Node seeds = root["seeds"]) {
        c.seeds.clear();
        if (seeds.IsSequence()) {
            for (const auto& s : seeds) c.seeds.push_back(read<std::uint64_t>(s, "seeds"));
        } else {
            const auto count = read<int>(seeds, "seeds");
            if (count < 1) config_error(seeds, "seeds", "count must be positive");
            for (int s = 1; s <= count; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }

    if (!root["taus"]) config_error(root, "taus", "is required");
    c.taus = detail::read_taus(root["taus"], "taus");
    if (!root["t_end"]) config_error(root, "t_end", "is required");
    c.t_end = read<double>(root["t_end"], "t_end");
    c.error_norm = read_or<double>(root, "error_norm", "error_norm", 0.0);
    const auto error_at = read_or<std::string>(root, "error_at", "error_at", "final");
    if (error_at != "final" && error_at != "max") config_error(root["error_at"], "error_at", "must be final or max");
    c.error_max_over_steps = error_at == "max";

    if (const YAML::Node ref = root["reference"]) {
        detail::reject_unknown(ref, "reference", {"factor", "cross_check", "tolerance", "cache"});
        c.reference.factor = read_or<double>(ref, "factor", "reference.factor", c.reference.factor);
        c.reference.tolerance = read_or<double>(ref, "tolerance", "reference.tolerance", c.reference.tolerance);
        c.reference.cache = read_or<bool>(ref, "cache", "reference.cache", c.reference.cache);
        if (const YAML::Node cc = ref["cross_check"]) {
            const auto name = read<std::string>(cc, "reference.cross_check");
            if (name == "none") {
                c.reference.cross_check.reset();
            } else {
                try {
                    c.reference.cross_check = scheme_from_string(name);
                } catch (const Error&) {
                    config_error(cc, "reference.cross_check", "unknown scheme '" + name + "'");
                }
            }
        }
    }

    if (const YAML::Node probe = root["probe"]) {
        detail::reject_unknown(probe, "probe", {"taus", "norm"});
        if (probe["taus"]) c.probe.taus = detail::read_taus(probe["taus"], "probe.taus");
        if (probe["norm"]) c.probe.norm_index = read<double>(probe["norm"], "probe.norm");
    }

    if (const YAML::Node out = root["output"]) {
        detail::reject_unknown(out, "output", {"dir", "formats"});
        c.out_dir = read_or<std::string>(out, "dir", "output.dir", c.out_dir);
        if (const YAML::Node f = out["formats"]) {
            if (!f.IsSequence()) config_error(f, "output.formats", "must be a list");
            c.formats.clear();
            for (const auto& x : f) c.formats.push_back(read<std::string>(x, "output.formats"));
        }
    }

    validate(c);
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace duhamel::harness
