#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "duhamel/harness/config.hpp"

using namespace duhamel;
using namespace duhamel::harness;

namespace {

const std::string kFull = R"(label: full
equation:
  name: ginzburg_landau
  params: {alpha: [0.1, 1.0], gamma: 2.0, jacobian: finite_difference}
grid: {kind: torus, dim: 2, modes: 32}
initial_data: {kind: rough, gamma: 1.5, target_norm: 8}
schemes: [duhamel1, exp_euler, strang]
seeds: [4, 9]
taus: [0.1, 0.05, 0.025, 0.0125]
t_end: 0.5
error_norm: 1
error_at: max
reference: {factor: 50, cross_check: none, tolerance: 1.0e-9, cache: false}
probe: {taus: {powers_of_two: [3, 6]}, norm: 0.5}
output: {dir: results, formats: [json]}
)";

const std::string kMinimal = R"(equation: {name: nls}
grid: {modes: 64}
initial_data: {kind: smooth}
schemes: [duhamel2]
taus: {powers_of_two: [4, 7]}
t_end: 1
)";

// Parses `text` expecting InvalidConfig; returns the message.
std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "config was accepted:\n" << text;
    return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

} // namespace

TEST(Config, ParsesEveryField) {
    const ExperimentConfig c = parse_config(kFull);
    EXPECT_EQ(c.label, "full");
    EXPECT_EQ(c.equation, "ginzburg_landau");
    EXPECT_EQ(c.params.alpha, Complex(0.1, 1.0));
    EXPECT_EQ(c.params.gamma, Complex(2.0, 0.0));
    EXPECT_EQ(c.params.jacobian, JacobianMode::FiniteDifference);
    EXPECT_EQ(c.grid_kind, GridKind::PeriodicTorus);
    EXPECT_EQ(c.dim, 2);
    EXPECT_EQ(c.modes, 32);
    EXPECT_EQ(c.initial.kind, InitialDataKind::Rough);
    EXPECT_EQ(c.initial.gamma, 1.5);
    EXPECT_EQ(c.initial.target_norm, 8.0);
    EXPECT_EQ(c.schemes, (std::vector<SchemeId>{SchemeId::Duhamel1, SchemeId::ExpEuler, SchemeId::StrangSplitting}));
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 9}));
    EXPECT_EQ(c.taus, (std::vector<double>{0.1, 0.05, 0.025, 0.0125}));
    EXPECT_EQ(c.t_end, 0.5);
    EXPECT_EQ(c.error_norm, 1.0);
    EXPECT_TRUE(c.error_max_over_steps);
    EXPECT_EQ(c.reference.factor, 50.0);
    EXPECT_FALSE(c.reference.cross_check.has_value());
    EXPECT_EQ(c.reference.tolerance, 1e-9);
    EXPECT_FALSE(c.reference.cache);
    EXPECT_EQ(c.probe.taus, (std::vector<double>{0.125, 0.0625, 0.03125, 0.015625}));
    EXPECT_EQ(c.probe.norm_index, 0.5);
    EXPECT_EQ(c.out_dir, "results");
    EXPECT_EQ(c.formats, (std::vector<std::string>{"json"}));
}

TEST(Config, DefaultsForMinimalFile) {
    const ExperimentConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
    EXPECT_EQ(c.taus.size(), 4u);
    EXPECT_EQ(c.taus.front(), 0.0625);
    EXPECT_EQ(c.dim, 1);
    EXPECT_EQ(c.error_norm, 0.0);
    EXPECT_FALSE(c.error_max_over_steps);
    EXPECT_EQ(c.reference.factor, 100.0);
    EXPECT_EQ(c.reference.cross_check, SchemeId::StrangSplitting);
    EXPECT_EQ(c.reference.tolerance, 1e-8);
    EXPECT_EQ(c.initial.reported_gamma(), std::numeric_limits<double>::infinity());
    EXPECT_EQ(c.formats, (std::vector<std::string>{"csv", "json"}));
    EXPECT_EQ(parse_config(replace(kMinimal, "t_end: 1", "t_end: 1\nseeds: 5")).seeds.size(), 5u);
}

TEST(Config, TwoStepSizesAreRejected) {
    const std::string msg = config_error(replace(kMinimal, "{powers_of_two: [4, 7]}", "[0.1, 0.05]"));
    EXPECT_NE(msg.find("field 'taus'"), std::string::npos) << msg;
}

TEST(Config, InvariantViolations) {
    auto expect_field = [](const std::string& text, const std::string& needle) {
        const std::string msg = config_error(text);
        EXPECT_NE(msg.find(needle), std::string::npos) << msg;
    };
    expect_field(replace(kMinimal, "{powers_of_two: [4, 7]}", "[0.1, 0.2, 0.05, 0.025]"), "decreasing");
    expect_field(replace(kMinimal, "t_end: 1", "t_end: 1.01"), "field 't_end'");
    expect_field(replace(replace(kMinimal, "[duhamel2]", "[filtered_lie]"), "{name: nls}", "{name: heat}"),
                 "field 'schemes'");
    expect_field(replace(kMinimal, "t_end: 1", "t_end: 1\ngrid_x: 1"), "field 'grid_x'");
    expect_field(replace(replace(kMinimal, "{modes: 64}", "{kind: dirichlet, modes: 64}"), "{name: nls}",
                         "{name: half_wave}"),
                 "field 'equation/grid'");
    expect_field(replace(kMinimal, "{modes: 64}", "{modes: 48}"), "InvalidModeCount");
    expect_field(replace(kMinimal, "t_end: 1", "t_end: 1\nreference: {factor: 0.5}"), "reference.factor");
    expect_field(replace(kMinimal, "t_end: 1", "t_end: 1\noutput: {formats: [xml]}"), "output.formats");
    expect_field(replace(kMinimal, "t_end: 1", "t_end: 1\nseeds: 0"), "field 'seeds'");
    EXPECT_EQ(parse_config(replace(kMinimal, "[duhamel2]", "[filtered_lie]")).schemes,
              std::vector<SchemeId>{SchemeId::FilteredLie});
}

TEST(Config, DiagnosticsNameLineAndField) {
    std::string msg = config_error(replace(kFull, "grid: {kind: torus,", "grid: {kind: torus, colour: red,"));
    EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    EXPECT_NE(msg.find("field 'grid.colour'"), std::string::npos) << msg;

    msg = config_error(replace(kFull, "modes: 32", "modes: many"));
    EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    EXPECT_NE(msg.find("field 'grid.modes'"), std::string::npos) << msg;

    msg = config_error(replace(kFull, "name: ginzburg_landau", "name: kdv"));
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("field 'equation.name'"), std::string::npos) << msg;

    msg = config_error(replace(kFull, "schemes: [duhamel1,", "schemes: [rk45,"));
    EXPECT_NE(msg.find("line 7"), std::string::npos) << msg;

    msg = config_error("equation: {name: nls\ngrid: [");
    EXPECT_NE(msg.find("line"), std::string::npos) << msg;

    msg = config_error(replace(kMinimal, "initial_data: {kind: smooth}", "initial_data: {kind: rough}"));
    EXPECT_NE(msg.find("initial_data.gamma"), std::string::npos) << msg;

    msg = config_error("- just\n- a list\n");
    EXPECT_NE(msg.find("mapping"), std::string::npos) << msg;
}

TEST(Config, LoadsShippedConfigs) {
    std::size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(DUHAMEL_CONFIG_DIR)) {
        if (entry.path().extension() != ".yaml") continue;
        EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 10u);
    try {
        load_config("/nonexistent/config.yaml");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
}
