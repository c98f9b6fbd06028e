#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "duhamel/harness/reference.hpp"
#include "duhamel/initial_data.hpp"
#include "test_util.hpp"

using namespace duhamel;
using namespace duhamel::harness;
using duhamel::testing::rel_l2;

namespace {

namespace fs = std::filesystem;

// Fresh scratch directory per test.
fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("duhamel_ref_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct Fixture {
    GridPtr grid = make_grid(GridKind::PeriodicTorus, 1, 64);
    EquationSpec eq = make_equation(EquationKind::Nls, grid);
    SpectralField u0 = smooth_field(grid, 6, 11, 4.0);
    ReferencePolicy policy = loose();

    // The cross-check scheme is only second order; these steps are coarse.
    static ReferencePolicy loose() {
        ReferencePolicy p;
        p.tolerance = 1e-4;
        return p;
    }
};

} // namespace

TEST(Reference, ZeroHorizonReturnsInitialData) {
    Fixture s;
    const ReferenceResult r = reference_solution(s.eq, s.u0, 0.0, 0.01, {});
    EXPECT_EQ(r.field.values().size(), s.u0.values().size());
    EXPECT_EQ(l2_norm(r.field - s.u0), 0.0);
    EXPECT_EQ(r.info.steps, 0u);
    EXPECT_EQ(r.info.checksum, checksum(s.u0));
}

TEST(Reference, LinearProblemIsExact) {
    // With no nonlinearity every scheme reduces to the exact propagator.
    Fixture s;
    s.eq.components.clear();
    const ReferenceResult r = reference_solution(s.eq, s.u0, 0.5, 1.0 / 64.0, {});
    EXPECT_LT(rel_l2(r.field, propagate(s.eq.l_symbol, 0.5, s.u0)), 1e-13);
    ASSERT_TRUE(r.info.cross_check_diff.has_value());
    EXPECT_LT(*r.info.cross_check_diff, 1e-13);
    EXPECT_EQ(r.info.steps, 32u);
    EXPECT_EQ(r.info.cross_check_scheme, "strang");
}

TEST(Reference, CacheHitIsBitIdentical) {
    Fixture s;
    const fs::path dir = scratch_dir("hit");
    const ReferenceResult first = reference_solution(s.eq, s.u0, 0.25, 1.0 / 512.0, s.policy, dir);
    EXPECT_FALSE(first.info.cache_hit);
    const fs::path file = dir / (first.info.cache_key + ".field");
    ASSERT_TRUE(fs::exists(file));
    // Header is 48 bytes, then 16 bytes per coefficient.
    EXPECT_EQ(fs::file_size(file), 48u + 16u * s.grid->size());

    const ReferenceResult second = reference_solution(s.eq, s.u0, 0.25, 1.0 / 512.0, s.policy, dir);
    EXPECT_TRUE(second.info.cache_hit);
    EXPECT_EQ(second.info.checksum, first.info.checksum);
    EXPECT_EQ(second.info.cross_check_diff, first.info.cross_check_diff);
    EXPECT_EQ(std::memcmp(second.field.values().data(), first.field.values().data(), first.field.values().size_bytes()),
              0);

    ReferencePolicy off = s.policy;
    off.cache = false;
    EXPECT_FALSE(reference_solution(s.eq, s.u0, 0.25, 1.0 / 512.0, off, dir).info.cache_hit);
}

TEST(Reference, CacheKeyTracksInputs) {
    Fixture s;
    const std::string base = cache_key(s.eq, s.u0, 1.0, 0.01);
    EXPECT_EQ(base, cache_key(s.eq, s.u0, 1.0, 0.01));
    EXPECT_EQ(base.size(), 64u);
    EXPECT_NE(base, cache_key(s.eq, s.u0, 1.0, 0.005));
    EXPECT_NE(base, cache_key(s.eq, s.u0, 0.5, 0.01));
    EXPECT_NE(base, cache_key(s.eq, smooth_field(s.grid, 6, 12, 4.0), 1.0, 0.01));
    EquationParams p;
    p.sign = -1;
    EXPECT_NE(base, cache_key(make_equation(EquationKind::Nls, s.grid, p), s.u0, 1.0, 0.01));
}

TEST(Reference, MismatchedOrCorruptCacheIsIgnored) {
    Fixture s;
    const fs::path dir = scratch_dir("corrupt");
    const fs::path file = dir / "entry.field";
    write_cache_entry(file, {s.u0, 0.01, 1e-12});

    const auto ok = read_cache_entry(file, s.grid);
    ASSERT_TRUE(ok.has_value());
    EXPECT_EQ(ok->tau_ref, 0.01);
    EXPECT_EQ(ok->cross_check_diff, 1e-12);
    EXPECT_EQ(l2_norm(ok->field - s.u0), 0.0);

    EXPECT_FALSE(read_cache_entry(file, make_grid(GridKind::PeriodicTorus, 1, 128)));
    EXPECT_FALSE(read_cache_entry(file, make_grid(GridKind::DirichletInterval, 1, 64)));
    EXPECT_FALSE(read_cache_entry(dir / "absent.field", s.grid));

    fs::resize_file(file, fs::file_size(file) - 8);
    EXPECT_FALSE(read_cache_entry(file, s.grid));

    std::ofstream(file, std::ios::binary | std::ios::trunc) << "NOTACACHEFILE";
    EXPECT_FALSE(read_cache_entry(file, s.grid));
}

TEST(Reference, CorruptEntryIsRecomputed) {
    Fixture s;
    const fs::path dir = scratch_dir("recompute");
    const ReferenceResult first = reference_solution(s.eq, s.u0, 0.25, 1.0 / 256.0, s.policy, dir);
    std::ofstream(dir / (first.info.cache_key + ".field"), std::ios::binary | std::ios::trunc) << "garbage";
    const ReferenceResult again = reference_solution(s.eq, s.u0, 0.25, 1.0 / 256.0, s.policy, dir);
    EXPECT_FALSE(again.info.cache_hit);
    EXPECT_EQ(again.info.checksum, first.info.checksum);
    EXPECT_TRUE(read_cache_entry(dir / (first.info.cache_key + ".field"), s.grid).has_value());
}

TEST(Reference, StepDividesHorizon) {
    EXPECT_DOUBLE_EQ(reference_step(1.0 / 4096.0, 100.0, 1.0), 1.0 / 409600.0);
    const double tau = reference_step(0.03, 7.0, 0.9);
    EXPECT_LE(tau, 0.03 / 7.0);
    const double n = 0.9 / tau;
    EXPECT_NEAR(n, std::round(n), 1e-9);
    EXPECT_EQ(step_count(tau, 0.9), static_cast<std::size_t>(std::round(n)));
}

TEST(Reference, DisagreementBeyondToleranceThrows) {
    Fixture s;
    ReferencePolicy strict;
    strict.tolerance = 1e-15;
    try {
        reference_solution(s.eq, s.u0, 0.5, 1.0 / 16.0, strict);
        ADD_FAILURE() << "no disagreement reported";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ReferenceDisagreement);
        EXPECT_NE(std::string(e.what()).find("strang"), std::string::npos);
    }
    strict.cross_check.reset();
    EXPECT_NO_THROW(reference_solution(s.eq, s.u0, 0.5, 1.0 / 16.0, strict));
}

TEST(Reference, UnsupportedCrossCheckIsSkipped) {
    Fixture s;
    const auto heat = make_equation(EquationKind::Heat, s.grid);
    ReferencePolicy p;
    p.cross_check = SchemeId::FilteredLie;
    const ReferenceResult r = reference_solution(heat, s.u0, 0.25, 1.0 / 64.0, p);
    EXPECT_FALSE(r.info.cross_check_scheme.has_value());
    EXPECT_FALSE(r.info.cross_check_diff.has_value());
}
