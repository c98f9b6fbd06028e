#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "duhamel/field.hpp"
#include "duhamel/grid.hpp"
#include "test_util.hpp"

using namespace duhamel;
using duhamel::testing::random_field;
using duhamel::testing::rel_l2;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename Fn>
void expect_code(ErrorCode code, Fn&& fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

} // namespace

TEST(Grid, RejectsBadShapes) {
    expect_code(ErrorCode::InvalidDim, [] { make_grid(GridKind::PeriodicTorus, 4, 16); });
    expect_code(ErrorCode::InvalidDim, [] { make_grid(GridKind::PeriodicTorus, 0, 16); });
    expect_code(ErrorCode::InvalidModeCount, [] { make_grid(GridKind::PeriodicTorus, 1, 12); });
    expect_code(ErrorCode::InvalidModeCount, [] { make_grid(GridKind::PeriodicTorus, 1, 4); });
    expect_code(ErrorCode::KindDimMismatch, [] { make_grid(GridKind::DirichletInterval, 2, 16); });
}

TEST(Grid, FrequencyLayout) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 8);
    const std::vector<int> expected{0, 1, 2, 3, -4, -3, -2, -1};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(g->frequency(i, 0), expected[i]);
        EXPECT_EQ(g->frequency(g->mirror(i), 0), expected[i] == -4 ? -4 : -expected[i]);
    }
    const auto d = make_grid(GridKind::DirichletInterval, 1, 8);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(d->frequency(i, 0), static_cast<int>(i) + 1);
        EXPECT_NEAR(d->coordinate(i, 0), kPi * static_cast<double>(i + 1) / 9.0, 1e-15);
    }
    const auto g3 = make_grid(GridKind::PeriodicTorus, 3, 8);
    EXPECT_EQ(g3->size(), 512u);
    EXPECT_DOUBLE_EQ(g3->k_squared(1 * 64 + 2 * 8 + 7), 1.0 + 4.0 + 1.0);
}

TEST(Transform, TorusMatchesDirectSum1d) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 32);
    const SpectralField c = random_field(g, 7);
    const SpectralField p = to_physical(c);
    for (std::size_t j = 0; j < 32; ++j) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < 32; ++i) s += c[i] * std::exp(Complex(0.0, g->frequency(i, 0) * g->coordinate(j, 0)));
        EXPECT_LT(std::abs(s / std::sqrt(32.0) - p[j]), 1e-13);
    }
}

TEST(Transform, TorusMatchesDirectSum2d) {
    const auto g = make_grid(GridKind::PeriodicTorus, 2, 8);
    const SpectralField c = random_field(g, 9);
    const SpectralField p = to_physical(c);
    for (std::size_t j = 0; j < g->size(); ++j) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double phase = g->frequency(i, 0) * g->coordinate(j, 0) + g->frequency(i, 1) * g->coordinate(j, 1);
            s += c[i] * std::exp(Complex(0.0, phase));
        }
        EXPECT_LT(std::abs(s / 8.0 - p[j]), 1e-13);
    }
}

TEST(Transform, SineMatchesDirectSum) {
    for (int n : {8, 64, 256}) {
        const auto g = make_grid(GridKind::DirichletInterval, 1, n);
        const SpectralField c = random_field(g, 11);
        const SpectralField p = to_physical(c);
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            Complex s = 0.0;
            for (int k = 1; k <= n; ++k) s += c[static_cast<std::size_t>(k - 1)] * std::sin(kPi * (j + 1) * k / (n + 1));
            worst = std::max(worst, std::abs(s * std::sqrt(2.0 / (n + 1)) - p[static_cast<std::size_t>(j)]));
        }
        EXPECT_LT(worst, 1e-12) << "N=" << n;
    }
}

TEST(Transform, SingleModes) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 64);
    const SpectralField c = to_coefficient(duhamel::testing::sample_1d(g, [](double x) { return std::exp(Complex(0, 3 * x)); }));
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_NEAR(std::abs(c[i]), g->frequency(i, 0) == 3 ? 8.0 : 0.0, 1e-12);
}

TEST(Transform, SineSingleMode) {
    const auto d = make_grid(GridKind::DirichletInterval, 1, 64);
    const SpectralField c = to_coefficient(duhamel::testing::sample_1d(d, [](double x) { return Complex(std::sin(5 * x)); }));
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_NEAR(c[i].real(), d->frequency(i, 0) == 5 ? std::sqrt(65.0 / 2.0) : 0.0, 1e-12);
}

TEST(Transform, RoundTripAndParseval) {
    for (auto [kind, dim, n] : {std::tuple{GridKind::PeriodicTorus, 1, 256}, std::tuple{GridKind::PeriodicTorus, 2, 32},
                                std::tuple{GridKind::PeriodicTorus, 3, 16}, std::tuple{GridKind::DirichletInterval, 1, 128}}) {
        const auto g = make_grid(kind, dim, n);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const SpectralField c = random_field(g, seed);
            const SpectralField p = to_physical(c);
            EXPECT_NEAR(l2_norm(p), l2_norm(c), 1e-12 * l2_norm(c));
            EXPECT_LT(rel_l2(to_coefficient(p), c), 1e-14);
        }
    }
}

TEST(Transform, RepresentationIsChecked) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 16);
    const SpectralField c(g);
    expect_code(ErrorCode::RepresentationMismatch, [&] { to_coefficient(c); });
    expect_code(ErrorCode::RepresentationMismatch, [&] { to_physical(to_physical(c)); });
    expect_code(ErrorCode::RepresentationMismatch, [&] { sobolev_norm(to_physical(c), 1.0); });
    expect_code(ErrorCode::RepresentationMismatch, [&] { auto x = c + to_physical(c); });
    expect_code(ErrorCode::GridMismatch, [&] { auto x = c + SpectralField(make_grid(GridKind::PeriodicTorus, 1, 32)); });
}

TEST(Transform, ConcurrentUseIsConsistent) {
    for (auto kind : {GridKind::PeriodicTorus, GridKind::DirichletInterval}) {
        const auto g = make_grid(kind, 1, 128);
        const SpectralField c = random_field(g, 21);
        const SpectralField expected = to_physical(c);
        std::vector<double> diffs(4, 1.0);
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < diffs.size(); ++t)
                pool.emplace_back([&, t] {
                    double worst = 0.0;
                    for (int r = 0; r < 200; ++r) worst = std::max(worst, l2_norm(to_physical(c) - expected));
                    diffs[t] = worst;
                });
        }
        for (double d : diffs) EXPECT_EQ(d, 0.0);
    }
}

TEST(Field, ConjugationCommutesWithTransform) {
    for (auto kind : {GridKind::PeriodicTorus, GridKind::DirichletInterval}) {
        const auto g = kind == GridKind::PeriodicTorus ? make_grid(kind, 2, 16) : make_grid(kind, 1, 64);
        const SpectralField c = random_field(g, 4);
        EXPECT_LT(rel_l2(to_physical(conj(c)), conj(to_physical(c))), 1e-14);
        EXPECT_EQ(l2_norm(conj(conj(c)) - c), 0.0);
    }
}

TEST(Field, SobolevNormOfSingleMode) {
    const auto g = make_grid(GridKind::PeriodicTorus, 2, 16);
    SpectralField f(g);
    const std::size_t idx = 3 * 16 + 2; // k = (3, 2)
    f[idx] = Complex(0.6, 0.8);
    for (double s : {0.0, 0.5, 1.0, 1.75})
        EXPECT_NEAR(sobolev_norm(f, s), std::pow(14.0, 0.5 * s), 1e-13);
    EXPECT_DOUBLE_EQ(sobolev_norm(f, 0.0), l2_norm(f));
}

TEST(Field, DealiasKeepsTwoThirds) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 256);
    EXPECT_EQ(dealias_cutoff(*g), 85);
    SpectralField f(g);
    for (auto& v : f.values()) v = 1.0;
    const SpectralField d = dealias(f);
    for (std::size_t i = 0; i < f.size(); ++i)
        EXPECT_EQ(d[i], std::abs(g->frequency(i, 0)) <= 85 ? Complex(1.0) : Complex(0.0));

    const auto s = make_grid(GridKind::DirichletInterval, 1, 128);
    EXPECT_EQ(dealias_cutoff(*s), 85);
    // Dealiasing is a projection.
    const SpectralField r = random_field(g, 5);
    EXPECT_EQ(l2_norm(dealias(dealias(r)) - dealias(r)), 0.0);
}

TEST(Field, ResampleInterpolatesAndTruncates) {
    for (auto kind : {GridKind::PeriodicTorus, GridKind::DirichletInterval}) {
        const auto coarse = make_grid(kind, 1, 32);
        const auto fine = make_grid(kind, 1, 64);
        SpectralField c = duhamel::testing::band_limited(coarse, 10, 8);
        const SpectralField up = resample(c, fine);
        EXPECT_LT(rel_l2(resample(up, coarse), c), 1e-15);
        if (kind == GridKind::PeriodicTorus) {
            // Band-limited data agrees at the shared sample points x_j = 2πj/32.
            const SpectralField pc = to_physical(c), pf = to_physical(up);
            for (std::size_t j = 0; j < 32; ++j) EXPECT_LT(std::abs(pc[j] - pf[2 * j]), 1e-13);
        }
    }
}
