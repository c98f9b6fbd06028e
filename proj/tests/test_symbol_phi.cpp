#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

#include "duhamel/phi.hpp"
#include "duhamel/symbol.hpp"
#include "test_util.hpp"

using namespace duhamel;
using duhamel::testing::random_field;
using duhamel::testing::rel_l2;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

struct BigComplex {
    Big re, im;
};

BigComplex sub(const BigComplex& a, const BigComplex& b) { return {a.re - b.re, a.im - b.im}; }
BigComplex div(const BigComplex& a, const BigComplex& b) {
    const Big d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

// φ₁ and φ₂ in 50-digit arithmetic straight from their definitions.
Complex phi_oracle(int order, Complex zd) {
    if (zd == Complex(0.0)) return order == 1 ? 1.0 : 0.5;
    const BigComplex z{Big(zd.real()), Big(zd.imag())};
    const Big r = boost::multiprecision::exp(z.re);
    const BigComplex ez{r * boost::multiprecision::cos(z.im), r * boost::multiprecision::sin(z.im)};
    const BigComplex one{Big(1), Big(0)};
    const BigComplex p1 = div(sub(ez, one), z);
    const BigComplex p = order == 1 ? p1 : div(sub(ez, p1), z);
    return {static_cast<double>(p.re), static_cast<double>(p.im)};
}

std::vector<Complex> sample_points() {
    std::vector<Complex> z{0.0};
    for (int e = -12; e <= 3; ++e)
        for (double m : {1.0, 2.5, 7.0}) {
            const double a = m * std::pow(10.0, e);
            for (Complex dir : {Complex(0, 1), Complex(0, -1), Complex(-1, 0), Complex(-0.6, 0.8), Complex(0.3, -0.2)})
                if (a * std::abs(dir) < 600.0) z.push_back(a * dir);
        }
    // Points straddling the series/closed-form switch.
    for (double r : {0.999999, 1.0, 1.000001}) z.push_back(Complex(0.0, r));
    return z;
}

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

TEST(Phi, MatchesHighPrecisionOracle) {
    for (int order : {1, 2})
        for (Complex z : sample_points()) {
            const Complex expected = phi_oracle(order, z);
            const Complex got = phi(order, z);
            EXPECT_LE(std::abs(got - expected), 4e-15 * std::max(1.0, std::abs(expected)))
                << "order " << order << " at z = " << z;
        }
}

TEST(Phi, ValuesAtZero) {
    EXPECT_EQ(phi1(0.0), Complex(1.0));
    EXPECT_EQ(phi2(0.0), Complex(0.5));
}

TEST(Phi, RecurrencesOnImaginaryAxis) {
    for (int i = -80; i <= 80; ++i) {
        const Complex z(0.0, i == 0 ? 0.0 : std::copysign(std::pow(10.0, std::abs(i) / 10.0 - 4.0), i));
        EXPECT_LT(std::abs(z * phi1(z) - (std::exp(z) - 1.0)), 1e-13);
        EXPECT_LT(std::abs(z * phi2(z) - (std::exp(z) - phi1(z))), 1e-13);
    }
}

TEST(Phi, RejectsBadOrderAndNonSkewGenerator) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 16);
    expect_code(ErrorCode::InvalidOrder, [] { phi(3, 0.1); });
    expect_code(ErrorCode::InvalidOrder, [&] { phi_symbol(0, MultiplierSymbol::zero(g), 0.1); });
    expect_code(ErrorCode::NonSkewSymbol, [&] { phi_symbol(1, symbol_for(OperatorName::Laplacian, g), 0.1); });
}

TEST(Symbol, CatalogValues) {
    const auto g = make_grid(GridKind::PeriodicTorus, 2, 16);
    const Complex I(0.0, 1.0);
    const Complex alpha(0.1, 1.0);
    const auto lap = symbol_for(OperatorName::Laplacian, g);
    const auto alap = symbol_for(OperatorName::AlphaLaplacian, g, {alpha, 0.0});
    const auto ilap = symbol_for(OperatorName::ILaplacian, g);
    const auto half = symbol_for(OperatorName::HalfWave, g);
    const auto kg = symbol_for(OperatorName::KgBracket, g, {1.0, 2.0});
    const auto kgi = symbol_for(OperatorName::KgBracketInverse, g, {1.0, 2.0});
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double k2 = std::pow(g->frequency(i, 0), 2) + std::pow(g->frequency(i, 1), 2);
        EXPECT_EQ(lap[i], Complex(-k2));
        EXPECT_EQ(alap[i], -alpha * k2);
        EXPECT_EQ(ilap[i], -I * k2);
        EXPECT_NEAR(std::abs(half[i] - I * std::sqrt(k2)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(kg[i] - I * std::sqrt(k2 + 4.0)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(kgi[i] * kg[i] - I), 0.0, 1e-14);
    }
    EXPECT_EQ(operator_from_string("half_wave"), OperatorName::HalfWave);
    expect_code(ErrorCode::BadParams, [] { operator_from_string("biharmonic"); });
}

TEST(Symbol, BasisAndMassRestrictions) {
    const auto d = make_grid(GridKind::DirichletInterval, 1, 16);
    expect_code(ErrorCode::UnsupportedOnBasis, [&] { symbol_for(OperatorName::HalfWave, d); });
    expect_code(ErrorCode::UnsupportedOnBasis, [&] { symbol_for(OperatorName::KgBracket, d); });
    EXPECT_NO_THROW(symbol_for(OperatorName::AlphaLaplacian, d, {Complex(1, 1), 0.0}));
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 16);
    expect_code(ErrorCode::ZeroMass, [&] { symbol_for(OperatorName::KgBracketInverse, g, {1.0, 0.0}); });
}

TEST(Symbol, SkewPartOfGenerator) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 32);
    // 𝒜 = -ℒ + conj(ℒ): 0 for real symbols, 2i·Im-part otherwise.
    EXPECT_TRUE(a_symbol(symbol_for(OperatorName::Laplacian, g)).is_zero());
    const auto a_nls = a_symbol(symbol_for(OperatorName::ILaplacian, g));
    const auto a_gl = a_symbol(symbol_for(OperatorName::AlphaLaplacian, g, {Complex(0.1, 1.0), 0.0}));
    for (std::size_t i = 0; i < g->size(); ++i) {
        EXPECT_EQ(a_nls[i], Complex(0.0, 2.0 * g->k_squared(i)));
        EXPECT_EQ(a_gl[i], Complex(0.0, 2.0 * g->k_squared(i)));
    }
    EXPECT_TRUE(a_nls.is_skew());
    const auto odd = MultiplierSymbol::from_function(g, [](const auto& k, double) { return Complex(0.0, k[0]); });
    expect_code(ErrorCode::NonEvenSymbol, [&] { a_symbol(odd); });
}

TEST(Symbol, PropagatorGroupAndSemigroup) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 64);
    const SpectralField u = random_field(g, 3);
    const auto skew = symbol_for(OperatorName::ILaplacian, g);
    const auto diss = symbol_for(OperatorName::AlphaLaplacian, g, {Complex(0.1, 1.0), 0.0});
    EXPECT_LT(rel_l2(propagate(skew, 0.3, propagate(skew, 0.2, u)), propagate(skew, 0.5, u)), 1e-14);
    EXPECT_LT(rel_l2(propagate(skew, -0.7, propagate(skew, 0.7, u)), u), 1e-14);
    EXPECT_LT(rel_l2(propagate(diss, 0.3, propagate(diss, 0.2, u)), propagate(diss, 0.5, u)), 1e-14);
    EXPECT_EQ(l2_norm(propagate(diss, 0.0, u) - u), 0.0);
    expect_code(ErrorCode::NegativeTimeForSemigroup, [&] { propagate(diss, -0.1, u); });
    EXPECT_LE(l2_norm(propagate(diss, 0.4, u)), l2_norm(u));
    EXPECT_NEAR(l2_norm(propagate(skew, 12.5, u)), l2_norm(u), 1e-12 * l2_norm(u));
}

TEST(Symbol, PhiMultiplierAppliesPerMode) {
    const auto g = make_grid(GridKind::PeriodicTorus, 1, 32);
    const auto a = a_symbol(symbol_for(OperatorName::ILaplacian, g));
    const SpectralField u = random_field(g, 12);
    const SpectralField v = phi_apply(2, a, 0.05, u);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(v[i], u[i] * phi2(0.05 * a[i]));
}
