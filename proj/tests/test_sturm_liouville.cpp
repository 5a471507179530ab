// test_sturm_liouville.cpp
#include "idyll/error.hpp"
#include "idyll/rayleigh.hpp"
#include "idyll/sturm_liouville.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace idyll;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd sample(const PeriodicGrid1D& g, const std::function<double(double)>& f) {
    Eigen::VectorXd v(g.n());
    for (int j = 0; j < g.n(); ++j) v[j] = f(g.node(j));
    return v;
}

ShearProfile sin_plus_sin3(int n) {
    const PeriodicGrid1D g(n, kTwoPi);
    return ShearProfile::from_functions(
        g, [](double y) { return std::sin(y) + 0.1 * std::sin(3 * y); },
        [](double y) { return std::cos(y) + 0.3 * std::cos(3 * y); },
        [](double y) { return -std::sin(y) - 0.9 * std::sin(3 * y); });
}

}  // namespace

TEST(BuildK, SineProfilesGiveConstantPotential) {
    for (double L : {kTwoPi, 4.0, 10.0}) {
        const PeriodicGrid1D g(64, L);
        const Eigen::VectorXd K = build_K(ShearProfile::sine(g), 0.0);
        const double k2 = std::pow(kTwoPi / L, 2);
        EXPECT_LE((K.array() - k2).abs().maxCoeff(), 1e-9 * k2) << L;
    }
}

TEST(BuildK, LHopitalValueMatchesRefinedGrid) {
    // U = sin y + 0.1 sin 3y: single inflection value 0, K(0) = 37/13 by L'Hopital
    const ShearProfile p = sin_plus_sin3(64);
    const InflectionInfo info = find_inflection_value(p);
    EXPECT_NEAR(info.value, 0.0, 1e-10);
    const Eigen::VectorXd K = build_K(p, info.value);
    EXPECT_GT(K.minCoeff(), 0.0);
    EXPECT_NEAR(K[0], 37.0 / 13.0, 1e-6);
    EXPECT_NEAR(K[32], 37.0 / 13.0, 1e-6);  // y = pi
    const Eigen::VectorXd Kf = build_K(sin_plus_sin3(256), 0.0);
    for (int j = 0; j < 64; ++j) EXPECT_NEAR(K[j], Kf[4 * j], 1e-6) << j;
}

TEST(BuildK, RejectsSeveralInflectionValues) {
    // sin y + 0.3 sin 2y has distinct inflection values and K < 0 somewhere
    const PeriodicGrid1D g(64, kTwoPi);
    const ShearProfile p =
        ShearProfile::from_samples(g, sample(g, [](double y) { return std::sin(y) + 0.3 * std::sin(2 * y); }));
    EXPECT_THROW(find_inflection_value(p), ConfigError);
    EXPECT_THROW(build_K(p, 0.0), ConfigError);
}

TEST(LowestEigenpair, ConstantPotential) {
    const PeriodicGrid1D g(64, kTwoPi);
    const SLResult r = lowest_eigenpair(Eigen::VectorXd::Ones(64), g);
    EXPECT_NEAR(r.lambda_min, -1.0, 1e-12);
    EXPECT_NEAR(r.alpha_max, 1.0, 1e-12);
    EXPECT_LE((r.phi_s.array() - 1.0).abs().maxCoeff(), 1e-10);
    EXPECT_NEAR(r.gap, 1.0, 1e-10);
    EXPECT_LE(r.residual, 1e-8);
}

TEST(LowestEigenpair, SineProfileOnLongCell) {
    const double L = 9.0;
    const PeriodicGrid1D g(96, L);
    const double k2 = std::pow(kTwoPi / L, 2);
    const SLResult r = lowest_eigenpair(build_K(ShearProfile::sine(g), 0.0), g);
    EXPECT_NEAR(r.lambda_min, -k2, 1e-10);
    EXPECT_LE((r.phi_s.array() - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(LowestEigenpair, MathieuOracle) {
    // -phi'' - (2 + cos y) phi = lambda phi is Mathieu's equation with q = 2:
    // lambda = a_0(2) / 4 - 2, a_0(2) = -1.5139568850565202
    const double expected = -1.5139568850565202 / 4.0 - 2.0;
    const PeriodicGrid1D g64(64, kTwoPi), g256(256, kTwoPi);
    auto K = [](double y) { return 2.0 + std::cos(y); };
    const SLResult a = lowest_eigenpair(sample(g64, K), g64);
    const SLResult b = lowest_eigenpair(sample(g256, K), g256);
    EXPECT_NEAR(a.lambda_min, b.lambda_min, 1e-9);
    EXPECT_NEAR(a.lambda_min, expected, 1e-9);
    EXPECT_GT(a.phi_s.minCoeff(), 0.0);
    EXPECT_LE(a.residual, 1e-8);
    // normalization: phi_s(y1) = 1 at its minimum
    EXPECT_NEAR(a.phi_s[a.min_index], 1.0, 1e-14);
    EXPECT_NEAR(a.phi_s.minCoeff(), 1.0, 1e-14);
}

TEST(LowestEigenpair, RayleighQuotientBoundOnRandomPotentials) {
    const PeriodicGrid1D g(64, 5.0);
    oracle::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd K = Eigen::VectorXd::Constant(64, rng.uniform(0.5, 2.0));
        for (int k = 1; k <= 3; ++k) {
            const double a = rng.uniform(-0.15, 0.15), b = rng.uniform(-0.15, 0.15);
            K += sample(g, [&](double y) { return a * std::cos(kTwoPi * k * y / 5.0) + b * std::sin(kTwoPi * k * y / 5.0); });
        }
        ASSERT_GT(K.minCoeff(), 0.0);
        const SLResult r = lowest_eigenpair(K, g);
        EXPECT_LE(r.lambda_min, -K.mean() + 1e-12) << trial;
        EXPECT_GT(r.phi_s.minCoeff(), 0.0);
        EXPECT_GT(r.gap, 0.0);
        EXPECT_LE(r.residual, 1e-8);
    }
}

TEST(LowestEigenpair, ShiftCovariance) {
    const PeriodicGrid1D g(64, kTwoPi);
    const Eigen::VectorXd K = sample(g, [](double y) { return 1.5 + 0.4 * std::cos(y) + 0.2 * std::sin(2 * y); });
    const SLResult a = lowest_eigenpair(K, g);
    for (double c : {0.3, 1.7}) {
        const SLResult b = lowest_eigenpair((K.array() + c).matrix(), g);
        EXPECT_NEAR(b.lambda_min, a.lambda_min - c, 1e-10);
        EXPECT_LE((b.phi_s - a.phi_s).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(LowestEigenpair, NoInstabilityBand) {
    const PeriodicGrid1D g(32, kTwoPi);
    EXPECT_THROW(lowest_eigenpair(Eigen::VectorXd::Constant(32, -0.5), g), NumericalError);
}

TEST(LowestEigenpair, GroundStateIsNeutralRayleighMode) {
    // phi_s and alpha_max close the Rayleigh problem at c = U_s exactly
    for (const ShearProfile& p : {ShearProfile::sine(PeriodicGrid1D(128, kTwoPi)), sin_plus_sin3(128)}) {
        const RayleighProblem rp(p, 0.0);
        const double a = rp.alpha_max() * rp.alpha_max();
        EXPECT_LE(std::abs(rp.neutral_discriminant(a)), 1e-6);
        // and not at a nearby a: the root is isolated
        EXPECT_GT(std::abs(rp.neutral_discriminant(a + 0.05)), 1e-3);
    }
}
