// test_spectra.cpp
#include "idyll/error.hpp"
#include "idyll/rayleigh.hpp"
#include "idyll/spectra.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace idyll;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ShearProfile sin_profile(int n = 128) { return ShearProfile::sine(PeriodicGrid1D(n, kTwoPi)); }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double norm2(const Eigen::MatrixXcd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

void expect_split_invariants(const DichotomySplit& d, const Eigen::MatrixXcd& A) {
    const Eigen::Index n = A.rows();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const double scale = std::max(1.0, max_abs(d.proj_u));
    EXPECT_LE(max_abs(d.proj_u + d.proj_cs - I), 1e-10);
    EXPECT_LE(max_abs(d.proj_u * d.proj_u - d.proj_u), 1e-10 * scale * scale);
    EXPECT_LE(max_abs(d.proj_cs * d.proj_cs - d.proj_cs), 1e-10 * scale * scale);
    EXPECT_LE(max_abs(d.proj_u * A - A * d.proj_u), 1e-8 * max_abs(A) * scale);
    // restricted spectra on both sides of the gap
    if (d.rank_u() > 0) {
        const Eigen::MatrixXcd Lu = d.basis_u.adjoint() * A * d.basis_u;
        const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(Lu).eigenvalues();
        for (const cplx& l : ev)
            EXPECT_GE(l.real(), d.lambda_u);
    }
    if (d.basis_cs.cols() > 0) {
        const Eigen::MatrixXcd Lcs = d.basis_cs.adjoint() * A * d.basis_cs;
        const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(Lcs).eigenvalues();
        for (const cplx& l : ev)
            EXPECT_LE(l.real(), d.lambda_cs);
    }
}

}  // namespace

TEST(AssemblePlanar, ZeroAndConstantProfiles) {
    const PeriodicGrid1D g(64, kTwoPi);
    const ModalOperator zero = assemble_planar(ShearProfile::from_samples(g, Eigen::VectorXd::Zero(64)), 1.0, 16);
    EXPECT_EQ(zero.matrix.rows(), 33);
    EXPECT_EQ(max_abs(zero.matrix), 0.0);

    const ModalOperator one = assemble_planar(ShearProfile::from_samples(g, Eigen::VectorXd::Ones(64)), 1.0, 16);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Identity(33, 33) * cplx(0.0, -1.0);
    EXPECT_LE(max_abs(one.matrix - expected), 1e-14);
    const Spectrum s = unstable_spectrum(one.matrix, 0.0);
    EXPECT_EQ(s.count_unstable, 0);
    for (const cplx& l : s.eigenvalues) EXPECT_LE(std::abs(l.real()), 1e-14);
    EXPECT_EQ(unstable_spectrum(one, 0.0).count_unstable, 0);
}

TEST(AssemblePlanar, Errors) {
    EXPECT_THROW(assemble_planar(sin_profile(), 0.0, 16), ConfigError);
    EXPECT_THROW(assemble_planar(sin_profile(), -0.5, 16), ConfigError);
    EXPECT_THROW(assemble_planar(sin_profile(), 0.5, 8), ConfigError);
}

TEST(UnstableSpectrum, DiagonalExample) {
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
    D.diagonal() << 1.0, -1.0, cplx(0.0, 3.0);
    const Spectrum s = unstable_spectrum(D, 0.0);
    EXPECT_EQ(s.count_unstable, 1);
    EXPECT_NEAR(std::abs(s.eigenvalues[0] - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(s.eigenvalues[1].imag(), 3.0, 1e-14);
}

TEST(UnstableSpectrum, SineProfileHasOneConjugatePair) {
    const ModalOperator op = assemble_planar(sin_profile(), 0.8, 32);
    const Spectrum s = unstable_spectrum(op, 0.0);
    ASSERT_EQ(s.count_unstable, 2);
    EXPECT_NEAR(s.eigenvalues[0].real(), s.eigenvalues[1].real(), 1e-10);
    EXPECT_NEAR(s.eigenvalues[0].imag(), -s.eigenvalues[1].imag(), 1e-10);

    // the shooting oracle sees exactly one root (winding number 1) in the upper half plane box
    // that contains every admissible unstable c (Howard semicircle, Im c >= growth / alpha / 4)
    const RayleighProblem rp(sin_profile(), 0.0);
    const double gmin = s.eigenvalues[0].real() / 0.8 / 4.0;
    auto I = [&](cplx c) { return rp.discriminant(0.64, c); };
    EXPECT_EQ(oracle::winding_number(I, -0.2, 0.2, gmin, 1.0, 40), 1);
}

TEST(UnstableSpectrum, ConjugationClosedForRealProfiles) {
    const PeriodicGrid1D g(64, 5.0);
    const ShearProfile p = ShearProfile::from_samples(g, [&] {
        Eigen::VectorXd u(64);
        for (int j = 0; j < 64; ++j) {
            const double y = kTwoPi * g.node(j) / 5.0;
            u[j] = std::sin(y) + 0.2 * std::cos(2 * y) + 0.1;
        }
        return u;
    }());
    for (double alpha : {0.3, 0.7}) {
        const Spectrum s = unstable_spectrum(assemble_planar(p, alpha, 20), 0.0);
        for (const cplx& l : s.eigenvalues) {
            double best = 1e300;
            for (const cplx& m : s.eigenvalues) best = std::min(best, std::abs(m - std::conj(l)));
            EXPECT_LE(best, 1e-8);
        }
    }
}

TEST(UnstableSpectrum, ResolutionConvergence) {
    const Spectrum a = unstable_spectrum(assemble_planar(sin_profile(256), 0.8, 64), 0.0);
    const Spectrum b = unstable_spectrum(assemble_planar(sin_profile(512), 0.8, 128), 0.0);
    EXPECT_LE(std::abs(a.eigenvalues[0] - b.eigenvalues[0]), 1e-8);
}

TEST(UnstableSpectrum, AgreesWithShooting) {
    const RayleighProblem rp(sin_profile(), 0.0);
    cplx seed(0.0, 0.2);
    for (double alpha : {0.8, 0.5, 0.3}) {
        const ComplexMode m = rp.find_unstable_mode(alpha, seed);
        seed = m.c;
        const Spectrum s = unstable_spectrum(assemble_planar(sin_profile(256), alpha, 64), 0.0);
        EXPECT_LE(std::abs(m.growth_rate - s.eigenvalues[0].real()) / m.growth_rate, 1e-3) << alpha;
    }
}

TEST(UnstableSpectrum, SinBetaProfilesAreUnstable) {
    // U = sin(beta y) needs a cell of length 2 pi k / beta; the smallest one
    // containing the 2 pi cell of the criterion is k = ceil(beta)
    for (double beta : {1.2, 1.5}) {
        const int k = static_cast<int>(std::ceil(beta));
        const PeriodicGrid1D g(128, kTwoPi * k / beta);
        const ShearProfile p = ShearProfile::sine(g, k);
        bool found = false;
        for (double alpha : {0.25 * beta, 0.5 * beta, 0.75 * beta}) {
            found = found || unstable_spectrum(assemble_planar(p, alpha, 32), 0.0).count_unstable > 0;
        }
        EXPECT_TRUE(found) << beta;
    }
}

TEST(PhaseSpeeds, SineProfile) {
    const ModalOperator op = assemble_planar(sin_profile(), 0.8, 32);
    const std::vector<cplx> c = phase_speeds(op);
    ASSERT_EQ(c.size(), 65u);
    const Spectrum s = unstable_spectrum(op.matrix, 0.0);
    EXPECT_NEAR(c[0].imag() * 0.8, s.eigenvalues[0].real(), 1e-12);
    EXPECT_LE(std::abs(c[0].real()), 1e-8);
}

TEST(Shear3D, ZIndependentReducesToPlanar) {
    const ShearField2D f = ShearField2D::sine(64, 8, 1.0, 0.0);
    const ModalOperator op3 = assemble_shear3d(f, 0.8, 16, 1);
    EXPECT_EQ(op3.matrix.rows(), 2 * 33 * 3);
    const ModalOperator op2 = assemble_planar(ShearProfile::sine(PeriodicGrid1D(64, kTwoPi)), 0.8, 16);
    const std::vector<cplx> c3 = phase_speeds(op3);
    for (const cplx& c : phase_speeds(op2)) {
        double best = 1e300;
        for (const cplx& d : c3) best = std::min(best, std::abs(d - c));
        EXPECT_LE(best, 1e-8) << c;
    }
}

TEST(Shear3D, PersistenceUnderSmallZPerturbation) {
    std::vector<double> dist;
    cplx c0;
    for (double eps : {0.0, 0.02, 0.05, 0.1}) {
        const ModalOperator op = assemble_shear3d(ShearField2D::sine(32, 16, 1.0, eps), 0.8, 12, 2);
        const cplx c = phase_speeds(op).front();
        if (eps == 0.0) c0 = c;
        dist.push_back(std::abs(c - c0));
    }
    EXPECT_LE(dist[2], 0.05 * 0.8);  // leading eigenvalue lambda = -i alpha c within 0.05
    for (int i = 1; i < 4; ++i) EXPECT_GT(dist[i], dist[i - 1]);
    // the shift is even in eps (z -> -z symmetry), so C fit from the two smallest
    // amplitudes is a quadratic coefficient: |c(eps) - c0| <= C eps^2 with slack for the
    // quartic term
    const double C = std::max(dist[1] / (0.02 * 0.02), dist[2] / (0.05 * 0.05));
    EXPECT_LE(dist[3], 1.5 * C * 0.1 * 0.1);
}

TEST(Shear3D, Errors) {
    EXPECT_THROW(assemble_shear3d(ShearField2D::sine(16, 16, 1.0, 0.1), 0.0, 4, 2), ConfigError);
    EXPECT_THROW(ShearField2D(PeriodicGrid1D(16, kTwoPi), PeriodicGrid1D(8, kTwoPi), Eigen::MatrixXd::Zero(8, 8)),
                 ConfigError);
}

TEST(DichotomySplit, DiagonalExample) {
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
    D.diagonal() << 2.0, -1.0;
    const DichotomySplit d = dichotomy_split(D, 0.0, 1.0);
    EXPECT_EQ(d.rank_u(), 1);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(2, 2);
    P(0, 0) = 1.0;
    EXPECT_LE(max_abs(d.proj_u - P), 1e-14);
    EXPECT_NEAR(d.M, 1.0, 1e-12);
    EXPECT_EQ(d.M_grid.size(), 21u);
    EXPECT_DOUBLE_EQ(d.M_grid.back(), 10.0);
}

TEST(DichotomySplit, JordanBlockHasTransientGrowth) {
    Eigen::MatrixXcd J(2, 2);
    J << 1.0, 1.0, 0.0, 1.0;
    // backward propagator e^{-t} [[1, -t], [0, 1]] weighted by e^{lambda_u t}
    const DichotomySplit d = dichotomy_split(J, 0.0, 0.9);
    EXPECT_EQ(d.rank_u(), 2);
    EXPECT_GT(d.M, 1.0);
    double oracle_M = 1.0;
    for (int j = 0; j <= 20; ++j) {
        const double t = 0.5 * j;
        Eigen::MatrixXcd E(2, 2);
        E << 1.0, -t, 0.0, 1.0;
        oracle_M = std::max(oracle_M, norm2(E) * std::exp(-t) * std::exp(0.9 * t));
    }
    EXPECT_NEAR(d.M, oracle_M, 1e-10 * oracle_M);
}

TEST(DichotomySplit, GapViolationAndBadThresholds) {
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
    D.diagonal() << 2.0, 0.5, -1.0;
    EXPECT_THROW(dichotomy_split(D, 0.0, 1.0), NumericalError);
    EXPECT_THROW(dichotomy_split(D, 1.0, 0.0), ConfigError);
}

TEST(DichotomySplit, RandomSimilarityProperty) {
    oracle::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int nu = 1 + trial % 3, ns = 2 + trial % 4, n = nu + ns;
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < nu; ++i) D(i, i) = cplx(rng.uniform(1.5, 3.0), rng.uniform(-2, 2));
        for (int i = nu; i < n; ++i) D(i, i) = cplx(rng.uniform(-3.0, 0.2), rng.uniform(-2, 2));
        Eigen::MatrixXcd S(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) S(i, j) = cplx(rng.normal(), rng.normal());
        S += 3.0 * Eigen::MatrixXcd::Identity(n, n);
        const Eigen::MatrixXcd A = S * D * S.inverse();
        const DichotomySplit d = dichotomy_split(A, 0.5, 1.2);
        EXPECT_EQ(d.rank_u(), nu);
        EXPECT_EQ(d.basis_cs.cols(), ns);
        EXPECT_GE(d.M, 1.0);
        expect_split_invariants(d, A);
        // the measured M bounds the sampled restricted propagators
        const Eigen::MatrixXcd Lcs = d.basis_cs.adjoint() * A * d.basis_cs;
        for (double t : d.M_grid) {
            EXPECT_LE(norm2((t * Lcs).exp()) * std::exp(-0.5 * t), d.M * (1 + 1e-9));
        }
    }
}

TEST(DichotomySplit, PlanarSineOperator) {
    const ModalOperator op = assemble_planar(sin_profile(), 0.8, 32);
    const Spectrum s = unstable_spectrum(op, 0.0);
    const double lead = s.eigenvalues[0].real();
    const auto [lcs, lu] = default_thresholds(s);
    EXPECT_NEAR(lcs, 0.01 * lead, 1e-14);
    EXPECT_NEAR(lu, 0.9 * lead, 1e-14);
    const DichotomySplit d = dichotomy_split(op, lcs, lu);
    EXPECT_EQ(d.rank_u(), 2);
    expect_split_invariants(d, op.realified());

    // (A2) on the sampled grid with the measured M
    const Eigen::MatrixXcd A = op.realified();
    const Eigen::MatrixXcd Lu = d.basis_u.adjoint() * A * d.basis_u;
    const Eigen::MatrixXcd Lcs = d.basis_cs.adjoint() * A * d.basis_cs;
    for (double t : d.M_grid) {
        EXPECT_LE(norm2((t * Lcs).exp()), d.M * std::exp(lcs * t) * (1 + 1e-8)) << t;
        EXPECT_LE(norm2((-t * Lu).exp()), d.M * std::exp(-lu * t) * (1 + 1e-8)) << t;
    }
}

TEST(DefaultThresholds, SeveralUnstableRealParts) {
    Spectrum s;
    s.eigenvalues = {cplx(1.0, 0.0), cplx(0.5, 0.0), cplx(0.005, 0.0), cplx(-1.0, 0.0)};
    const auto [lcs, lu] = default_thresholds(s);
    EXPECT_NEAR(lcs, 0.01, 1e-15);
    EXPECT_NEAR(lu, 0.45, 1e-15);
    s.eigenvalues = {cplx(-0.1, 0.0)};
    EXPECT_THROW(default_thresholds(s), NumericalError);
}

TEST(ReorderSchur, PreservesFactorization) {
    oracle::Rng rng(2);
    const int n = 7;
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cplx(rng.normal(), rng.normal());
    Eigen::ComplexSchur<Eigen::MatrixXcd> cs(A);
    Eigen::MatrixXcd T = cs.matrixT(), Q = cs.matrixU();
    std::vector<bool> first(n);
    for (int i = 0; i < n; ++i) first[i] = T(i, i).real() > 0.0;
    const int k = static_cast<int>(std::count(first.begin(), first.end(), true));
    reorder_schur(T, Q, first);
    EXPECT_LE(max_abs(Q * T * Q.adjoint() - A), 1e-12 * max_abs(A) * n);
    EXPECT_LE(max_abs(Q.adjoint() * Q - Eigen::MatrixXcd::Identity(n, n)), 1e-13);
    for (int i = 0; i < n; ++i) {
        EXPECT_EQ(T(i, i).real() > 0.0, i < k) << i;
        for (int j = 0; j < i; ++j) EXPECT_LE(std::abs(T(i, j)), 1e-13);
    }
}
