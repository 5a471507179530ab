// galerkin.cpp
#include "idyll/error.hpp"
#include "idyll/lyapunov_perron.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace idyll {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

// Coordinate layout: z[0] = hat(0,0); then j = 0, m = 1..N as pairs
// sqrt2 (Re, Im); then j = 1..J, m = -N..N as pairs sqrt2 (Re, Im).
int index_j0(int m) { return 1 + 2 * (m - 1); }
int index_j(int N, int j, int m) { return 1 + 2 * N + 2 * ((j - 1) * (2 * N + 1) + (m + N)); }

}  // namespace

GalerkinModel::GalerkinModel(const ShearProfile& profile, double alpha, int n_modes, int n_harmonics)
    : alpha_(alpha), N_(n_modes), J_(n_harmonics) {
    if (!(alpha > 0.0)) throw ConfigError("GalerkinModel: alpha must be > 0");
    if (n_modes < 16) throw ConfigError("GalerkinModel: n_modes must be >= 16");
    if (n_harmonics < 1) throw ConfigError("GalerkinModel: n_harmonics must be >= 1");
    dim_ = 1 + 2 * N_ + 2 * J_ * (2 * N_ + 1);
    Ly_ = profile.grid().length();

    A_ = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int j = 1; j <= J_; ++j) {
        const Eigen::MatrixXcd S = assemble_planar(profile, j * alpha_, N_).matrix;
        const int base = index_j(N_, j, -N_);
        for (int r = 0; r < 2 * N_ + 1; ++r) {
            for (int c = 0; c < 2 * N_ + 1; ++c) {
                const cplx a = S(r, c);
                A_(base + 2 * r, base + 2 * c) = a.real();
                A_(base + 2 * r, base + 2 * c + 1) = -a.imag();
                A_(base + 2 * r + 1, base + 2 * c) = a.imag();
                A_(base + 2 * r + 1, base + 2 * c + 1) = a.real();
            }
        }
    }

    // base vorticity -U', truncated to |m| <= N
    const Eigen::VectorXcd hat = fourier_coefficients(profile.u());
    const int n = static_cast<int>(hat.size());
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2 * J_ + 1, 2 * N_ + 1);
    for (int m = -N_; m <= N_; ++m) {
        if (2 * std::abs(m) >= n) continue;
        const cplx u = hat[(m % n + n) % n] / static_cast<double>(n);
        c(J_, m + N_) = -cplx(0.0, kTwoPi * m / Ly_) * u;
    }
    Omega_ = from_coefficients(c);
}

Eigen::MatrixXcd GalerkinModel::to_coefficients(const Eigen::VectorXd& z) const {
    if (z.size() != dim_) throw ConfigError("GalerkinModel: coordinate vector has the wrong size");
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2 * J_ + 1, 2 * N_ + 1);
    c(J_, N_) = z[0];
    for (int m = 1; m <= N_; ++m) {
        const int i = index_j0(m);
        const cplx v(z[i] / kSqrt2, z[i + 1] / kSqrt2);
        c(J_, N_ + m) = v;
        c(J_, N_ - m) = std::conj(v);
    }
    for (int j = 1; j <= J_; ++j) {
        for (int m = -N_; m <= N_; ++m) {
            const int i = index_j(N_, j, m);
            const cplx v(z[i] / kSqrt2, z[i + 1] / kSqrt2);
            c(J_ + j, N_ + m) = v;
            c(J_ - j, N_ - m) = std::conj(v);
        }
    }
    return c;
}

Eigen::VectorXd GalerkinModel::from_coefficients(const Eigen::MatrixXcd& c) const {
    if (c.rows() != 2 * J_ + 1 || c.cols() != 2 * N_ + 1) {
        throw ConfigError("GalerkinModel: coefficient array has the wrong shape");
    }
    Eigen::VectorXd z(dim_);
    z[0] = c(J_, N_).real();
    for (int m = 1; m <= N_; ++m) {
        const int i = index_j0(m);
        z[i] = kSqrt2 * c(J_, N_ + m).real();
        z[i + 1] = kSqrt2 * c(J_, N_ + m).imag();
    }
    for (int j = 1; j <= J_; ++j) {
        for (int m = -N_; m <= N_; ++m) {
            const int i = index_j(N_, j, m);
            z[i] = kSqrt2 * c(J_ + j, N_ + m).real();
            z[i + 1] = kSqrt2 * c(J_ + j, N_ + m).imag();
        }
    }
    return z;
}

Eigen::VectorXd GalerkinModel::nonlinear(const Eigen::VectorXd& z) const {
    // -P(u . grad omega) by exact convolution over the truncated set:
    // hat(u . grad omega)(k) = sum_{p+q=k} (p x q) / |p|^2 hat omega(p) hat omega(q)
    const Eigen::MatrixXcd c = to_coefficients(z);
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(2 * J_ + 1, 2 * N_ + 1);
    for (int jp = -J_; jp <= J_; ++jp) {
        const double px = jp * alpha_;
        for (int mp = -N_; mp <= N_; ++mp) {
            if (jp == 0 && mp == 0) continue;
            const cplx wp = c(J_ + jp, N_ + mp);
            if (wp == 0.0) continue;
            const double py = kTwoPi * mp / Ly_;
            const cplx sp = wp / (px * px + py * py);
            for (int jq = std::max(-J_, -J_ - jp); jq <= std::min(J_, J_ - jp); ++jq) {
                const double qx = jq * alpha_;
                for (int mq = std::max(-N_, -N_ - mp); mq <= std::min(N_, N_ - mp); ++mq) {
                    const double qy = kTwoPi * mq / Ly_;
                    f(J_ + jp + jq, N_ + mp + mq) -= (px * qy - py * qx) * sp * c(J_ + jq, N_ + mq);
                }
            }
        }
    }
    f(J_, N_) = 0.0;
    return from_coefficients(f);
}

double GalerkinModel::energy_norm(const Eigen::VectorXd& z) const {
    const Eigen::MatrixXcd c = to_coefficients(z);
    double e = 0.0;
    for (int j = -J_; j <= J_; ++j) {
        for (int m = -N_; m <= N_; ++m) {
            if (j == 0 && m == 0) continue;
            const double kx = j * alpha_, ky = kTwoPi * m / Ly_;
            e += std::norm(c(J_ + j, N_ + m)) / (kx * kx + ky * ky);
        }
    }
    return std::sqrt(e);
}

LPSystem galerkin_reduce(const ShearProfile& profile, double alpha, int n_modes,
                         std::optional<double> lambda_cs, std::optional<double> lambda_u,
                         const LPOptions& opt) {
    auto model = std::make_shared<GalerkinModel>(profile, alpha, n_modes);
    const Eigen::MatrixXd& A = model->linear();
    double lcs = 0.0, lu = 0.0;
    if (!lambda_cs || !lambda_u) {
        const auto [dcs, du] = default_thresholds(unstable_spectrum(A.cast<cplx>(), 0.0));
        lcs = lambda_cs.value_or(dcs);
        lu = lambda_u.value_or(du);
    } else {
        lcs = *lambda_cs;
        lu = *lambda_u;
    }
    std::ostringstream d;
    d << "galerkin(alpha=" << alpha << ", n_modes=" << n_modes << ", dim=" << model->dim() << ")";
    return make_autonomous_system(
        A, [model](double, const Eigen::VectorXd& z) { return model->nonlinear(z); }, lcs, lu, d.str(),
        opt);
}

}  // namespace idyll
