// sturm_liouville.cpp
#include "idyll/sturm_liouville.hpp"

#include "idyll/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace idyll {

InflectionInfo find_inflection_value(const ShearProfile& profile, double merge_tol) {
    const auto& g = profile.grid();
    const int n = g.n();
    const Eigen::VectorXd& ddu = profile.ddu();
    const double scale = ddu.cwiseAbs().maxCoeff();
    if (scale < 1e-12 * std::max(1.0, profile.u().cwiseAbs().maxCoeff())) {
        throw ConfigError("profile has no inflection points (U'' vanishes identically)");
    }
    const double zero_tol = 1e-12 * scale;

    InflectionInfo info{0.0, {}};
    auto u2 = [&](double y) { return profile.eval(y, 2); };
    for (int j = 0; j < n; ++j) {
        const double y0 = g.node(j);
        const double y1 = y0 + g.spacing();
        const double f0 = ddu[j];
        const double f1 = ddu[(j + 1) % n];
        if (std::abs(f0) <= zero_tol) {
            info.points.push_back(y0);
        } else if (f0 * f1 < 0.0 && std::abs(f1) > zero_tol) {
            boost::math::tools::eps_tolerance<double> tol(50);
            std::uintmax_t it = 100;
            auto r = boost::math::tools::toms748_solve(u2, y0, y1, f0, f1, tol, it);
            info.points.push_back(0.5 * (r.first + r.second));
        }
    }
    if (info.points.empty()) {
        throw ConfigError("profile has no inflection points (U'' never changes sign)");
    }

    std::vector<double> values;
    for (double y : info.points) values.push_back(profile.eval(y, 0));
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    if (hi - lo > merge_tol) {
        std::ostringstream os;
        os << "multiple inflection values detected (spread " << (hi - lo) << " > " << merge_tol
           << "); a single inflection value is required";
        throw ConfigError(os.str());
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    info.value = sum / static_cast<double>(values.size());
    return info;
}

Eigen::VectorXd build_K(const ShearProfile& profile, double U_s) {
    const auto& g = profile.grid();
    const Eigen::VectorXd& u = profile.u();
    const Eigen::VectorXd& du = profile.du();
    const Eigen::VectorXd& ddu = profile.ddu();
    const Eigen::VectorXd dddu = spectral_derivative(u, g, 3);

    const double u_scale = std::max(1.0, (u.array() - U_s).abs().maxCoeff());
    const double tol_zero = 1e-10 * u_scale;
    const double tol_zero2 = 1e-8 * std::max(1e-300, ddu.cwiseAbs().maxCoeff());

    Eigen::VectorXd K(g.n());
    for (int j = 0; j < g.n(); ++j) {
        const double d = u[j] - U_s;
        if (std::abs(d) < tol_zero) {
            if (std::abs(ddu[j]) > tol_zero2) {
                std::ostringstream os;
                os << "build_K: U = U_s at y = " << g.node(j)
                   << " but U'' does not vanish there";
                throw ConfigError(os.str());
            }
            if (std::abs(du[j]) < 1e-12) {
                throw ConfigError("build_K: degenerate inflection point (U' = 0 where U = U_s)");
            }
            K[j] = -dddu[j] / du[j];  // L'Hopital
        } else {
            K[j] = -ddu[j] / d;
        }
    }
    if (!K.allFinite() || K.minCoeff() <= 0.0) {
        std::ostringstream os;
        os << "build_K: K = -U''/(U - U_s) is not positive everywhere (min K = " << K.minCoeff()
           << ")";
        throw ConfigError(os.str());
    }
    return K;
}

Eigen::MatrixXd fourier_d2_matrix(const PeriodicGrid1D& grid) {
    const int n = grid.n();
    const double h = 2.0 * std::numbers::pi / n;
    const double s = std::pow(2.0 * std::numbers::pi / grid.length(), 2);
    Eigen::MatrixXd D(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (j == k) {
                D(j, k) = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
            } else {
                const int d = j - k;
                const double sn = std::sin(0.5 * d * h);
                D(j, k) = -((d % 2 == 0) ? 1.0 : -1.0) / (2.0 * sn * sn);
            }
        }
    }
    return s * D;
}

SLResult lowest_eigenpair(const Eigen::VectorXd& K, const PeriodicGrid1D& grid) {
    if (K.size() != grid.n()) throw ConfigError("lowest_eigenpair: K size does not match grid");
    if (!K.allFinite()) throw ConfigError("lowest_eigenpair: non-finite K");

    Eigen::MatrixXd A = -fourier_d2_matrix(grid);
    A.diagonal() -= K;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("lowest_eigenpair: eigensolver failed");

    SLResult r;
    r.lambda_min = es.eigenvalues()[0];
    r.gap = es.eigenvalues()[1] - r.lambda_min;
    if (r.lambda_min >= 0.0) {
        throw NumericalError(
            "no instability band: lowest Sturm-Liouville eigenvalue is non-negative "
            "(K is not positive on average)");
    }
    if (r.gap < 1e-10 * std::abs(r.lambda_min)) {
        throw NumericalError("lowest_eigenpair: lowest eigenvalue is not simple");
    }
    r.alpha_max = std::sqrt(-r.lambda_min);

    Eigen::VectorXd phi = es.eigenvectors().col(0);
    if (phi.sum() < 0.0) phi = -phi;
    if (phi.minCoeff() <= 0.0) throw NumericalError("lowest_eigenpair: ground state not positive");

    const double m = phi.minCoeff();
    int idx = 0;
    for (int j = 0; j < phi.size(); ++j) {
        if (phi[j] <= m * (1.0 + 1e-12)) {
            idx = j;
            break;
        }
    }
    phi /= phi[idx];
    r.min_index = idx;
    r.phi_s = phi;

    const Eigen::VectorXd d2 = spectral_derivative(phi, grid, 2);
    const Eigen::VectorXd res = -d2 - K.cwiseProduct(phi) - r.lambda_min * phi;
    r.residual = res.cwiseAbs().maxCoeff() / phi.cwiseAbs().maxCoeff();
    return r;
}

}  // namespace idyll
