// fields.hpp
// Periodic grids, trigonometric (Fourier) differentiation, shear profiles,
// 3D steady vector fields and the periodic Hodge/Leray decomposition.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace idyll {

using cplx = std::complex<double>;

/// Uniform collocation grid y_j = j L / n on a circle of length L.
class PeriodicGrid1D {
public:
    PeriodicGrid1D(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return length_ / n_; }
    double node(int j) const { return length_ * j / n_; }
    Eigen::VectorXd nodes() const;

    /// Angular wavenumber of FFT bin k (0 <= k < n), signed: 2*pi*k~/L with
    /// k~ in [-n/2, n/2]. The Nyquist bin reports +n/2.
    double wavenumber(int k) const;

    bool operator==(const PeriodicGrid1D& o) const { return n_ == o.n_ && length_ == o.length_; }

private:
    int n_;
    double length_;
};

/// order-th derivative of the trigonometric interpolant at the nodes.
/// Odd derivatives drop the Nyquist mode; order must be in [1, 4].
Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& samples, const PeriodicGrid1D& grid,
                                    int order);
Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& samples, const PeriodicGrid1D& grid,
                                     int order);

/// Unnormalized DFT coefficients of real samples, hat_k = sum_j u_j e^{-i k y_j 2pi/L}.
Eigen::VectorXcd fourier_coefficients(const Eigen::VectorXd& samples);

/// A periodic shear profile U(y) with derivatives at the nodes. Off-node
/// values come from the analytic callbacks when the profile was built from
/// functions, otherwise from the trigonometric interpolant.
class ShearProfile {
public:
    using Fn = std::function<double(double)>;

    /// Derivatives computed spectrally from the samples.
    static ShearProfile from_samples(const PeriodicGrid1D& grid, Eigen::VectorXd u,
                                     std::optional<double> inflection_value = std::nullopt);

    /// Analytic U, U', U''. The derivatives are checked against spectral
    /// derivatives of the samples (relative 1e-8); throws ConfigError if not.
    static ShearProfile from_functions(const PeriodicGrid1D& grid, Fn u, Fn du, Fn ddu,
                                       std::optional<double> inflection_value = std::nullopt);

    /// U(y) = amplitude * sin(2 pi k y / L) + offset, inflection value = offset.
    static ShearProfile sine(const PeriodicGrid1D& grid, int k = 1, double amplitude = 1.0,
                             double offset = 0.0);

    const PeriodicGrid1D& grid() const { return grid_; }
    const Eigen::VectorXd& u() const { return u_; }
    const Eigen::VectorXd& du() const { return du_; }
    const Eigen::VectorXd& ddu() const { return ddu_; }
    std::optional<double> inflection_value() const { return inflection_value_; }
    bool analytic() const { return static_cast<bool>(fn_u_); }

    /// d^order U / dy^order at an arbitrary y (order 0..3).
    double eval(double y, int order = 0) const;

    double min() const { return u_.minCoeff(); }
    double max() const { return u_.maxCoeff(); }

private:
    ShearProfile(const PeriodicGrid1D& grid, Eigen::VectorXd u);

    PeriodicGrid1D grid_;
    Eigen::VectorXd u_, du_, ddu_;
    Eigen::VectorXcd coeffs_;  // normalized: u(y) = sum_k coeffs_k e^{i kappa_k y}
    std::optional<double> inflection_value_;
    Fn fn_u_, fn_du_, fn_ddu_;
};

/// Steady velocity field on the 3-torus with its Jacobian.
class VectorField3D {
public:
    using Vec3 = Eigen::Vector3d;
    using Mat3 = Eigen::Matrix3d;
    using VelocityFn = std::function<Vec3(const Vec3&)>;
    using JacobianFn = std::function<Mat3(const Vec3&)>;

    /// Parallel shear (U(y,z), 0, 0). Carried alongside the callbacks so that
    /// shear-only identities can be monitored.
    struct Shear {
        std::function<double(double, double)> U, U_y, U_z;
    };

    VectorField3D(std::array<double, 3> periods, VelocityFn velocity, JacobianFn jacobian,
                  std::string descriptor, std::optional<Shear> shear = std::nullopt);

    static VectorField3D constant(const Vec3& u);
    /// U = amp_y sin y + amp_z sin z on the 2 pi-periodic cube.
    static VectorField3D sine_shear(double amp_y, double amp_z);
    /// Arnold-Beltrami-Childress flow (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).
    static VectorField3D abc(double A, double B, double C);

    Vec3 velocity(const Vec3& x) const { return velocity_(x); }
    Mat3 jacobian(const Vec3& x) const { return jacobian_(x); }
    const std::array<double, 3>& periods() const { return periods_; }
    const std::optional<Shear>& shear() const { return shear_; }
    const std::string& descriptor() const { return descriptor_; }

    Vec3 reduce(const Vec3& x) const;

private:
    std::array<double, 3> periods_;
    VelocityFn velocity_;
    JacobianFn jacobian_;
    std::string descriptor_;
    std::optional<Shear> shear_;
};

struct VectorFieldCheck {
    double max_divergence = 0.0;
    double max_jacobian_error = 0.0;  // relative to max(1, |J|)
};

/// Divergence and Jacobian-vs-central-difference consistency at pseudo-random
/// points of the torus.
VectorFieldCheck check_vector_field(const VectorField3D& field, int n_points = 1000,
                                    std::uint64_t seed = 1);

/// Velocity samples v(x_i, y_j) stored as (n_x, n_y) arrays.
struct PlanarField {
    PeriodicGrid1D grid_x, grid_y;
    Eigen::MatrixXd vx, vy;

    PlanarField(const PeriodicGrid1D& gx, const PeriodicGrid1D& gy, Eigen::MatrixXd vx_,
                Eigen::MatrixXd vy_);
    static PlanarField zeros(const PeriodicGrid1D& gx, const PeriodicGrid1D& gy);
};

struct LerayDecomposition {
    PlanarField divfree;
    PlanarField gradient;
};

/// X = w + grad h with div w = 0, h periodic and mean-zero. The mean of X
/// stays in w.
LerayDecomposition leray_project(const PlanarField& field);

/// Spectral divergence d_x v_x + d_y v_y.
Eigen::MatrixXd divergence(const PlanarField& field);

struct VorticityMomentum {
    Eigen::MatrixXd omega;
    double s;  // mean horizontal momentum
};

/// omega = d_x v_y - d_y v_x and s = mean(v_x). Requires |div v| <= div_tol.
VorticityMomentum vorticity_and_momentum(const PlanarField& field, double div_tol = 1e-10);

/// v = J grad Laplacian^{-1} omega + s e_1. omega must have zero mean.
PlanarField velocity_from_vorticity(const Eigen::MatrixXd& omega, double s,
                                    const PeriodicGrid1D& grid_x,
                                    const PeriodicGrid1D& grid_y);

namespace fft2 {
Eigen::MatrixXcd forward(const Eigen::MatrixXd& a);
Eigen::MatrixXd inverse_real(const Eigen::MatrixXcd& a);
}  // namespace fft2

}  // namespace idyll
