// bicharacteristics.hpp
// Ray (bicharacteristic-amplitude) system of the linearized Euler equations
//     x' = u(x),  xi' = -J^T xi,  b' = -J b + 2 (J b . xi) xi / |xi|^2,
// J = Du(x), with finite-time estimators of the essential growth exponent
// Lambda_m and of the largest Lyapunov exponent mu_0 of the particle flow.
//
// Sampled estimators come in two kernels: an OpenMP one and a serial
// reference. Both fill per-sample arrays indexed by sample number and reduce
// in index order, so their outputs are bitwise identical.
#pragma once

#include "idyll/fields.hpp"
#include "idyll/parallel.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace idyll {

struct RayState {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Vector3d xi = Eigen::Vector3d::UnitX();
    Eigen::Vector3d b = Eigen::Vector3d::UnitY();

    Eigen::Matrix<double, 9, 1> pack() const;
    static RayState unpack(const Eigen::Matrix<double, 9, 1>& s);
};

/// Time derivative of a ray state. Throws NumericalError when |xi| < 1e-8.
RayState ray_rhs(const RayState& state, const VectorField3D& flow);

struct RayTrajectory {
    std::vector<double> t;          // sample times (t = 0 and T included)
    std::vector<RayState> states;   // x unreduced
    double drift_b_xi = 0.0;        // max |b.xi - b0.xi0|
    std::optional<double> drift_shear;  // max drift of (U_y b2 + U_z b3)|xi|^2
    long steps = 0;

    const RayState& final() const { return states.back(); }
};

/// Adaptive integration of the ray system to time T with relative tolerance
/// tol (absolute tol * 1e-2). States are recorded at T j / n_out,
/// j = 0..n_out. NumericalError on step underflow or when an invariant
/// drifts by more than 1e3 tol (a sign of an inconsistent Jacobian).
RayTrajectory integrate_ray(const RayState& state0, const VectorField3D& flow, double T,
                            double tol = 1e-10, int n_out = 1);

/// Exact shear solution: xi is linear in t, x advances at U, and b follows
/// from adaptive quadrature of its explicitly known forcing.
RayState shear_closed_form(double U_y, double U_z, double U_val, const RayState& state0,
                           double t);

/// min over |xi_0| = 1 of |xi(t)|^2 for a shear with gradient (U_y, U_z).
double min_xi_norm(double U_y, double U_z, double t);

/// Deterministic samples of (x0, xi0, b0) with |xi0| = |b0| = 1, b0 . xi0 = 0:
/// a 6D additive-recurrence low-discrepancy sequence, Cranley-Patterson shifted
/// by the seed, mapped area-preservingly to the sphere.
std::vector<RayState> sample_ray_states(const VectorField3D& flow, int n_samples,
                                        std::uint64_t seed);

/// c3 t^3 + c4 envelope for max_samples |b(t)|.
struct CubicBound {
    double c3 = 0.0, c4 = 0.0;
    double fit_T = 0.0;
    double operator()(double t) const { return c3 * t * t * t + c4; }
};

/// Fit from an envelope sampled at times t (ascending, starting at 0):
/// c4 = max over t <= 1, c3 = max over 1 <= t <= fit_T of (E - c4)/t^3.
CubicBound fit_cubic_bound(const std::vector<double>& t, const std::vector<double>& envelope,
                           double fit_T);

struct LambdaEstimate {
    int m = 0;
    double T = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
    double value = 0.0;               // max of per_sample
    std::vector<double> per_sample;   // (1/T) ln(|b(T)| |xi(T)|^m)
    std::optional<CubicBound> bound;  // shear flows only
    std::optional<double> bias_bound; // ln(max(1, c3 T^3 + c4)) / T
};

LambdaEstimate estimate_lambda_m(const VectorField3D& flow, int m, double T, int n_samples,
                                 std::uint64_t seed, Exec exec = Exec::parallel,
                                 double tol = 1e-10);

struct Mu0Estimate {
    double value = 0.0;
    std::vector<double> per_sample;  // max over the four propagations
};

/// Largest finite-time growth rate of y' = J y and y' = -J^T y, forward and
/// backward, with renormalization every unit of time.
Mu0Estimate estimate_mu0(const VectorField3D& flow, double T, int n_samples, std::uint64_t seed,
                         Exec exec = Exec::parallel, double tol = 1e-10);

}  // namespace idyll
