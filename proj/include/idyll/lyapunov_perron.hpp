// lyapunov_perron.hpp
// Local unstable manifolds of z' = A z + F(t, z) by the Lyapunov-Perron
// integral equation on backward half-lines:
//     z_u(t)  = T(t,0) P_u z_u0 + int_0^t T(t,s) P_u F(s, z(s)) ds
//     z_cs(t) = int_{-inf}^t T(t,s) P_cs F(s, z(s)) ds,           t <= 0,
// solved by Picard iteration in the weighted norm sup_t e^{-lambda t}|z(t)|.
// The graph of the unstable manifold is h(z_u0) = z_cs(0).
#pragma once

#include "idyll/parallel.hpp"
#include "idyll/spectra.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace idyll {

/// Real finite-dimensional system with a constant spectral splitting.
struct LPSystem {
    using Propagator = std::function<Eigen::MatrixXd(double t, double t0)>;
    using Nonlinearity = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& z)>;

    int dim = 0;
    std::string descriptor;
    Eigen::MatrixXd proj_u, proj_cs;    // real spectral projections
    Eigen::MatrixXd basis_u, basis_cs;  // orthonormal real bases of X_u, X_cs
    double lambda_u = 0.0, lambda_cs = 0.0;
    double M = 1.0;                     // dichotomy constant from the split (t in [0, 10])
    Propagator propagator;
    Nonlinearity nonlinearity;
    std::optional<Eigen::MatrixXd> generator;  // set for autonomous systems
    double C0 = 1.0;  // max |T(-t) P_u| e^{lambda_u t}, |T(t) P_cs| e^{-lambda_cs t}
    double C1 = 0.0;  // sampled sup |F(t,z)| e^{K mu t} / |z|^2
    double mu = 0.0, K = 0.0;

    int rank_u() const { return static_cast<int>(basis_u.cols()); }
    /// Full-space vector of X_u from coordinates in basis_u.
    Eigen::VectorXd embed_u(const Eigen::VectorXd& coords) const { return basis_u * coords; }
    Eigen::VectorXd z_dot(double t, const Eigen::VectorXd& z) const;  // autonomous only
};

struct LPOptions {
    double dt = 0.05;
    double T_max = 30.0;
    double delta1_safety = 0.8;   // delta_1 = safety * largest admissible value
    double c1_radius = 0.1;       // radius of the C_1 sampling sphere
    int c1_samples = 100;
    std::uint64_t seed = 1;
    double tail_tol = 1e-10;      // allowed tail bound at t = 0
    bool enforce_radius = true;   // refuse |z_u0| > delta_1 / (2 C_0)
};

/// Build an autonomous system from A and F, splitting with dichotomy_split
/// and measuring C_0 (grid t in [0, T_max], step 0.5) and C_1 (sampled).
LPSystem make_autonomous_system(const Eigen::MatrixXd& A, LPSystem::Nonlinearity F,
                                double lambda_cs, double lambda_u, std::string descriptor,
                                const LPOptions& opt = {});

/// z_u' = z_u, z_cs' = -z_cs + z_u^2; unstable manifold z_cs = z_u^2 / 3.
LPSystem toy_system(double lambda_cs = -0.9, double lambda_u = 0.9, const LPOptions& opt = {});

/// A = diag(1, -1), F = 0.
LPSystem linear_toy_system(const LPOptions& opt = {});

struct LPConstants {
    double lambda = 0.0;   // (lambda_cs + lambda_u) / 2
    double delta1 = 0.0;
    double radius = 0.0;   // delta_1 / (2 C_0)
};

/// Lambda and delta_1 from the gap and smallness conditions; NumericalError
/// if the gap condition lambda in (lambda_cs + K mu, lambda_u - K mu) fails.
LPConstants lp_constants(const LPSystem& sys, const LPOptions& opt = {});

struct WeightedPath {
    std::vector<double> t;   // 0, -dt, ..., -T_max
    Eigen::MatrixXd z;       // dim x t.size()
    double lambda = 0.0;
    double norm_lambda = 0.0;
    double tail_bound = 0.0;      // bound on the neglected int_{-inf}^{-T_max} at t = 0
    double tail_bound_weighted = 0.0;  // same, in the weighted norm

    static WeightedPath zeros(int dim, double lambda, const LPOptions& opt);
    void update_norm();
};

WeightedPath apply_lp_map(const WeightedPath& path, const Eigen::VectorXd& z_u0,
                          const LPSystem& sys, const LPOptions& opt = {});

struct FixedPoint {
    WeightedPath path;
    double contraction_factor = 0.0;
    int iterations = 0;
    double bound = 0.0;      // 2 C_0 |z_u0|
    bool bound_holds = false;  // |z(t)| <= 2 C_0 |z_u0| e^{lambda t} at every grid time
    bool within_radius = true; // |z_u0| <= delta_1 / (2 C_0)
};

FixedPoint solve_fixed_point(const Eigen::VectorXd& z_u0, const LPSystem& sys, double tol = 1e-13,
                             int max_iter = 200, const LPOptions& opt = {});

struct UnstableGraph {
    std::vector<Eigen::VectorXd> z_u;  // coordinates in basis_u
    std::vector<Eigen::VectorXd> h;    // coordinates in basis_cs
    double radius = 0.0;
    double tangency_norm = 0.0;
    double max_contraction = 0.0;
};

UnstableGraph unstable_graph(const LPSystem& sys, double radius, int n_samples,
                             const LPOptions& opt = {}, Exec exec = Exec::parallel);

/// h at one point (coordinates in basis_u -> coordinates in basis_cs).
Eigen::VectorXd graph_value(const LPSystem& sys, const Eigen::VectorXd& u_coords,
                            const LPOptions& opt = {});

struct InvarianceReport {
    double max_distance = 0.0;   // max |z_cs - h(z_u)| along forward trajectories
    int n_trajectories = 0;
    int n_checks = 0;
    double backward_rate = 0.0;  // fitted decay exponent of |z(t)| on [-10, 0]
    double lambda = 0.0;
};

InvarianceReport verify_local_invariance(const UnstableGraph& graph, const LPSystem& sys,
                                         double horizon, const LPOptions& opt = {},
                                         Exec exec = Exec::parallel);

// ------------------------------------------------------------ Galerkin model

/// Truncated 2D Euler dynamics of a vorticity perturbation about the shear
/// U(y): modes e^{i(j alpha x + m y)}, |j| <= 2, |m| <= n_modes, real
/// coordinates scaled so the Euclidean norm is the rms vorticity.
class GalerkinModel {
public:
    GalerkinModel(const ShearProfile& profile, double alpha, int n_modes, int n_harmonics = 2);

    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    const Eigen::MatrixXd& linear() const { return A_; }
    Eigen::VectorXd nonlinear(const Eigen::VectorXd& z) const;
    /// Base vorticity -U' in the same coordinates.
    const Eigen::VectorXd& base_vorticity() const { return Omega_; }
    /// Kinetic-energy norm of the perturbation: sqrt(sum |hat omega|^2 / |k|^2).
    double energy_norm(const Eigen::VectorXd& z) const;

    /// Coordinates <-> complex coefficients hat omega(j, m), j in [-J, J].
    Eigen::MatrixXcd to_coefficients(const Eigen::VectorXd& z) const;
    Eigen::VectorXd from_coefficients(const Eigen::MatrixXcd& c) const;

private:
    double alpha_;
    int N_, J_, dim_;
    double Ly_;
    Eigen::MatrixXd A_;
    Eigen::VectorXd Omega_;
};

LPSystem galerkin_reduce(const ShearProfile& profile, double alpha, int n_modes,
                         std::optional<double> lambda_cs = std::nullopt,
                         std::optional<double> lambda_u = std::nullopt,
                         const LPOptions& opt = {});

}  // namespace idyll
