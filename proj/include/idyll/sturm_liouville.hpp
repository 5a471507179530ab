// sturm_liouville.hpp
// Lowest eigenpair of L phi = -phi'' - K(y) phi with periodic boundary
// conditions, K = -U''/(U - U_s). The ground state (phi_s, -alpha_max^2)
// anchors the neutral Rayleigh mode from which the unstable branch grows.
#pragma once

#include "idyll/fields.hpp"

#include <vector>

namespace idyll {

struct InflectionInfo {
    double value;                 // merged inflection value U_s
    std::vector<double> points;   // zeros of U'' on [0, L)
};

/// Locate the zeros of U'' and the corresponding values of U. Values within
/// merge_tol of each other are merged; several distinct values throw
/// ConfigError, as does a profile without inflection points.
InflectionInfo find_inflection_value(const ShearProfile& profile, double merge_tol = 1e-6);

/// K(y) = -U''/(U - U_s) at the nodes. Where U - U_s vanishes the limit
/// -U'''/U' is used. Throws ConfigError when K <= 0 anywhere.
Eigen::VectorXd build_K(const ShearProfile& profile, double U_s);

struct SLResult {
    double lambda_min = 0.0;
    double alpha_max = 0.0;
    Eigen::VectorXd phi_s;   // positive, phi_s(y_1) = 1 at its first minimum node
    double gap = 0.0;        // lambda_2 - lambda_min
    int min_index = 0;       // node index of y_1
    double residual = 0.0;   // |-phi'' - K phi - lambda phi|_inf / |phi|_inf
};

/// Periodic Fourier collocation matrix of d^2/dy^2 (symmetric, n x n).
Eigen::MatrixXd fourier_d2_matrix(const PeriodicGrid1D& grid);

/// Dense symmetric eigensolve of -D2 - diag(K). Throws NumericalError when
/// lambda_min >= 0 (no instability band) or the ground state is degenerate.
SLResult lowest_eigenpair(const Eigen::VectorXd& K, const PeriodicGrid1D& grid);

}  // namespace idyll
