// spectra.hpp
// Finite-matrix linearized Euler operators in a single e^{i alpha x} sector,
// their spectra, and the unstable / center-stable spectral split.
//
// Planar operator (vorticity form, Fourier modes e^{i kappa_m y}, |m| <= N):
//     omega_t = -i alpha U omega + i alpha U'' psi,  (d_yy - alpha^2) psi = omega.
// 3D shear operator (velocity form on k-perpendicular bases, pressure removed
// by the modal Leray projector):
//     q_t = P[-i alpha U q - e_x (U_y v + U_z w)],  eigenvalue lambda = -i alpha c.
//
// A sector matrix is complex; the real flow couples the +alpha and -alpha
// sectors, so spectra and splits taken from a ModalOperator use its
// realification, whose spectrum is sigma(A) united with conj sigma(A).
#pragma once

#include "idyll/fields.hpp"

#include <vector>

namespace idyll {

enum class OperatorKind { planar_vorticity, shear3d_modal };

struct ModalOperator {
    double alpha = 0.0;
    Eigen::MatrixXcd matrix;
    int n_modes = 0;    // |m| <= n_modes in y
    int n_modes_z = 0;  // |p| <= n_modes_z in z (shear3d only)
    OperatorKind kind = OperatorKind::planar_vorticity;

    /// Real form [[Re A, -Im A], [Im A, Re A]] (stored with zero imaginary part).
    Eigen::MatrixXcd realified() const;
};

ModalOperator assemble_planar(const ShearProfile& profile, double alpha, int n_modes);

/// U sampled on a doubly periodic (y, z) grid: U(j, k) = U(y_j, z_k).
struct ShearField2D {
    PeriodicGrid1D grid_y, grid_z;
    Eigen::MatrixXd U;

    ShearField2D(const PeriodicGrid1D& gy, const PeriodicGrid1D& gz, Eigen::MatrixXd u);
    /// amp_y sin y + amp_z sin z on the 2 pi x 2 pi cell.
    static ShearField2D sine(int n_y, int n_z, double amp_y, double amp_z);
};

/// Two unknowns per (m, p) mode: coefficients on an orthonormal basis of the
/// plane perpendicular to k = (alpha, kappa_m, mu_p).
ModalOperator assemble_shear3d(const ShearField2D& field, double alpha, int n_modes,
                               int n_modes_z);

struct Spectrum {
    std::vector<cplx> eigenvalues;  // decreasing real part, then decreasing imaginary part
    int count_unstable = 0;         // Re lambda > threshold + 1e-9 max|lambda|
};

Spectrum unstable_spectrum(const Eigen::MatrixXcd& matrix, double threshold);
/// Uses the realified operator.
Spectrum unstable_spectrum(const ModalOperator& op, double threshold);

/// Phase speeds c = i lambda / alpha of the operator's own sector, ordered
/// by decreasing growth rate Re lambda.
std::vector<cplx> phase_speeds(const ModalOperator& op);

struct DichotomySplit {
    double lambda_u = 0.0, lambda_cs = 0.0;
    Eigen::MatrixXcd generator;      // the matrix that was split
    Eigen::MatrixXcd basis_u, basis_cs;  // orthonormal columns
    Eigen::MatrixXcd proj_u, proj_cs;
    double M = 1.0;
    std::vector<double> M_grid;      // times at which M was sampled

    int rank_u() const { return static_cast<int>(basis_u.cols()); }
};

/// lambda_cs = 0.01 * lead, lambda_u = 0.9 * lead with lead the largest real
/// part; if another eigenvalue has real part in (lambda_cs, lead), lambda_u is
/// 0.9 times the smallest such real part. NumericalError if lead <= 0.
std::pair<double, double> default_thresholds(const Spectrum& spectrum);

/// Ordered complex Schur form, triangular Sylvester decoupling and spectral
/// projections. M is the maximum over t = 0, 0.5, ..., 10 of
/// |e^{t L_cs}| e^{-lambda_cs t} and |e^{-t L_u}| e^{lambda_u t}.
DichotomySplit dichotomy_split(const Eigen::MatrixXcd& matrix, double lambda_cs, double lambda_u);
/// Uses the realified operator.
DichotomySplit dichotomy_split(const ModalOperator& op, double lambda_cs, double lambda_u);

/// Eigenvalues of a complex Schur factor reordered so that the diagonal
/// entries selected by `first` come first; A = Q T Q^H is preserved.
void reorder_schur(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, const std::vector<bool>& first);

}  // namespace idyll
