// spectra.cpp
#include "idyll/spectra.hpp"

#include "idyll/error.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace idyll {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Normalized Fourier coefficient of a sampled periodic function at signed
// index d; modes the grid cannot represent (|d| >= n/2) are zero.
cplx coeff1(const Eigen::VectorXcd& hat, int d) {
    const int n = static_cast<int>(hat.size());
    if (2 * std::abs(d) >= n) return 0.0;
    return hat[(d % n + n) % n] / static_cast<double>(n);
}

cplx coeff2(const Eigen::MatrixXcd& hat, int dy, int dz) {
    const int ny = static_cast<int>(hat.rows());
    const int nz = static_cast<int>(hat.cols());
    if (2 * std::abs(dy) >= ny || 2 * std::abs(dz) >= nz) return 0.0;
    return hat((dy % ny + ny) % ny, (dz % nz + nz) % nz) / static_cast<double>(ny * nz);
}

bool eig_order(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

double op_norm(const Eigen::MatrixXcd& A) {
    if (A.size() == 0) return 0.0;
    // largest singular value via the Hermitian eigenproblem of A^H A
    const Eigen::MatrixXcd G = A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// LAPACK zlartg: c f + s g = r, -conj(s) f + c g = 0, c real.
void givens(cplx f, cplx g, double& c, cplx& s) {
    const double af = std::abs(f), ag = std::abs(g);
    if (ag == 0.0) {
        c = 1.0;
        s = 0.0;
    } else if (af == 0.0) {
        c = 0.0;
        s = std::conj(g) / ag;
    } else {
        const double r = std::hypot(af, ag);
        c = af / r;
        s = (f / af) * std::conj(g) / r;
    }
}

// x' = c x + s y, y' = c y - conj(s) x
template <class X, class Y>
void rot(X&& x, Y&& y, double c, cplx s) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const cplx xi = x(i), yi = y(i);
        x(i) = c * xi + s * yi;
        y(i) = c * yi - std::conj(s) * xi;
    }
}

// Swap diagonal entries k and k+1 of an upper triangular T (ztrexc step).
void swap_adjacent(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index k) {
    const Eigen::Index n = T.rows();
    const cplx t11 = T(k, k), t22 = T(k + 1, k + 1);
    double c;
    cplx s;
    givens(T(k, k + 1), t22 - t11, c, s);
    if (k + 2 < n) {
        rot(T.row(k).tail(n - k - 2).transpose(), T.row(k + 1).tail(n - k - 2).transpose(), c, s);
    }
    rot(T.col(k).head(k), T.col(k + 1).head(k), c, std::conj(s));
    T(k, k) = t22;
    T(k + 1, k + 1) = t11;
    rot(Q.col(k), Q.col(k + 1), c, std::conj(s));
}

}  // namespace

// ------------------------------------------------------------------ operators

Eigen::MatrixXcd ModalOperator::realified() const {
    const Eigen::Index n = matrix.rows();
    Eigen::MatrixXd R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = matrix.real();
    R.topRightCorner(n, n) = -matrix.imag();
    R.bottomLeftCorner(n, n) = matrix.imag();
    R.bottomRightCorner(n, n) = matrix.real();
    return R.cast<cplx>();
}

ModalOperator assemble_planar(const ShearProfile& profile, double alpha, int n_modes) {
    if (alpha == 0.0) {
        throw ConfigError(
            "assemble_planar: alpha = 0 is the sector carrying s; it is neutral and not assembled");
    }
    if (!(alpha > 0.0)) throw ConfigError("assemble_planar: alpha must be > 0");
    if (n_modes < 16) throw ConfigError("assemble_planar: n_modes must be >= 16");

    const double L = profile.grid().length();
    const Eigen::VectorXcd hat = fourier_coefficients(profile.u());
    const int dim = 2 * n_modes + 1;
    Eigen::MatrixXcd A(dim, dim);
    const cplx ia(0.0, alpha);
    for (int i = 0; i < dim; ++i) {
        const int m = i - n_modes;
        for (int j = 0; j < dim; ++j) {
            const int k = j - n_modes;
            const int d = m - k;
            const cplx u = coeff1(hat, d);
            const double kd = kTwoPi * d / L;
            const cplx upp = -kd * kd * u;
            const double kk = kTwoPi * k / L;
            A(i, j) = -ia * u - ia * upp / (kk * kk + alpha * alpha);
        }
    }
    ModalOperator op;
    op.alpha = alpha;
    op.matrix = std::move(A);
    op.n_modes = n_modes;
    op.kind = OperatorKind::planar_vorticity;
    return op;
}

ShearField2D::ShearField2D(const PeriodicGrid1D& gy, const PeriodicGrid1D& gz, Eigen::MatrixXd u)
    : grid_y(gy), grid_z(gz), U(std::move(u)) {
    if (U.rows() != gy.n() || U.cols() != gz.n()) {
        throw ConfigError("ShearField2D: sample array shape does not match the (y, z) grid");
    }
    if (!U.allFinite()) throw ConfigError("ShearField2D: non-finite samples");
}

ShearField2D ShearField2D::sine(int n_y, int n_z, double amp_y, double amp_z) {
    PeriodicGrid1D gy(n_y, kTwoPi), gz(n_z, kTwoPi);
    Eigen::MatrixXd u(n_y, n_z);
    for (int j = 0; j < n_y; ++j) {
        for (int k = 0; k < n_z; ++k) {
            u(j, k) = amp_y * std::sin(gy.node(j)) + amp_z * std::sin(gz.node(k));
        }
    }
    return ShearField2D(gy, gz, std::move(u));
}

ModalOperator assemble_shear3d(const ShearField2D& field, double alpha, int n_modes,
                               int n_modes_z) {
    if (!(alpha > 0.0)) {
        throw ConfigError("assemble_shear3d: alpha must be > 0 (the modal projector is singular)");
    }
    if (n_modes < 1 || n_modes_z < 0) throw ConfigError("assemble_shear3d: invalid truncation");

    const double Ly = field.grid_y.length(), Lz = field.grid_z.length();
    const Eigen::MatrixXcd hat = fft2::forward(field.U);
    const int ny = 2 * n_modes + 1, nz = 2 * n_modes_z + 1;
    const int n_wave = ny * nz;

    // orthonormal basis of k-perp for every retained wavevector
    std::vector<Eigen::Matrix<double, 3, 2>> E(n_wave);
    for (int a = 0; a < ny; ++a) {
        for (int b = 0; b < nz; ++b) {
            const double ky = kTwoPi * (a - n_modes) / Ly;
            const double kz = kTwoPi * (b - n_modes_z) / Lz;
            const Eigen::Vector3d k(alpha, ky, kz);
            Eigen::Vector3d e1(-ky, alpha, 0.0);
            e1.normalize();
            Eigen::Vector3d e2 = k.cross(e1);
            e2.normalize();
            E[a * nz + b].col(0) = e1;
            E[a * nz + b].col(1) = e2;
        }
    }

    const cplx ia(0.0, alpha);
    Eigen::MatrixXcd B(2 * n_wave, 2 * n_wave);
    for (int a = 0; a < ny; ++a) {
        for (int b = 0; b < nz; ++b) {
            const int row = a * nz + b;
            for (int a2 = 0; a2 < ny; ++a2) {
                for (int b2 = 0; b2 < nz; ++b2) {
                    const int col = a2 * nz + b2;
                    const int dy = a - a2, dz = b - b2;
                    const cplx u = coeff2(hat, dy, dz);
                    if (u == 0.0) {
                        B.block<2, 2>(2 * row, 2 * col).setZero();
                        continue;
                    }
                    const cplx uy = cplx(0.0, kTwoPi * dy / Ly) * u;
                    const cplx uz = cplx(0.0, kTwoPi * dz / Lz) * u;
                    // R = -i alpha U I - e_x (U_y, U_z) acting on (u, v, w)
                    Eigen::Matrix3cd R = Eigen::Matrix3cd::Identity() * (-ia * u);
                    R(0, 1) -= uy;
                    R(0, 2) -= uz;
                    B.block<2, 2>(2 * row, 2 * col) =
                        E[row].transpose().cast<cplx>() * R * E[col].cast<cplx>();
                }
            }
        }
    }
    ModalOperator op;
    op.alpha = alpha;
    op.matrix = std::move(B);
    op.n_modes = n_modes;
    op.n_modes_z = n_modes_z;
    op.kind = OperatorKind::shear3d_modal;
    return op;
}

// ------------------------------------------------------------------- spectra

Spectrum unstable_spectrum(const Eigen::MatrixXcd& matrix, double threshold) {
    if (matrix.rows() != matrix.cols()) throw ConfigError("unstable_spectrum: matrix not square");
    if (!matrix.allFinite()) throw ConfigError("unstable_spectrum: non-finite matrix");
    Spectrum s;
    if (matrix.size() == 0) return s;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(matrix, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("unstable_spectrum: eigensolver did not converge");
    }
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + matrix.rows());
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), eig_order);
    // Real parts within round-off of the threshold (continuous spectrum of
    // pure advection sits there) are not counted as unstable.
    double big = 1.0;
    for (const cplx& l : s.eigenvalues) big = std::max(big, std::abs(l));
    const double tol = 1e-9 * big;
    for (const cplx& l : s.eigenvalues) s.count_unstable += l.real() > threshold + tol ? 1 : 0;
    return s;
}

Spectrum unstable_spectrum(const ModalOperator& op, double threshold) {
    return unstable_spectrum(op.realified(), threshold);
}

std::vector<cplx> phase_speeds(const ModalOperator& op) {
    const Spectrum s = unstable_spectrum(op.matrix, 0.0);
    std::vector<cplx> c;
    c.reserve(s.eigenvalues.size());
    for (const cplx& l : s.eigenvalues) c.push_back(cplx(0.0, 1.0) * l / op.alpha);
    return c;
}

std::pair<double, double> default_thresholds(const Spectrum& spectrum) {
    if (spectrum.eigenvalues.empty() || !(spectrum.eigenvalues.front().real() > 0.0)) {
        throw NumericalError("default_thresholds: no eigenvalue with positive real part");
    }
    const double lead = spectrum.eigenvalues.front().real();
    const double lcs = 0.01 * lead;
    // With several unstable eigenvalues 0.9 lead may fall inside the spectrum;
    // then lambda_u drops below the weakest eigenvalue above lambda_cs.
    double weakest = lead;
    for (const cplx& z : spectrum.eigenvalues) {
        if (z.real() > lcs) weakest = std::min(weakest, z.real());
    }
    return {lcs, 0.9 * weakest};
}

void reorder_schur(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, const std::vector<bool>& first) {
    const Eigen::Index n = T.rows();
    std::vector<bool> flag(first);
    // stable bubble: selected entries keep their relative order
    Eigen::Index target = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!flag[i]) continue;
        for (Eigen::Index k = i; k > target; --k) {
            swap_adjacent(T, Q, k - 1);
            std::swap(flag[k], flag[k - 1]);
        }
        ++target;
    }
    // clean the strictly lower part (round-off from rotations)
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) T(i, j) = 0.0;
    }
}

DichotomySplit dichotomy_split(const Eigen::MatrixXcd& A, double lambda_cs, double lambda_u) {
    if (A.rows() != A.cols() || A.rows() == 0) throw ConfigError("dichotomy_split: bad matrix");
    if (!(lambda_u > lambda_cs)) throw ConfigError("dichotomy_split: need lambda_u > lambda_cs");
    const Eigen::Index n = A.rows();

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("dichotomy_split: Schur decomposition did not converge");
    }
    Eigen::MatrixXcd T = schur.matrixT();
    Eigen::MatrixXcd Q = schur.matrixU();

    std::vector<bool> unstable(n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = T(i, i).real();
        if (re >= lambda_cs && re <= lambda_u) {
            std::ostringstream os;
            os << "dichotomy_split: gap violated, eigenvalue " << T(i, i) << " has real part in ["
               << lambda_cs << ", " << lambda_u << "]";
            throw NumericalError(os.str());
        }
        unstable[i] = re > lambda_u;
        k += unstable[i] ? 1 : 0;
    }
    reorder_schur(T, Q, unstable);

    // T11 Y - Y T22 = -T12, column by column (T22 upper triangular)
    const Eigen::Index m = n - k;
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(k, m);
    if (k > 0 && m > 0) {
        const Eigen::MatrixXcd T11 = T.topLeftCorner(k, k);
        const Eigen::MatrixXcd T12 = T.topRightCorner(k, m);
        const Eigen::MatrixXcd T22 = T.bottomRightCorner(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            Eigen::VectorXcd rhs = -T12.col(j);
            for (Eigen::Index i = 0; i < j; ++i) rhs += Y.col(i) * T22(i, j);
            Eigen::MatrixXcd S = T11;
            S.diagonal().array() -= T22(j, j);
            Y.col(j) = S.triangularView<Eigen::Upper>().solve(rhs);
        }
        const double ny = Y.cwiseAbs().maxCoeff();
        if (!std::isfinite(ny) || ny > 1e10) {
            throw NumericalError(
                "dichotomy_split: defective cluster straddling the gap (ill-conditioned "
                "separation)");
        }
    }

    DichotomySplit d;
    d.lambda_u = lambda_u;
    d.lambda_cs = lambda_cs;
    d.generator = A;

    Eigen::MatrixXcd Pu = Eigen::MatrixXcd::Zero(n, n);
    Pu.topLeftCorner(k, k).setIdentity();
    Pu.topRightCorner(k, m) = -Y;
    d.proj_u = Q * Pu * Q.adjoint();
    d.proj_cs = Eigen::MatrixXcd::Identity(n, n) - d.proj_u;

    d.basis_u = Q.leftCols(k);
    Eigen::MatrixXcd W(n, m);
    if (m > 0) {
        Eigen::MatrixXcd V(n, m);
        V.topRows(k) = Y;
        V.bottomRows(m).setIdentity();
        W = Q * V;
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
        W = qr.householderQ() * Eigen::MatrixXcd::Identity(n, m);
    }
    d.basis_cs = W;

    // restricted generators and dichotomy constant on t = 0, 0.5, ..., 10
    const Eigen::MatrixXcd Lu = T.topLeftCorner(k, k);
    const Eigen::MatrixXcd Lcs = W.adjoint() * A * W;
    const double dt = 0.5;
    const Eigen::MatrixXcd Eu = k > 0 ? Eigen::MatrixXcd((-dt * Lu).exp()) : Lu;
    const Eigen::MatrixXcd Ecs = m > 0 ? Eigen::MatrixXcd((dt * Lcs).exp()) : Lcs;
    Eigen::MatrixXcd Pu_t = Eigen::MatrixXcd::Identity(k, k);
    Eigen::MatrixXcd Pcs_t = Eigen::MatrixXcd::Identity(m, m);
    d.M = 1.0;
    for (int j = 0; j <= 20; ++j) {
        const double t = dt * j;
        d.M_grid.push_back(t);
        if (j > 0) {
            Pu_t = Pu_t * Eu;
            Pcs_t = Pcs_t * Ecs;
        }
        if (k > 0) d.M = std::max(d.M, op_norm(Pu_t) * std::exp(lambda_u * t));
        if (m > 0) d.M = std::max(d.M, op_norm(Pcs_t) * std::exp(-lambda_cs * t));
    }
    if (!std::isfinite(d.M)) throw NumericalError("dichotomy_split: non-finite dichotomy constant");
    return d;
}

DichotomySplit dichotomy_split(const ModalOperator& op, double lambda_cs, double lambda_u) {
    return dichotomy_split(op.realified(), lambda_cs, lambda_u);
}

}  // namespace idyll
