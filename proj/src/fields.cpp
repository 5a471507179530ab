// fields.cpp
#include "idyll/fields.hpp"

#include "idyll/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace idyll {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& x) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out;
    fft.fwd(out, x);
    return out;
}

Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& x) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out;
    fft.inv(out, x);
    return out;
}

// (i kappa)^order with the Nyquist bin zeroed for odd orders.
cplx derivative_symbol(const PeriodicGrid1D& grid, int k, int order) {
    const int n = grid.n();
    if (order % 2 == 1 && 2 * k == n) return 0.0;
    const cplx ik(0.0, grid.wavenumber(k));
    cplx s = 1.0;
    for (int p = 0; p < order; ++p) s *= ik;
    return s;
}

void check_order(int order) {
    if (order < 1 || order > 4) {
        throw ConfigError("spectral_derivative: order must be in [1, 4]");
    }
}

template <class Vec>
void check_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw ConfigError(std::string(what) + ": non-finite samples");
}

void check_shape(const PeriodicGrid1D& grid, Eigen::Index size, const char* what) {
    if (size != grid.n()) {
        std::ostringstream os;
        os << what << ": expected " << grid.n() << " samples, got " << size;
        throw ConfigError(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------- grid

PeriodicGrid1D::PeriodicGrid1D(int n, double length) : n_(n), length_(length) {
    if (n < 8 || n % 2 != 0) throw ConfigError("PeriodicGrid1D: n must be even and >= 8");
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("PeriodicGrid1D: length must be positive");
    }
}

Eigen::VectorXd PeriodicGrid1D::nodes() const {
    Eigen::VectorXd y(n_);
    for (int j = 0; j < n_; ++j) y[j] = node(j);
    return y;
}

double PeriodicGrid1D::wavenumber(int k) const {
    const int ks = (k <= n_ / 2) ? k : k - n_;
    return kTwoPi * ks / length_;
}

// ------------------------------------------------- spectral derivatives

Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& samples, const PeriodicGrid1D& grid,
                                     int order) {
    check_order(order);
    check_shape(grid, samples.size(), "spectral_derivative");
    check_finite(samples, "spectral_derivative");
    Eigen::VectorXcd hat = fft_forward(samples);
    for (int k = 0; k < grid.n(); ++k) hat[k] *= derivative_symbol(grid, k, order);
    return fft_inverse(hat);
}

Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& samples, const PeriodicGrid1D& grid,
                                    int order) {
    const Eigen::VectorXcd c = samples.cast<cplx>();
    return spectral_derivative(c, grid, order).real();
}

Eigen::VectorXcd fourier_coefficients(const Eigen::VectorXd& samples) {
    return fft_forward(samples.cast<cplx>());
}

// ------------------------------------------------------- shear profile

ShearProfile::ShearProfile(const PeriodicGrid1D& grid, Eigen::VectorXd u)
    : grid_(grid), u_(std::move(u)) {
    check_shape(grid_, u_.size(), "ShearProfile");
    check_finite(u_, "ShearProfile");
    du_ = spectral_derivative(u_, grid_, 1);
    ddu_ = spectral_derivative(u_, grid_, 2);
    coeffs_ = fourier_coefficients(u_) / static_cast<double>(grid_.n());
}

ShearProfile ShearProfile::from_samples(const PeriodicGrid1D& grid, Eigen::VectorXd u,
                                        std::optional<double> inflection_value) {
    ShearProfile p(grid, std::move(u));
    p.inflection_value_ = inflection_value;
    return p;
}

ShearProfile ShearProfile::from_functions(const PeriodicGrid1D& grid, Fn u, Fn du, Fn ddu,
                                          std::optional<double> inflection_value) {
    Eigen::VectorXd s(grid.n());
    for (int j = 0; j < grid.n(); ++j) s[j] = u(grid.node(j));
    ShearProfile p(grid, std::move(s));
    Eigen::VectorXd a1(grid.n()), a2(grid.n());
    for (int j = 0; j < grid.n(); ++j) {
        a1[j] = du(grid.node(j));
        a2[j] = ddu(grid.node(j));
    }
    auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        return (a - b).cwiseAbs().maxCoeff() / scale;
    };
    if (rel(a1, p.du_) > 1e-8 || rel(a2, p.ddu_) > 1e-8) {
        throw ConfigError(
            "ShearProfile: analytic derivatives disagree with spectral derivatives "
            "(profile under-resolved or derivatives wrong)");
    }
    p.du_ = a1;
    p.ddu_ = a2;
    p.fn_u_ = std::move(u);
    p.fn_du_ = std::move(du);
    p.fn_ddu_ = std::move(ddu);
    p.inflection_value_ = inflection_value;
    return p;
}

ShearProfile ShearProfile::sine(const PeriodicGrid1D& grid, int k, double amplitude,
                                double offset) {
    const double w = kTwoPi * k / grid.length();
    return from_functions(
        grid, [=](double y) { return offset + amplitude * std::sin(w * y); },
        [=](double y) { return amplitude * w * std::cos(w * y); },
        [=](double y) { return -amplitude * w * w * std::sin(w * y); }, offset);
}

double ShearProfile::eval(double y, int order) const {
    if (order < 0 || order > 3) throw ConfigError("ShearProfile::eval: order must be 0..3");
    if (fn_u_ && order <= 2) {
        return order == 0 ? fn_u_(y) : order == 1 ? fn_du_(y) : fn_ddu_(y);
    }
    // Trigonometric interpolant; the Nyquist mode is split symmetrically so
    // that the interpolant is real and matches the node derivatives.
    const int n = grid_.n();
    const double w = kTwoPi / grid_.length();
    const cplx step = std::polar(1.0, w * y);
    cplx ph = 1.0;
    double acc = coeffs_[0].real() * (order == 0 ? 1.0 : 0.0);
    for (int k = 1; k < n / 2; ++k) {
        ph *= step;
        const cplx ik(0.0, w * k);
        cplx sym = 1.0;
        for (int p = 0; p < order; ++p) sym *= ik;
        // bins k and n-k are conjugate for real data
        acc += 2.0 * (coeffs_[k] * sym * ph).real();
    }
    const double kn = w * (n / 2);
    const double a = coeffs_[n / 2].real();
    switch (order) {
        case 0: acc += a * std::cos(kn * y); break;
        case 1: acc += -a * kn * std::sin(kn * y); break;
        case 2: acc += -a * kn * kn * std::cos(kn * y); break;
        default: acc += a * kn * kn * kn * std::sin(kn * y); break;
    }
    return acc;
}

// ------------------------------------------------------- 3D vector field

VectorField3D::VectorField3D(std::array<double, 3> periods, VelocityFn velocity,
                             JacobianFn jacobian, std::string descriptor,
                             std::optional<Shear> shear)
    : periods_(periods),
      velocity_(std::move(velocity)),
      jacobian_(std::move(jacobian)),
      descriptor_(std::move(descriptor)),
      shear_(std::move(shear)) {
    for (double p : periods_) {
        if (!(p > 0.0)) throw ConfigError("VectorField3D: periods must be positive");
    }
}

VectorField3D VectorField3D::constant(const Vec3& u) {
    std::ostringstream os;
    os << "constant(" << u[0] << "," << u[1] << "," << u[2] << ")";
    return VectorField3D({kTwoPi, kTwoPi, kTwoPi}, [u](const Vec3&) { return u; },
                         [](const Vec3&) { return Mat3::Zero().eval(); }, os.str());
}

VectorField3D VectorField3D::sine_shear(double amp_y, double amp_z) {
    Shear sh{[=](double y, double z) { return amp_y * std::sin(y) + amp_z * std::sin(z); },
             [=](double y, double) { return amp_y * std::cos(y); },
             [=](double, double z) { return amp_z * std::cos(z); }};
    auto vel = [sh](const Vec3& x) { return Vec3(sh.U(x[1], x[2]), 0.0, 0.0); };
    auto jac = [sh](const Vec3& x) {
        Mat3 J = Mat3::Zero();
        J(0, 1) = sh.U_y(x[1], x[2]);
        J(0, 2) = sh.U_z(x[1], x[2]);
        return J;
    };
    std::ostringstream os;
    os << "shear(" << amp_y << " sin y + " << amp_z << " sin z)";
    return VectorField3D({kTwoPi, kTwoPi, kTwoPi}, vel, jac, os.str(), sh);
}

VectorField3D VectorField3D::abc(double A, double B, double C) {
    auto vel = [=](const Vec3& x) {
        return Vec3(A * std::sin(x[2]) + C * std::cos(x[1]),
                    B * std::sin(x[0]) + A * std::cos(x[2]),
                    C * std::sin(x[1]) + B * std::cos(x[0]));
    };
    auto jac = [=](const Vec3& x) {
        Mat3 J;
        J << 0.0, -C * std::sin(x[1]), A * std::cos(x[2]),
             B * std::cos(x[0]), 0.0, -A * std::sin(x[2]),
             -B * std::sin(x[0]), C * std::cos(x[1]), 0.0;
        return J;
    };
    std::ostringstream os;
    os << "abc(" << A << "," << B << "," << C << ")";
    return VectorField3D({kTwoPi, kTwoPi, kTwoPi}, vel, jac, os.str());
}

VectorField3D::Vec3 VectorField3D::reduce(const Vec3& x) const {
    Vec3 r;
    for (int i = 0; i < 3; ++i) {
        r[i] = std::fmod(x[i], periods_[i]);
        if (r[i] < 0.0) r[i] += periods_[i];
    }
    return r;
}

VectorFieldCheck check_vector_field(const VectorField3D& field, int n_points,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    VectorFieldCheck out;
    const double h = 1e-5;
    for (int i = 0; i < n_points; ++i) {
        VectorField3D::Vec3 x;
        for (int d = 0; d < 3; ++d) x[d] = uni(rng) * field.periods()[d];
        const auto J = field.jacobian(x);
        out.max_divergence = std::max(out.max_divergence, std::abs(J.trace()));
        VectorField3D::Mat3 Jfd;
        for (int d = 0; d < 3; ++d) {
            VectorField3D::Vec3 e = VectorField3D::Vec3::Zero();
            e[d] = h;
            Jfd.col(d) = (field.velocity(x + e) - field.velocity(x - e)) / (2.0 * h);
        }
        const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
        out.max_jacobian_error =
            std::max(out.max_jacobian_error, (J - Jfd).cwiseAbs().maxCoeff() / scale);
    }
    return out;
}

// --------------------------------------------------------- planar fields

namespace fft2 {

Eigen::MatrixXcd forward(const Eigen::MatrixXd& a) {
    Eigen::MatrixXcd out = a.cast<cplx>();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        Eigen::VectorXcd col = out.col(j);
        out.col(j) = fft_forward(col);
    }
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        Eigen::VectorXcd row = out.row(i).transpose();
        out.row(i) = fft_forward(row).transpose();
    }
    return out;
}

Eigen::MatrixXd inverse_real(const Eigen::MatrixXcd& a) {
    Eigen::MatrixXcd out = a;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        Eigen::VectorXcd row = out.row(i).transpose();
        out.row(i) = fft_inverse(row).transpose();
    }
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        Eigen::VectorXcd col = out.col(j);
        out.col(j) = fft_inverse(col);
    }
    return out.real();
}

}  // namespace fft2

PlanarField::PlanarField(const PeriodicGrid1D& gx, const PeriodicGrid1D& gy, Eigen::MatrixXd vx_,
                         Eigen::MatrixXd vy_)
    : grid_x(gx), grid_y(gy), vx(std::move(vx_)), vy(std::move(vy_)) {
    if (vx.rows() != gx.n() || vx.cols() != gy.n() || vy.rows() != gx.n() ||
        vy.cols() != gy.n()) {
        throw ConfigError("PlanarField: array shapes do not match the grids");
    }
}

PlanarField PlanarField::zeros(const PeriodicGrid1D& gx, const PeriodicGrid1D& gy) {
    return PlanarField(gx, gy, Eigen::MatrixXd::Zero(gx.n(), gy.n()),
                       Eigen::MatrixXd::Zero(gx.n(), gy.n()));
}

namespace {

struct Symbols {
    Eigen::MatrixXcd dx, dy;  // first-derivative symbols, Nyquist zeroed
    Eigen::MatrixXd k2;       // |k|^2 (full, Nyquist included)
};

Symbols symbols(const PeriodicGrid1D& gx, const PeriodicGrid1D& gy) {
    Symbols s;
    s.dx.resize(gx.n(), gy.n());
    s.dy.resize(gx.n(), gy.n());
    s.k2.resize(gx.n(), gy.n());
    for (int i = 0; i < gx.n(); ++i) {
        for (int j = 0; j < gy.n(); ++j) {
            s.dx(i, j) = derivative_symbol(gx, i, 1);
            s.dy(i, j) = derivative_symbol(gy, j, 1);
            const double kx = gx.wavenumber(i), ky = gy.wavenumber(j);
            s.k2(i, j) = kx * kx + ky * ky;
        }
    }
    return s;
}

}  // namespace

Eigen::MatrixXd divergence(const PlanarField& f) {
    const Symbols s = symbols(f.grid_x, f.grid_y);
    const Eigen::MatrixXcd d =
        s.dx.cwiseProduct(fft2::forward(f.vx)) + s.dy.cwiseProduct(fft2::forward(f.vy));
    return fft2::inverse_real(d);
}

LerayDecomposition leray_project(const PlanarField& f) {
    if (!f.vx.allFinite() || !f.vy.allFinite()) {
        throw ConfigError("leray_project: non-finite samples");
    }
    const Symbols s = symbols(f.grid_x, f.grid_y);
    const Eigen::MatrixXcd X = fft2::forward(f.vx);
    const Eigen::MatrixXcd Y = fft2::forward(f.vy);
    Eigen::MatrixXcd gx = Eigen::MatrixXcd::Zero(X.rows(), X.cols());
    Eigen::MatrixXcd gy = gx;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            // Poisson solve Delta h = div X in the first-derivative symbols,
            // so that the projected field is exactly spectrally solenoidal.
            const double q = std::norm(s.dx(i, j)) + std::norm(s.dy(i, j));
            if (q == 0.0) continue;  // mean mode (and pure Nyquist) stays in w
            const cplx div = s.dx(i, j) * X(i, j) + s.dy(i, j) * Y(i, j);
            const cplx h = -div / q;
            gx(i, j) = s.dx(i, j) * h;
            gy(i, j) = s.dy(i, j) * h;
        }
    }
    PlanarField grad(f.grid_x, f.grid_y, fft2::inverse_real(gx), fft2::inverse_real(gy));
    PlanarField w(f.grid_x, f.grid_y, f.vx - grad.vx, f.vy - grad.vy);
    return {std::move(w), std::move(grad)};
}

VorticityMomentum vorticity_and_momentum(const PlanarField& f, double div_tol) {
    const double div = divergence(f).cwiseAbs().maxCoeff();
    if (div > div_tol) {
        std::ostringstream os;
        os << "vorticity_and_momentum: field is not divergence-free (max |div| = " << div << ")";
        throw ConfigError(os.str());
    }
    const Symbols s = symbols(f.grid_x, f.grid_y);
    const Eigen::MatrixXcd w =
        s.dx.cwiseProduct(fft2::forward(f.vy)) - s.dy.cwiseProduct(fft2::forward(f.vx));
    return {fft2::inverse_real(w), f.vx.mean()};
}

PlanarField velocity_from_vorticity(const Eigen::MatrixXd& omega, double s,
                                    const PeriodicGrid1D& gx, const PeriodicGrid1D& gy) {
    if (omega.rows() != gx.n() || omega.cols() != gy.n()) {
        throw ConfigError("velocity_from_vorticity: omega shape does not match the grids");
    }
    const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
    if (std::abs(omega.mean()) > 1e-12 * scale) {
        throw ConfigError("velocity_from_vorticity: omega must have zero mean");
    }
    const Symbols sym = symbols(gx, gy);
    const Eigen::MatrixXcd W = fft2::forward(omega);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(W.rows(), W.cols());
    Eigen::MatrixXcd V = U;
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
        for (Eigen::Index j = 0; j < W.cols(); ++j) {
            if (sym.k2(i, j) == 0.0) continue;
            const cplx psi = -W(i, j) / sym.k2(i, j);
            U(i, j) = -sym.dy(i, j) * psi;
            V(i, j) = sym.dx(i, j) * psi;
        }
    }
    Eigen::MatrixXd vx = fft2::inverse_real(U);
    vx.array() += s;
    return PlanarField(gx, gy, std::move(vx), fft2::inverse_real(V));
}

}  // namespace idyll
