// lyapunov_perron.cpp
#include "idyll/lyapunov_perron.hpp"

#include "idyll/error.hpp"
#include "idyll/ode.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace idyll {

namespace {

double op_norm(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0.0;
    const Eigen::MatrixXd G = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// Orthonormal basis of the range of a rank-r projection, columns sign-fixed
// so that their largest entry is positive.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& P, int r) {
    const Eigen::Index n = P.rows();
    if (r == 0) return Eigen::MatrixXd(n, 0);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
    for (int j = 0; j < r; ++j) {
        Eigen::Index i = 0;
        Q.col(j).cwiseAbs().maxCoeff(&i);
        if (Q(i, j) < 0.0) Q.col(j) = -Q.col(j);
    }
    return Q;
}

Eigen::MatrixXd real_part_checked(const Eigen::MatrixXcd& P, const char* what) {
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if (P.imag().cwiseAbs().maxCoeff() > 1e-8 * scale) {
        std::ostringstream os;
        os << "spectral projection " << what << " of a real system is not real";
        throw NumericalError(os.str());
    }
    return P.real();
}

double unit_from_bits(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

// Box-Muller on a portable uniform stream.
Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; i += 2) {
        const double u1 = 1.0 - unit_from_bits(rng());
        const double u2 = unit_from_bits(rng());
        const double r = std::sqrt(-2.0 * std::log(u1));
        v[i] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < n) v[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    return v;
}

int grid_size(const LPOptions& opt) {
    if (!(opt.dt > 0.0) || !(opt.T_max > opt.dt)) throw ConfigError("LP grid: need 0 < dt < T_max");
    const double n = opt.T_max / opt.dt;
    const long N = std::lround(n);
    if (std::abs(n - N) > 1e-9 * n) throw ConfigError("LP grid: T_max must be a multiple of dt");
    return static_cast<int>(N);
}

// Interval propagators: T(t_{k+1}, t_k) P and T(t_mid, .) P pieces used by
// the exponential Simpson recursions. Constant for autonomous systems.
struct IntervalOps {
    Eigen::MatrixXd u_full, u_half;    // e^{-A dt} P_u, e^{-A dt/2} P_u
    Eigen::MatrixXd cs_full, cs_half;  // e^{A dt} P_cs, e^{A dt/2} P_cs
};

IntervalOps interval_ops(const LPSystem& sys, double t_hi, double dt) {
    // t_hi is the right end of [t_hi - dt, t_hi]
    const double t_lo = t_hi - dt, t_mid = t_hi - 0.5 * dt;
    IntervalOps ops;
    ops.u_full = sys.propagator(t_lo, t_hi) * sys.proj_u;
    ops.u_half = sys.propagator(t_lo, t_mid) * sys.proj_u;
    ops.cs_full = sys.propagator(t_hi, t_lo) * sys.proj_cs;
    ops.cs_half = sys.propagator(t_hi, t_mid) * sys.proj_cs;
    return ops;
}

}  // namespace

Eigen::VectorXd LPSystem::z_dot(double t, const Eigen::VectorXd& z) const {
    if (!generator) throw ConfigError("LPSystem::z_dot requires an autonomous system");
    return *generator * z + nonlinearity(t, z);
}

LPSystem make_autonomous_system(const Eigen::MatrixXd& A, LPSystem::Nonlinearity F,
                                double lambda_cs, double lambda_u, std::string descriptor,
                                const LPOptions& opt) {
    if (A.rows() != A.cols() || A.rows() == 0) throw ConfigError("LP system: A must be square");
    const int n = static_cast<int>(A.rows());
    const DichotomySplit split = dichotomy_split(A.cast<cplx>(), lambda_cs, lambda_u);

    LPSystem sys;
    sys.dim = n;
    sys.descriptor = std::move(descriptor);
    sys.lambda_u = lambda_u;
    sys.lambda_cs = lambda_cs;
    sys.M = split.M;
    sys.proj_u = real_part_checked(split.proj_u, "P_u");
    sys.proj_cs = Eigen::MatrixXd::Identity(n, n) - sys.proj_u;
    sys.basis_u = range_basis(sys.proj_u, split.rank_u());
    sys.basis_cs = range_basis(sys.proj_cs, n - split.rank_u());
    sys.generator = A;
    sys.propagator = [A](double t, double t0) {
        return Eigen::MatrixXd((A * (t - t0)).exp());
    };
    sys.nonlinearity = std::move(F);

    // C0 on t = 0, 0.5, ..., T_max
    const double h = 0.5;
    const Eigen::MatrixXd Eu = Eigen::MatrixXd((-h * A).exp()) * sys.proj_u;
    const Eigen::MatrixXd Ecs = Eigen::MatrixXd((h * A).exp()) * sys.proj_cs;
    Eigen::MatrixXd Pu = sys.proj_u, Pcs = sys.proj_cs;
    sys.C0 = 1.0;
    const int steps = static_cast<int>(std::floor(opt.T_max / h + 1e-9));
    for (int j = 0; j <= steps; ++j) {
        const double t = h * j;
        if (j > 0) {
            Pu = Eu * Pu;
            Pcs = Ecs * Pcs;
        }
        if (split.rank_u() > 0) sys.C0 = std::max(sys.C0, op_norm(Pu) * std::exp(lambda_u * t));
        if (split.rank_u() < n) sys.C0 = std::max(sys.C0, op_norm(Pcs) * std::exp(-lambda_cs * t));
    }

    // C1: split-basis axes plus pseudo-random directions on the sampling sphere
    std::vector<Eigen::VectorXd> dirs;
    for (Eigen::Index j = 0; j < sys.basis_u.cols(); ++j) dirs.push_back(sys.basis_u.col(j));
    for (Eigen::Index j = 0; j < sys.basis_cs.cols(); ++j) dirs.push_back(sys.basis_cs.col(j));
    std::mt19937_64 rng(opt.seed);
    for (int i = 0; i < opt.c1_samples; ++i) dirs.push_back(gaussian_vector(rng, n).normalized());
    sys.C1 = 0.0;
    for (const auto& d : dirs) {
        const Eigen::VectorXd z = opt.c1_radius * d;
        const Eigen::VectorXd f = sys.nonlinearity(0.0, z);
        if (!f.allFinite()) throw NumericalError("LP system: non-finite nonlinearity sample");
        sys.C1 = std::max(sys.C1, f.norm() / z.squaredNorm());
    }
    const Eigen::VectorXd f0 = sys.nonlinearity(0.0, Eigen::VectorXd::Zero(n));
    if (f0.norm() > 1e-14) throw ConfigError("LP system: nonlinearity must vanish at z = 0");
    return sys;
}

LPSystem toy_system(double lambda_cs, double lambda_u, const LPOptions& opt) {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, 0.0, -1.0;
    auto F = [](double, const Eigen::VectorXd& z) {
        Eigen::VectorXd f(2);
        f << 0.0, z[0] * z[0];
        return f;
    };
    return make_autonomous_system(A, F, lambda_cs, lambda_u, "toy(z_u' = z_u, z_cs' = -z_cs + z_u^2)",
                                  opt);
}

LPSystem linear_toy_system(const LPOptions& opt) {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, 0.0, -1.0;
    auto F = [](double, const Eigen::VectorXd& z) { return Eigen::VectorXd::Zero(z.size()).eval(); };
    return make_autonomous_system(A, F, -0.9, 0.9, "linear(diag(1, -1))", opt);
}

LPConstants lp_constants(const LPSystem& sys, const LPOptions& opt) {
    LPConstants c;
    c.lambda = 0.5 * (sys.lambda_cs + sys.lambda_u);
    const double margin = sys.K * sys.mu;
    const double gap_cs = c.lambda - sys.lambda_cs - margin;
    const double gap_u = sys.lambda_u - margin - c.lambda;
    if (!(gap_cs > 0.0 && gap_u > 0.0)) {
        std::ostringstream os;
        os << "LP gap condition fails: lambda = " << c.lambda << " not in (" << sys.lambda_cs + margin
           << ", " << sys.lambda_u - margin << ")";
        throw NumericalError(os.str());
    }
    const double S = 1.0 / (c.lambda - sys.lambda_cs) + 1.0 / gap_u;
    if (sys.C1 <= 0.0) {
        c.delta1 = std::numeric_limits<double>::infinity();
    } else {
        c.delta1 = opt.delta1_safety * 0.5 / (sys.C0 * sys.C1 * S);
    }
    c.radius = c.delta1 / (2.0 * sys.C0);
    return c;
}

WeightedPath WeightedPath::zeros(int dim, double lambda, const LPOptions& opt) {
    const int N = grid_size(opt);
    WeightedPath p;
    p.t.resize(N + 1);
    for (int k = 0; k <= N; ++k) p.t[k] = -opt.dt * k;
    p.z = Eigen::MatrixXd::Zero(dim, N + 1);
    p.lambda = lambda;
    return p;
}

void WeightedPath::update_norm() {
    norm_lambda = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        norm_lambda = std::max(norm_lambda, std::exp(-lambda * t[k]) * z.col(k).norm());
    }
}

WeightedPath apply_lp_map(const WeightedPath& path, const Eigen::VectorXd& z_u0, const LPSystem& sys,
                          const LPOptions& opt) {
    const LPConstants lc = lp_constants(sys, opt);
    const int N = grid_size(opt);
    const int n = sys.dim;
    if (path.z.rows() != n || path.z.cols() != N + 1) {
        throw ConfigError("apply_lp_map: path does not match the system dimension / time grid");
    }
    if (z_u0.size() != n) throw ConfigError("apply_lp_map: z_u0 has the wrong dimension");
    if ((sys.proj_u * z_u0 - z_u0).norm() > 1e-10 * std::max(1.0, z_u0.norm())) {
        throw ConfigError("apply_lp_map: z_u0 is not in X_u");
    }
    if (opt.enforce_radius) {
        const double slack = 1.0 + 1e-12;
        if (z_u0.norm() > lc.radius * slack) {
            std::ostringstream os;
            os << "apply_lp_map: |z_u0| = " << z_u0.norm() << " exceeds delta_1/(2 C_0) = " << lc.radius;
            throw ConfigError(os.str());
        }
        for (int k = 0; k <= N; ++k) {
            if (path.z.col(k).norm() > lc.delta1 * slack) {
                throw NumericalError("apply_lp_map: path leaves the delta_1 ball");
            }
        }
    }

    const double dt = opt.dt;
    // F on the grid and at half steps (4-point cubic interpolation)
    Eigen::MatrixXd F(n, N + 1), Fm(n, N);
    for (int k = 0; k <= N; ++k) F.col(k) = sys.nonlinearity(path.t[k], path.z.col(k));
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd zm;
        if (N < 3) {
            zm = 0.5 * (path.z.col(k) + path.z.col(k + 1));
        } else if (k == 0) {
            zm = (5.0 * path.z.col(0) + 15.0 * path.z.col(1) - 5.0 * path.z.col(2) + path.z.col(3)) / 16.0;
        } else if (k == N - 1) {
            zm = (5.0 * path.z.col(N) + 15.0 * path.z.col(N - 1) - 5.0 * path.z.col(N - 2) +
                  path.z.col(N - 3)) / 16.0;
        } else {
            zm = (-path.z.col(k - 1) + 9.0 * path.z.col(k) + 9.0 * path.z.col(k + 1) -
                  path.z.col(k + 2)) / 16.0;
        }
        Fm.col(k) = sys.nonlinearity(path.t[k] - 0.5 * dt, zm);
    }

    std::optional<IntervalOps> fixed;
    if (sys.generator) fixed = interval_ops(sys, 0.0, dt);
    auto ops_at = [&](int k) {  // interval [t_{k+1}, t_k]
        return fixed ? *fixed : interval_ops(sys, path.t[k], dt);
    };

    WeightedPath out = path;
    // unstable part: backward from t = 0
    Eigen::VectorXd zu = z_u0;
    out.z.col(0) = zu;
    Eigen::MatrixXd ZU(n, N + 1);
    ZU.col(0) = zu;
    for (int k = 0; k < N; ++k) {
        const IntervalOps op = ops_at(k);
        zu = op.u_full * zu - (dt / 6.0) * (sys.proj_u * F.col(k + 1) + 4.0 * op.u_half * Fm.col(k) +
                                            op.u_full * F.col(k));
        ZU.col(k + 1) = zu;
    }
    // center-stable part: forward from -T_max (tail handled as an error budget)
    Eigen::MatrixXd ZCS(n, N + 1);
    Eigen::VectorXd zc = Eigen::VectorXd::Zero(n);
    ZCS.col(N) = zc;
    for (int k = N - 1; k >= 0; --k) {
        const IntervalOps op = ops_at(k);
        zc = op.cs_full * zc + (dt / 6.0) * (op.cs_full * F.col(k + 1) + 4.0 * op.cs_half * Fm.col(k) +
                                             sys.proj_cs * F.col(k));
        ZCS.col(k) = zc;
    }
    out.z = ZU + ZCS;
    out.lambda = lc.lambda;
    out.update_norm();

    // neglected int_{-inf}^{-T_max}: |F| <= C1 |z|^2 <= C1 |z|_lambda^2 e^{2 lambda s}
    WeightedPath in = path;
    in.lambda = lc.lambda;
    in.update_norm();
    const double rate = 2.0 * lc.lambda - sys.lambda_cs;
    if (sys.C1 > 0.0 && in.norm_lambda > 0.0) {
        if (!(rate > 0.0)) {
            throw NumericalError("apply_lp_map: 2 lambda <= lambda_cs, the tail integral is not bounded");
        }
        const double base = sys.C0 * sys.C1 * in.norm_lambda * in.norm_lambda / rate;
        out.tail_bound = base * std::exp(-rate * opt.T_max);
        out.tail_bound_weighted = base * std::exp(-lc.lambda * opt.T_max);
        if (out.tail_bound > opt.tail_tol) {
            std::ostringstream os;
            os << "apply_lp_map: tail bound " << out.tail_bound << " exceeds " << opt.tail_tol
               << "; increase T_max";
            throw NumericalError(os.str());
        }
    } else {
        out.tail_bound = 0.0;
        out.tail_bound_weighted = 0.0;
    }
    return out;
}

FixedPoint solve_fixed_point(const Eigen::VectorXd& z_u0, const LPSystem& sys, double tol, int max_iter,
                             const LPOptions& opt) {
    const LPConstants lc = lp_constants(sys, opt);
    FixedPoint fp;
    fp.within_radius = z_u0.norm() <= lc.radius * (1.0 + 1e-12);
    fp.bound = 2.0 * sys.C0 * z_u0.norm();

    WeightedPath cur = WeightedPath::zeros(sys.dim, lc.lambda, opt);
    double prev_inc = -1.0;
    int strikes = 0;
    bool converged = false;
    int applications = 0;
    for (int it = 0; it < max_iter; ++it) {
        WeightedPath next = apply_lp_map(cur, z_u0, sys, opt);
        ++applications;
        WeightedPath diff = next;
        diff.z = next.z - cur.z;
        diff.update_norm();
        const double inc = diff.norm_lambda;
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * next.norm_lambda;
        if (prev_inc > 1e-12 * next.norm_lambda && inc > floor) {
            const double ratio = inc / prev_inc;
            fp.contraction_factor = std::max(fp.contraction_factor, ratio);
            if (ratio > 0.9 && ++strikes >= 2) {
                throw NumericalError("solve_fixed_point: the Lyapunov-Perron map is not contracting");
            }
        }
        cur = std::move(next);
        prev_inc = inc;
        if (inc <= std::max(tol, floor)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "solve_fixed_point: no convergence in " << max_iter << " iterations";
        throw NumericalError(os.str());
    }
    fp.iterations = std::max(1, applications - 1);
    if (fp.within_radius && fp.contraction_factor > 0.55) {
        std::ostringstream os;
        os << "solve_fixed_point: contraction factor " << fp.contraction_factor
           << " exceeds 0.55 although the smallness condition holds";
        throw NumericalError(os.str());
    }
    fp.bound_holds = true;
    for (std::size_t k = 0; k < cur.t.size(); ++k) {
        const double b = fp.bound * std::exp(lc.lambda * cur.t[k]);
        if (cur.z.col(k).norm() > b * (1.0 + 1e-12) + 1e-300) fp.bound_holds = false;
    }
    fp.path = std::move(cur);
    return fp;
}

Eigen::VectorXd graph_value(const LPSystem& sys, const Eigen::VectorXd& u_coords, const LPOptions& opt) {
    if (u_coords.size() != sys.rank_u()) throw ConfigError("graph_value: wrong X_u coordinate count");
    const FixedPoint fp = solve_fixed_point(sys.embed_u(u_coords), sys, 1e-13, 200, opt);
    return sys.basis_cs.transpose() * (sys.proj_cs * fp.path.z.col(0));
}

UnstableGraph unstable_graph(const LPSystem& sys, double radius, int n_samples, const LPOptions& opt,
                             Exec exec) {
    const LPConstants lc = lp_constants(sys, opt);
    if (!(radius > 0.0)) throw ConfigError("unstable_graph: radius must be > 0");
    if (opt.enforce_radius && radius > lc.radius * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "unstable_graph: radius " << radius << " exceeds delta_1/(2 C_0) = " << lc.radius;
        throw ConfigError(os.str());
    }
    if (n_samples < 1) throw ConfigError("unstable_graph: n_samples must be >= 1");
    const int k = sys.rank_u();
    if (k == 0) throw ConfigError("unstable_graph: X_u is trivial");

    // deterministic mesh of the X_u ball
    std::vector<Eigen::VectorXd> pts;
    if (k == 1) {
        for (int i = 0; i < n_samples; ++i) {
            const double s = n_samples == 1 ? 0.0 : -radius + 2.0 * radius * i / (n_samples - 1);
            pts.push_back(Eigen::VectorXd::Constant(1, s));
        }
    } else {
        pts.push_back(Eigen::VectorXd::Zero(k));
        int R = 1;
        while (1 + 3 * R * (R + 1) < n_samples) ++R;
        for (int r = 1; r <= R; ++r) {
            for (int a = 0; a < 6 * r; ++a) {
                const double th = 2.0 * std::numbers::pi * a / (6 * r);
                Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
                p[0] = radius * r / R * std::cos(th);
                p[1] = radius * r / R * std::sin(th);
                pts.push_back(p);
            }
        }
        for (int d = 2; d < k; ++d) {
            for (int sgn : {1, -1}) {
                Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
                p[d] = sgn * radius;
                pts.push_back(p);
            }
        }
    }

    UnstableGraph g;
    g.radius = radius;
    g.z_u = pts;
    g.h.assign(pts.size(), Eigen::VectorXd());
    std::vector<double> factors(pts.size(), 0.0);
    for_each_index(static_cast<int>(pts.size()), exec, [&](int i) {
        const FixedPoint fp = solve_fixed_point(sys.embed_u(pts[i]), sys, 1e-13, 200, opt);
        g.h[i] = sys.basis_cs.transpose() * (sys.proj_cs * fp.path.z.col(0));
        factors[i] = fp.contraction_factor;
    });
    for (double f : factors) g.max_contraction = std::max(g.max_contraction, f);

    const Eigen::VectorXd h0 = graph_value(sys, Eigen::VectorXd::Zero(k), opt);
    if (h0.size() > 0 && h0.norm() > 1e-10) throw NumericalError("unstable_graph: h(0) != 0");

    const double s = radius / 100.0;
    for (int d = 0; d < k; ++d) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
        e[d] = s;
        const Eigen::VectorXd dh = (graph_value(sys, e, opt) - graph_value(sys, -e, opt)) / (2.0 * s);
        g.tangency_norm = std::max(g.tangency_norm, dh.size() ? dh.norm() : 0.0);
    }
    return g;
}

InvarianceReport verify_local_invariance(const UnstableGraph& graph, const LPSystem& sys, double horizon,
                                         const LPOptions& opt, Exec exec) {
    if (!sys.generator) throw ConfigError("verify_local_invariance: needs an autonomous system");
    if (!(horizon > 0.0 && horizon <= 5.0)) throw ConfigError("verify_local_invariance: horizon in (0, 5]");
    const LPConstants lc = lp_constants(sys, opt);
    const double ball = opt.enforce_radius ? lc.radius : std::max(lc.radius, 2.0 * graph.radius);

    using Vec = Eigen::VectorXd;
    auto rhs = [&sys](double t, const Vec& z, Vec& dz) { dz = sys.z_dot(t, z); };
    ode::Options o;
    o.rtol = 1e-12;
    o.atol = 1e-15;

    InvarianceReport rep;
    rep.lambda = lc.lambda;
    const int n = static_cast<int>(graph.z_u.size());
    const int n_checks = 10;
    std::vector<double> dist(n, 0.0);
    std::vector<int> checks(n, 0);
    for_each_index(n, exec, [&](int i) {
        if (graph.z_u[i].norm() == 0.0) return;
        Vec z = sys.basis_u * graph.z_u[i] + sys.basis_cs * graph.h[i];
        ode::DormandPrince<Vec> dp(o);
        for (int j = 1; j <= n_checks; ++j) {
            dp.advance(rhs, z, horizon * (j - 1) / n_checks, horizon * j / n_checks);
            const Vec u = sys.basis_u.transpose() * (sys.proj_u * z);
            if (u.norm() > ball || z.norm() > lc.delta1) break;
            const Vec h = graph_value(sys, u, opt);
            const Vec zc = sys.basis_cs.transpose() * (sys.proj_cs * z);
            dist[i] = std::max(dist[i], (zc - h).norm());
            ++checks[i];
        }
    });
    for (int i = 0; i < n; ++i) {
        if (graph.z_u[i].norm() == 0.0) continue;
        ++rep.n_trajectories;
        rep.n_checks += checks[i];
        rep.max_distance = std::max(rep.max_distance, dist[i]);
    }
    if (rep.n_trajectories > 0 && rep.n_checks == 0) {
        throw NumericalError("verify_local_invariance: every trajectory left the ball before the first check");
    }

    // backward decay from the outermost graph point, fitted over [-10, 0]
    int far = 0;
    for (int i = 0; i < n; ++i) {
        if (graph.z_u[i].norm() > graph.z_u[far].norm()) far = i;
    }
    if (graph.z_u[far].norm() > 0.0) {
        Vec z = sys.basis_u * graph.z_u[far] + sys.basis_cs * graph.h[far];
        ode::DormandPrince<Vec> dp(o);
        std::vector<double> ts{0.0}, ls{std::log(z.norm())};
        for (int j = 1; j <= 20; ++j) {
            dp.advance(rhs, z, -0.5 * (j - 1), -0.5 * j);
            ts.push_back(-0.5 * j);
            ls.push_back(std::log(z.norm()));
        }
        const double m = static_cast<double>(ts.size());
        double st = 0, sl = 0, stt = 0, stl = 0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            st += ts[j];
            sl += ls[j];
            stt += ts[j] * ts[j];
            stl += ts[j] * ls[j];
        }
        rep.backward_rate = (m * stl - st * sl) / (m * stt - st * st);
    }
    return rep;
}

}  // namespace idyll
