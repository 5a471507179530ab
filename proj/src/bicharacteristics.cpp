// bicharacteristics.cpp
#include "idyll/bicharacteristics.hpp"

#include "idyll/error.hpp"
#include "idyll/ode.hpp"
#include "idyll/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace idyll {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using State9 = Eigen::Matrix<double, 9, 1>;
using State6 = Eigen::Matrix<double, 6, 1>;

constexpr double kXiFloor = 1e-8;

void ray_derivative(const VectorField3D& flow, const State9& s, State9& ds) {
    const Vec3 x = s.segment<3>(0), xi = s.segment<3>(3), b = s.segment<3>(6);
    const double xi2 = xi.squaredNorm();
    if (!(xi2 >= kXiFloor * kXiFloor)) {
        throw NumericalError("ray system: |xi| fell below 1e-8");
    }
    const Mat3 J = flow.jacobian(x);
    const Vec3 Jb = J * b;
    ds.segment<3>(0) = flow.velocity(x);
    ds.segment<3>(3) = -J.transpose() * xi;
    ds.segment<3>(6) = -Jb + (2.0 * Jb.dot(xi) / xi2) * xi;
}

double shear_combination(const VectorField3D::Shear& sh, const State9& s) {
    const double y = s[1], z = s[2];
    return (sh.U_y(y, z) * s[7] + sh.U_z(y, z) * s[8]) * s.segment<3>(3).squaredNorm();
}

double unit_from_bits(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

}  // namespace

State9 RayState::pack() const {
    State9 s;
    s << x, xi, b;
    return s;
}

RayState RayState::unpack(const State9& s) {
    RayState r;
    r.x = s.segment<3>(0);
    r.xi = s.segment<3>(3);
    r.b = s.segment<3>(6);
    return r;
}

RayState ray_rhs(const RayState& state, const VectorField3D& flow) {
    State9 ds;
    ray_derivative(flow, state.pack(), ds);
    return RayState::unpack(ds);
}

RayTrajectory integrate_ray(const RayState& state0, const VectorField3D& flow, double T,
                            double tol, int n_out) {
    if (!(T > 0.0)) throw ConfigError("integrate_ray: T must be > 0");
    if (!(tol >= 1e-12 && tol <= 1e-6)) throw ConfigError("integrate_ray: tol must be in [1e-12, 1e-6]");
    if (n_out < 1) throw ConfigError("integrate_ray: n_out must be >= 1");
    if (state0.xi.norm() < kXiFloor) throw NumericalError("integrate_ray: |xi0| below 1e-8");

    ode::Options o;
    // local error control a factor 10 below tol so the accumulated invariant drift stays within 1e2 * tol
    o.rtol = tol * 0.1;
    o.atol = tol * 1e-3;
    ode::DormandPrince<State9> dp(o);
    auto rhs = [&flow](double, const State9& s, State9& ds) { ray_derivative(flow, s, ds); };

    RayTrajectory tr;
    State9 s = state0.pack();
    const double bxi0 = state0.b.dot(state0.xi);
    const auto& sh = flow.shear();
    const double comb0 = sh ? shear_combination(*sh, s) : 0.0;
    double rel_bxi = 0.0, rel_comb = 0.0;
    if (sh) tr.drift_shear = 0.0;

    auto observe = [&](double, const State9& y) {
        const Vec3 xi = y.segment<3>(3), b = y.segment<3>(6);
        const double d = std::abs(b.dot(xi) - bxi0);
        tr.drift_b_xi = std::max(tr.drift_b_xi, d);
        rel_bxi = std::max(rel_bxi, d / std::max(1.0, b.norm() * xi.norm()));
        if (sh) {
            const double dc = std::abs(shear_combination(*sh, y) - comb0);
            *tr.drift_shear = std::max(*tr.drift_shear, dc);
            const double scale = std::max(1.0, b.norm() * xi.squaredNorm());
            rel_comb = std::max(rel_comb, dc / scale);
        }
    };

    tr.t.push_back(0.0);
    tr.states.push_back(state0);
    for (int j = 1; j <= n_out; ++j) {
        const double ta = T * (j - 1) / n_out;
        const double tb = (j == n_out) ? T : T * j / n_out;
        dp.advance(rhs, s, ta, tb, observe);
        tr.t.push_back(tb);
        tr.states.push_back(RayState::unpack(s));
    }
    tr.steps = dp.stats().accepted;

    if (rel_bxi > 1e3 * tol || rel_comb > 1e3 * tol) {
        std::ostringstream os;
        os << "integrate_ray: invariant drift " << std::max(rel_bxi, rel_comb)
           << " exceeds 1e3 * tol; the Jacobian callback may be inconsistent with the velocity";
        throw NumericalError(os.str());
    }
    return tr;
}

RayState shear_closed_form(double U_y, double U_z, double U_val, const RayState& s0, double t) {
    const Vec3 g(0.0, U_y, U_z);
    const double xi1 = s0.xi[0];
    auto xi_at = [&](double s) { return Vec3(s0.xi - s * xi1 * g); };
    // beta = U_y b2 + U_z b3 satisfies beta |xi|^2 = const
    const double C = (U_y * s0.b[1] + U_z * s0.b[2]) * s0.xi.squaredNorm();

    RayState out;
    out.x = s0.x + Vec3(U_val * t, 0.0, 0.0);
    out.xi = xi_at(t);
    out.b = s0.b;
    if (C != 0.0 && t != 0.0) {
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        for (int c = 0; c < 3; ++c) {
            auto f = [&](double s) {
                const Vec3 xi = xi_at(s);
                const double q = xi.squaredNorm();
                const double beta = C / q;
                return (c == 0 ? -beta : 0.0) + 2.0 * beta * xi1 * xi[c] / q;
            };
            out.b[c] += GK::integrate(f, 0.0, t, 20, 1e-13);
        }
    }
    return out;
}

double min_xi_norm(double U_y, double U_z, double t) {
    if (!(t >= 0.0)) throw ConfigError("min_xi_norm: t must be >= 0");
    const double p = 2.0 + (U_y * U_y + U_z * U_z) * t * t;
    // smaller root of mu^2 - p mu + 1, written without cancellation
    return 2.0 / (p + std::sqrt(p * p - 4.0));
}

std::vector<RayState> sample_ray_states(const VectorField3D& flow, int n_samples,
                                        std::uint64_t seed) {
    if (n_samples < 1) throw ConfigError("sample_ray_states: n_samples must be >= 1");
    constexpr int d = 6;
    // generalized golden ratio: phi^(d+1) = phi + 1
    double phi = 2.0;
    for (int it = 0; it < 100; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
    std::array<double, d> step{}, shift{};
    std::mt19937_64 rng(seed);
    for (int i = 0; i < d; ++i) {
        step[i] = std::fmod(std::pow(1.0 / phi, i + 1), 1.0);
        shift[i] = unit_from_bits(rng());
    }

    std::vector<RayState> out(n_samples);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int n = 0; n < n_samples; ++n) {
        std::array<double, d> u{};
        for (int i = 0; i < d; ++i) {
            u[i] = std::fmod(shift[i] + (n + 1) * step[i], 1.0);
        }
        RayState& r = out[n];
        for (int i = 0; i < 3; ++i) r.x[i] = u[i] * flow.periods()[i];
        const double z = 1.0 - 2.0 * u[3];
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double az = two_pi * u[4];
        r.xi = Vec3(rho * std::cos(az), rho * std::sin(az), z);
        // fixed tangent frame
        const Vec3 a = std::abs(z) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
        const Vec3 e1 = a.cross(r.xi).normalized();
        const Vec3 e2 = r.xi.cross(e1);
        const double psi = two_pi * u[5];
        r.b = std::cos(psi) * e1 + std::sin(psi) * e2;
    }
    return out;
}

CubicBound fit_cubic_bound(const std::vector<double>& t, const std::vector<double>& env,
                           double fit_T) {
    if (t.size() != env.size() || t.empty()) throw ConfigError("fit_cubic_bound: bad samples");
    CubicBound cb;
    cb.fit_T = fit_T;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 1.0) cb.c4 = std::max(cb.c4, env[i]);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= 1.0 && t[i] <= fit_T) {
            cb.c3 = std::max(cb.c3, (env[i] - cb.c4) / (t[i] * t[i] * t[i]));
        }
    }
    return cb;
}

LambdaEstimate estimate_lambda_m(const VectorField3D& flow, int m, double T, int n_samples,
                                 std::uint64_t seed, Exec exec, double tol) {
    if (m < 0 || m > 4) throw ConfigError("estimate_lambda_m: m must be in [0, 4]");
    if (!(T >= 10.0)) throw ConfigError("estimate_lambda_m: T must be >= 10");
    if (n_samples < 100) throw ConfigError("estimate_lambda_m: n_samples must be >= 100");

    const std::vector<RayState> init = sample_ray_states(flow, n_samples, seed);
    const bool shear = flow.shear().has_value();
    // shear flows record |b| every 0.1 time units for the cubic envelope
    const int n_out = shear ? std::max(1, static_cast<int>(std::lround(T / 0.1))) : 1;

    LambdaEstimate est;
    est.m = m;
    est.T = T;
    est.n_samples = n_samples;
    est.seed = seed;
    est.per_sample.assign(n_samples, 0.0);
    std::vector<std::vector<double>> bnorm(shear ? n_samples : 0);
    std::vector<double> times;

    for_each_index(n_samples, exec, [&](int i) {
        const RayTrajectory tr = integrate_ray(init[i], flow, T, tol, n_out);
        const RayState& f = tr.final();
        est.per_sample[i] =
            (std::log(f.b.norm() / init[i].b.norm()) +
             m * std::log(f.xi.norm() / init[i].xi.norm())) / T;
        if (shear) {
            bnorm[i].resize(tr.states.size());
            for (std::size_t k = 0; k < tr.states.size(); ++k) bnorm[i][k] = tr.states[k].b.norm();
        }
    });
    for (double v : est.per_sample) {
        if (!std::isfinite(v)) throw NumericalError("estimate_lambda_m: non-finite sample exponent");
    }
    est.value = *std::max_element(est.per_sample.begin(), est.per_sample.end());

    if (shear) {
        std::vector<double> t(n_out + 1), env(n_out + 1, 0.0);
        for (int k = 0; k <= n_out; ++k) {
            t[k] = T * k / n_out;
            for (int i = 0; i < n_samples; ++i) env[k] = std::max(env[k], bnorm[i][k]);
        }
        est.bound = fit_cubic_bound(t, env, std::min(T, 50.0));
        est.bias_bound = std::log(std::max(1.0, (*est.bound)(T))) / T;
    }
    return est;
}

Mu0Estimate estimate_mu0(const VectorField3D& flow, double T, int n_samples, std::uint64_t seed,
                         Exec exec, double tol) {
    if (!(T >= 10.0)) throw ConfigError("estimate_mu0: T must be >= 10");
    if (n_samples < 100) throw ConfigError("estimate_mu0: n_samples must be >= 100");
    const std::vector<RayState> init = sample_ray_states(flow, n_samples, seed);

    ode::Options o;
    // local error control a factor 10 below tol so the accumulated invariant drift stays within 1e2 * tol
    o.rtol = tol * 0.1;
    o.atol = tol * 1e-3;

    Mu0Estimate est;
    est.per_sample.assign(n_samples, 0.0);
    for_each_index(n_samples, exec, [&](int i) {
        double best = -std::numeric_limits<double>::infinity();
        for (int adjoint = 0; adjoint < 2; ++adjoint) {
            for (int dir : {1, -1}) {
                auto rhs = [&](double, const State6& s, State6& ds) {
                    const Vec3 x = s.head<3>();
                    const Mat3 J = flow.jacobian(x);
                    ds.head<3>() = flow.velocity(x);
                    ds.tail<3>() = adjoint ? Vec3(-J.transpose() * s.tail<3>())
                                           : Vec3(J * s.tail<3>());
                };
                ode::DormandPrince<State6> dp(o);
                State6 s;
                s << init[i].x, init[i].xi.normalized();
                double log_growth = 0.0;
                const int n_seg = static_cast<int>(std::ceil(T));
                for (int k = 0; k < n_seg; ++k) {
                    const double ta = dir * T * k / n_seg;
                    const double tb = dir * T * (k + 1) / n_seg;
                    dp.advance(rhs, s, ta, tb);
                    const double nrm = s.tail<3>().norm();
                    log_growth += std::log(nrm);
                    s.tail<3>() /= nrm;
                }
                best = std::max(best, log_growth / T);
            }
        }
        est.per_sample[i] = best;
    });
    est.value = *std::max_element(est.per_sample.begin(), est.per_sample.end());
    return est;
}

}  // namespace idyll
