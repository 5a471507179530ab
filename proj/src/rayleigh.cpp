// rayleigh.cpp
#include "idyll/rayleigh.hpp"

#include "idyll/error.hpp"
#include "idyll/ode.hpp"

#include <cmath>
#include <sstream>

namespace idyll {

namespace {

template <int N>
using CState = Eigen::Matrix<cplx, N, 1>;

}  // namespace

bool ComplexMode::in_howard_semicircle(double u_min, double u_max, double slack) const {
    const double mid = 0.5 * (u_max + u_min);
    const double rad = 0.5 * (u_max - u_min);
    return std::norm(c - mid) <= rad * rad + slack;
}

RayleighProblem::RayleighProblem(ShearProfile profile, double U_s, RayleighOptions opt)
    : profile_(std::move(profile)), U_s_(U_s), opt_(opt) {
    const double curv = profile_.ddu().cwiseAbs().maxCoeff();
    if (curv < 1e-12 * std::max(1.0, profile_.u().cwiseAbs().maxCoeff())) {
        // Flat profile: no inflection instability, nothing to anchor on.
        alpha_max_ = 0.0;
        y1_index_ = 0;
        return;
    }
    const Eigen::VectorXd K = build_K(profile_, U_s_);
    neutral_ = lowest_eigenpair(K, profile_.grid());
    alpha_max_ = neutral_->alpha_max;
    y1_index_ = neutral_->min_index;
}

FundamentalPair RayleighProblem::integrate_fundamental(double a, cplx c, double rtol) const {
    RayleighProblem tmp = *this;
    tmp.opt_.rtol = rtol;
    tmp.opt_.atol = std::min(opt_.atol, rtol * 1e-3);
    return tmp.integrate_fundamental(a, c, false, 0);
}

FundamentalPair RayleighProblem::integrate_fundamental(double a, cplx c, bool sensitivity,
                                                       int n_samples) const {
    const double L = profile_.grid().length();
    const double y_start = y1();
    const double y_end = y_start + L;
    const ShearProfile& prof = profile_;

    ode::Options o;
    o.rtol = opt_.rtol;
    o.atol = opt_.atol;
    o.min_step = 1e-13;

    FundamentalPair out;
    auto wronskian = [&out](const auto& s) {
        const cplx w = s[0] * s[3] - s[1] * s[2];
        out.max_wronskian_drift = std::max(out.max_wronskian_drift, std::abs(w - 1.0));
    };

    auto run = [&](auto state, auto&& rhs) {
        using State = decltype(state);
        ode::DormandPrince<State> dp(o);
        if (n_samples > 0) {
            out.phi1_samples.resize(n_samples);
            out.dphi1_samples.resize(n_samples);
            out.phi2_samples.resize(n_samples);
            out.dphi2_samples.resize(n_samples);
        }
        auto record = [&](int j, const State& s) {
            out.phi1_samples[j] = s[0];
            out.dphi1_samples[j] = s[1];
            out.phi2_samples[j] = s[2];
            out.dphi2_samples[j] = s[3];
        };
        auto obs = [&](double, const State& s) { wronskian(s); };
        if (n_samples > 0) {
            record(0, state);
            for (int j = 1; j <= n_samples; ++j) {
                const double ya = y_start + L * (j - 1) / n_samples;
                const double yb = (j == n_samples) ? y_end : y_start + L * j / n_samples;
                dp.advance(rhs, state, ya, yb, obs);
                if (j < n_samples) record(j, state);
            }
        } else {
            dp.advance(rhs, state, y_start, y_end, obs);
        }
        out.steps = dp.stats().accepted;
        return state;
    };

    if (sensitivity) {
        CState<8> s0 = CState<8>::Zero();
        s0[0] = 1.0;
        s0[3] = 1.0;
        auto rhs = [&](double y, const CState<8>& s, CState<8>& ds) {
            const double u = prof.eval(y, 0);
            const double u2 = prof.eval(y, 2);
            const cplx inv = 1.0 / (u - c);
            const cplx V = a + u2 * inv;
            const cplx dV = u2 * inv * inv;
            ds[0] = s[1];
            ds[1] = V * s[0];
            ds[2] = s[3];
            ds[3] = V * s[2];
            ds[4] = s[5];
            ds[5] = V * s[4] + dV * s[0];
            ds[6] = s[7];
            ds[7] = V * s[6] + dV * s[2];
        };
        const CState<8> s = run(s0, rhs);
        out.phi1 = s[0];
        out.dphi1 = s[1];
        out.phi2 = s[2];
        out.dphi2 = s[3];
        out.dI_dc = s[4] + s[7];
    } else {
        CState<4> s0(1.0, 0.0, 0.0, 1.0);
        auto rhs = [&](double y, const CState<4>& s, CState<4>& ds) {
            const double u = prof.eval(y, 0);
            const double u2 = prof.eval(y, 2);
            const cplx V = a + u2 / (u - c);
            ds[0] = s[1];
            ds[1] = V * s[0];
            ds[2] = s[3];
            ds[3] = V * s[2];
        };
        const CState<4> s = run(s0, rhs);
        out.phi1 = s[0];
        out.dphi1 = s[1];
        out.phi2 = s[2];
        out.dphi2 = s[3];
    }
    return out;
}

double RayleighProblem::neutral_discriminant(double a) const {
    const ShearProfile& prof = profile_;
    const double Us = U_s_;
    const double scale = std::max(1.0, prof.u().cwiseAbs().maxCoeff());
    auto K = [&](double y) {
        const double d = prof.eval(y, 0) - Us;
        if (std::abs(d) < 1e-4 * scale) return -prof.eval(y, 3) / prof.eval(y, 1);
        return -prof.eval(y, 2) / d;
    };
    ode::Options o;
    o.rtol = opt_.rtol;
    o.atol = opt_.atol;
    ode::DormandPrince<Eigen::Vector4d> dp(o);
    auto rhs = [&](double y, const Eigen::Vector4d& s, Eigen::Vector4d& ds) {
        const double V = a - K(y);
        ds << s[1], V * s[0], s[3], V * s[2];
    };
    Eigen::Vector4d s(1.0, 0.0, 0.0, 1.0);
    dp.advance(rhs, s, y1(), y1() + prof.grid().length());
    return s[0] + s[3] - 2.0;
}

cplx RayleighProblem::discriminant(double a, cplx c) const {
    return integrate_fundamental(a, c).discriminant();
}

ComplexMode RayleighProblem::find_unstable_mode(double alpha, cplx c_guess) const {
    if (!(alpha_max_ > 0.0)) {
        throw NumericalError(
            "no unstable mode: the profile has no inflection instability (alpha_max = 0)");
    }
    if (!(alpha > 0.0 && alpha < alpha_max_)) {
        std::ostringstream os;
        os << "find_unstable_mode: alpha = " << alpha << " outside (0, alpha_max = " << alpha_max_
           << ")";
        throw ConfigError(os.str());
    }
    if (!(c_guess.imag() > 0.0)) throw ConfigError("find_unstable_mode: Im c_guess must be > 0");

    const double a = alpha * alpha;
    cplx c = c_guess;
    FundamentalPair fp = integrate_fundamental(a, c, true);
    cplx I = fp.discriminant();
    int it = 0;
    for (; it < opt_.max_newton; ++it) {
        if (std::abs(I) <= 1e-3 * opt_.discriminant_tol) break;
        const cplx dI = *fp.dI_dc;
        if (dI == 0.0) throw NumericalError("find_unstable_mode: vanishing dI/dc");
        cplx step = -I / dI;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(c))) break;

        // Halve steps that leave the upper half plane or fail to reduce |I|.
        bool accepted = false;
        for (int halving = 0; halving <= 10; ++halving) {
            const cplx trial = c + step;
            if (trial.imag() > 0.0) {
                FundamentalPair ft;
                try {
                    ft = integrate_fundamental(a, trial, true);
                } catch (const NumericalError&) {
                    step *= 0.5;
                    continue;
                }
                const cplx It = ft.discriminant();
                if (std::abs(It) < std::abs(I) || halving == 10) {
                    c = trial;
                    fp = std::move(ft);
                    I = It;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            throw NumericalError(
                "find_unstable_mode: Newton step could not stay in the upper half plane");
        }
    }
    if (!(std::abs(I) <= opt_.discriminant_tol)) {
        std::ostringstream os;
        os << "find_unstable_mode: no convergence at alpha = " << alpha << " (|I| = " << std::abs(I)
           << " after " << it << " iterations)";
        throw NumericalError(os.str());
    }
    if (c.imag() <= 1e-12) {
        throw NumericalError("find_unstable_mode: root is neutral or stable (Im c <= 1e-12)");
    }
    return assemble_mode(alpha, c, it);
}

ComplexMode RayleighProblem::assemble_mode(double alpha, cplx c, int iterations) const {
    const auto& grid = profile_.grid();
    const int n = grid.n();
    const double a = alpha * alpha;
    const int m = std::max(opt_.residual_points, n);
    // residual grid must contain the profile nodes
    const int refine = (m + n - 1) / n;
    const int n_fine = refine * n;
    const FundamentalPair fp = integrate_fundamental(a, c, false, n_fine);

    // periodic combination p phi_1 + q phi_2: null vector of (monodromy - I)
    const cplx m11 = fp.phi1, m12 = fp.phi2, m21 = fp.dphi1, m22 = fp.dphi2;
    cplx p1 = m12, q1 = 1.0 - m11;
    cplx p2 = 1.0 - m22, q2 = m21;
    cplx p, q;
    if (std::norm(p1) + std::norm(q1) >= std::norm(p2) + std::norm(q2)) {
        p = p1;
        q = q1;
    } else {
        p = p2;
        q = q2;
    }
    Eigen::VectorXcd phi_f = p * fp.phi1_samples + q * fp.phi2_samples;
    Eigen::VectorXcd dphi_f = p * fp.dphi1_samples + q * fp.dphi2_samples;

    // normalize: max |phi| = 1, real and positive there
    Eigen::Index imax = 0;
    phi_f.cwiseAbs().maxCoeff(&imax);
    const cplx norm = phi_f[imax];
    phi_f /= norm;
    dphi_f /= norm;

    // residual on the fine grid (samples start at y_1)
    const double L = grid.length();
    PeriodicGrid1D fine(n_fine, L);
    const Eigen::VectorXcd d2 = spectral_derivative(dphi_f, fine, 1);
    double res = 0.0;
    for (int j = 0; j < n_fine; ++j) {
        const double y = y1() + L * j / n_fine;
        const double u = profile_.eval(y, 0);
        const double u2 = profile_.eval(y, 2);
        res = std::max(res, std::abs(u2 * phi_f[j] - (u - c) * (d2[j] - a * phi_f[j])));
    }

    ComplexMode mode;
    mode.alpha = alpha;
    mode.c = c;
    mode.discriminant_residual = std::abs(fp.discriminant());
    mode.rayleigh_residual = res / phi_f.cwiseAbs().maxCoeff();
    mode.growth_rate = alpha * c.imag();
    mode.iterations = iterations;
    mode.phi.resize(n);
    for (int j = 0; j < n; ++j) {
        // node (y1_index + j) mod n sits at fine index j * refine
        mode.phi[(y1_index_ + j) % n] = phi_f[j * refine];
    }
    return mode;
}

BranchResult RayleighProblem::continue_branch(const std::vector<double>& alpha_grid) const {
    BranchResult out;
    if (alpha_grid.empty()) return out;
    for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
        if (!(alpha_grid[i] < alpha_grid[i - 1])) {
            throw ConfigError("continue_branch: alpha grid must be strictly decreasing");
        }
    }
    if (!(alpha_max_ > 0.0)) {
        throw NumericalError("no unstable mode: the profile has no inflection instability");
    }
    if (alpha_grid.front() >= alpha_max_ || alpha_max_ - alpha_grid.front() > 0.05) {
        throw ConfigError("continue_branch: grid must start within 0.05 below alpha_max");
    }

    cplx seed(U_s_, 0.05 * (alpha_max_ - alpha_grid.front()));
    for (double alpha : alpha_grid) {
        try {
            ComplexMode m = find_unstable_mode(alpha, seed);
            if (!out.modes.empty() && std::abs(m.c - out.modes.back().c) > 0.2) {
                std::ostringstream os;
                os << "branch jump at alpha = " << alpha << " (|dc| = "
                   << std::abs(m.c - out.modes.back().c) << ")";
                out.diagnostic = os.str();
                return out;
            }
            seed = m.c;
            out.modes.push_back(std::move(m));
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "branch lost at alpha = " << alpha << ": " << e.what();
            out.diagnostic = os.str();
            return out;
        }
    }
    return out;
}

}  // namespace idyll
