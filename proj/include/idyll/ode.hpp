// ode.hpp
// Adaptive Dormand-Prince 5(4) integrator with PI step-size control.
//
// The stepper is templated on the state type so the same code drives real
// ray states, complex shooting states and dynamic-size Galerkin vectors.
// Any Eigen vector type (fixed or dynamic, real or complex) works.
#pragma once

#include "idyll/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace idyll::ode {

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 selects a step from the local scale
    double min_step = 1e-14;    // relative to max(1, |t|)
    double max_step = 0.0;      // 0 means unbounded
    long max_steps = 50'000'000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

/// Dormand-Prince 5(4) with FSAL and PI control. Keeps the last accepted step
/// size between `advance` calls so segment-by-segment integration (output at
/// fixed times) does not restart the step-size search.
template <class State>
class DormandPrince {
public:
    explicit DormandPrince(Options opt = {}) : opt_(opt) {}

    /// Integrate y from t to t_end (either direction). `rhs(t, y, dydt)` fills
    /// dydt. `observer(t, y)` is called after every accepted step.
    template <class Rhs, class Observer>
    void advance(Rhs&& rhs, State& y, double t, double t_end, Observer&& observer) {
        if (t == t_end) return;
        const double dir = t_end > t ? 1.0 : -1.0;
        State k1 = y;
        rhs(t, y, k1);
        ++stats_.rhs_evals;

        double h = h_;
        if (h <= 0.0) h = initial_step(rhs, y, t, k1, dir);
        h = std::min(h, std::abs(t_end - t));

        State k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
        double err_prev = 1e-4;
        long steps = 0;
        while (dir * (t_end - t) > 0.0) {
            if (++steps > opt_.max_steps) {
                throw NumericalError("ode: maximum number of steps exceeded");
            }
            const double h_floor = opt_.min_step * std::max(1.0, std::abs(t));
            if (h < h_floor) {
                std::ostringstream os;
                os << "ode: step size underflow at t = " << t << " (h = " << h << ")";
                throw NumericalError(os.str());
            }
            bool last = false;
            if (h >= std::abs(t_end - t)) {
                h = std::abs(t_end - t);
                last = true;
            }
            const double hs = dir * h;

            ytmp = y + hs * (a21 * k1);
            rhs(t + c2 * hs, ytmp, k2);
            ytmp = y + hs * (a31 * k1 + a32 * k2);
            rhs(t + c3 * hs, ytmp, k3);
            ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * hs, ytmp, k4);
            ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * hs, ytmp, k5);
            ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + hs, ytmp, k6);
            ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const double t_new = last ? t_end : t + hs;
            rhs(t_new, ynew, k7);
            stats_.rhs_evals += 6;

            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = error_norm(y, ynew, err);

            if (en <= 1.0) {
                t = t_new;
                y = ynew;
                k1 = k7;
                ++stats_.accepted;
                observer(t, static_cast<const State&>(y));
                // PI controller (Hairer-Wanner, beta = 0.04)
                double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) *
                             std::pow(err_prev, 0.04);
                fac = std::clamp(fac, 0.2, 10.0);
                err_prev = std::max(en, 1e-4);
                if (!last) h = h * fac;
                if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
                h_ = h;
            } else {
                ++stats_.rejected;
                h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
                last = false;
            }
        }
    }

    template <class Rhs>
    void advance(Rhs&& rhs, State& y, double t, double t_end) {
        advance(std::forward<Rhs>(rhs), y, t, t_end, [](double, const State&) {});
    }

    const Stats& stats() const { return stats_; }
    void reset_step() { h_ = 0.0; }

private:
    double error_norm(const State& y0, const State& y1, const State& err) const {
        double acc = 0.0;
        const auto n = err.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opt_.atol +
                              opt_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            const double r = std::abs(err[i]) / sc;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(n));
    }

    template <class Rhs>
    double initial_step(Rhs& rhs, const State& y, double t, const State& f0, double dir) {
        if (opt_.initial_step > 0.0) return opt_.initial_step;
        // Hairer-Norsett-Wanner starting step heuristic.
        double d0 = 0.0, d1 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y[i]);
            d0 += std::norm(y[i]) / (sc * sc);
            d1 += std::norm(f0[i]) / (sc * sc);
        }
        d0 = std::sqrt(d0 / y.size());
        d1 = std::sqrt(d1 / y.size());
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        State y1 = y + (dir * h0) * f0;
        State f1 = y;
        rhs(t + dir * h0, y1, f1);
        ++stats_.rhs_evals;
        double d2 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y[i]);
            d2 += std::norm(f1[i] - f0[i]) / (sc * sc);
        }
        d2 = std::sqrt(d2 / y.size()) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        double h = std::min(100.0 * h0, h1);
        if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
        return h;
    }

    Options opt_;
    Stats stats_;
    double h_ = 0.0;

    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    // difference between 5th and embedded 4th order weights
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

}  // namespace idyll::ode
