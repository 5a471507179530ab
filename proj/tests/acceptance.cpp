// acceptance.cpp
// One PASS/FAIL line per acceptance criterion, with the measured quantities
// and the wall time against its budget. Exit status is the number of failures.
#include "idyll/bicharacteristics.hpp"
#include "idyll/cli.hpp"
#include "idyll/lyapunov_perron.hpp"
#include "idyll/ode.hpp"
#include "idyll/rayleigh.hpp"
#include "idyll/spectra.hpp"
#include "idyll/sturm_liouville.hpp"
#include "oracles.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace idyll;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Collects named checks; the criterion passes when every check does.
class Checks {
public:
    void add(const std::string& name, bool ok, double value, double limit) {
        ok_ = ok_ && ok;
        std::ostringstream os;
        os.precision(3);
        os << (os_.tellp() > 0 ? "; " : "") << name << " " << value << (ok ? " ok" : " FAILS") << " (limit "
           << limit << ")";
        os_ << os.str();
    }
    void flag(const std::string& name, bool ok) {
        ok_ = ok_ && ok;
        os_ << (os_.tellp() > 0 ? "; " : "") << name << (ok ? " ok" : " FAILS");
    }
    Outcome done() const { return {ok_, os_.str()}; }

private:
    bool ok_ = true;
    std::ostringstream os_;
};

ShearProfile sin_profile(int n = 128) { return ShearProfile::sine(PeriodicGrid1D(n, kTwoPi)); }

// 1. neutral-mode identity
Outcome neutral_mode() {
    Checks c;
    const ShearProfile p = sin_profile();
    const SLResult sl = lowest_eigenpair(build_K(p, 0.0), p.grid());
    c.add("|alpha_max - 1|", std::abs(sl.alpha_max - 1.0) <= 1e-10, std::abs(sl.alpha_max - 1.0), 1e-10);
    const RayleighProblem rp(p, 0.0);
    const double I = std::abs(rp.discriminant(sl.alpha_max * sl.alpha_max, cplx(0.0, 1e-6)));
    c.add("|I(U_s + 1e-6 i, alpha_max^2)|", I <= 1e-5, I, 1e-5);
    return c.done();
}

// 2. instability band
Outcome instability_band() {
    Checks c;
    const RayleighProblem rp(sin_profile(), 0.0);
    std::vector<double> grid;
    for (int k = 19; k >= 2; --k) grid.push_back(0.05 * k);
    const BranchResult br = rp.continue_branch(grid);
    c.flag("branch complete", !br.diagnostic && br.modes.size() == grid.size());
    double worst_I = 0.0, min_im = 1e300;
    bool howard = true;
    for (const auto& m : br.modes) {
        worst_I = std::max(worst_I, m.discriminant_residual);
        min_im = std::min(min_im, m.c.imag());
        howard = howard && m.in_howard_semicircle(-1.0, 1.0);
    }
    c.add("min Im c", min_im > 0.0, min_im, 0.0);
    c.add("max |I|", worst_I <= 1e-8, worst_I, 1e-8);
    c.flag("Howard semicircle", howard);
    // last three points of {0.1, ..., 0.9, 0.95}: alpha = 0.8, 0.9, 0.95
    if (br.modes.size() == grid.size()) {
        const double i80 = br.modes[3].c.imag(), i90 = br.modes[1].c.imag(), i95 = br.modes[0].c.imag();
        c.flag("Im c decreasing over 0.8, 0.9, 0.95", i80 > i90 && i90 > i95);
    }
    return c.done();
}

// 3. shooting vs Galerkin
Outcome cross_module() {
    Checks c;
    const RayleighProblem rp(sin_profile(), 0.0);
    cplx seed(0.0, 0.2);
    for (double alpha : {0.8, 0.5, 0.3}) {
        const ComplexMode m = rp.find_unstable_mode(alpha, seed);
        seed = m.c;
        const Spectrum s = unstable_spectrum(assemble_planar(sin_profile(256), alpha, 64), 0.0);
        const double rel = std::abs(m.growth_rate - s.eigenvalues[0].real()) / m.growth_rate;
        std::ostringstream n;
        n << "rel diff at alpha " << alpha;
        c.add(n.str(), rel <= 1e-3, rel, 1e-3);
    }
    return c.done();
}

// 4. 3D persistence
Outcome persistence_3d() {
    Checks c;
    auto leading_c = [](double eps) {
        return phase_speeds(assemble_shear3d(ShearField2D::sine(64, 16, 1.0, eps), 0.8, 16, 4)).front();
    };
    const cplx c0 = leading_c(0.0);
    c.add("Im c(0)", c0.imag() > 0.0, c0.imag(), 0.0);
    for (double eps : {0.02, 0.05}) {
        const double d = std::abs(leading_c(eps) - c0);
        std::ostringstream n;
        n << "|c(" << eps << ") - c(0)|";
        c.add(n.str(), d <= 5 * eps, d, 5 * eps);
    }
    return c.done();
}

// 5. bicharacteristic identities
Outcome bicharacteristic_identities() {
    Checks c;
    const VectorField3D f = VectorField3D::sine_shear(1.0, 0.5);
    oracle::Rng rng(2024);
    double worst_cf = 0.0, worst_bxi = 0.0, worst_shear = 0.0;
    std::vector<RayTrajectory> long_runs;
    for (int i = 0; i < 100; ++i) {
        RayState s;
        for (int k = 0; k < 3; ++k) s.x[k] = rng.uniform(0.0, kTwoPi);
        s.xi = rng.normal_vector(3).normalized();
        Eigen::Vector3d b = rng.normal_vector(3);
        b -= b.dot(s.xi) * s.xi;
        s.b = b.normalized();
        const RayTrajectory tr = integrate_ray(s, f, 200.0, 1e-10, 400);
        const double Uy = std::cos(s.x[1]), Uz = 0.5 * std::cos(s.x[2]);
        const double U = std::sin(s.x[1]) + 0.5 * std::sin(s.x[2]);
        const RayState cf = shear_closed_form(Uy, Uz, U, s, 50.0);
        const RayState& at50 = tr.states[100];
        worst_cf = std::max({worst_cf, (at50.x - cf.x).cwiseAbs().maxCoeff(), (at50.xi - cf.xi).cwiseAbs().maxCoeff(),
                             (at50.b - cf.b).cwiseAbs().maxCoeff()});
        // drift of the invariants up to T = 50
        for (int k = 0; k <= 100; ++k) {
            const RayState& r = tr.states[k];
            worst_bxi = std::max(worst_bxi, std::abs(r.b.dot(r.xi) - s.b.dot(s.xi)));
            const double q = (Uy * r.b[1] + Uz * r.b[2]) * r.xi.squaredNorm();
            const double q0 = (Uy * s.b[1] + Uz * s.b[2]) * s.xi.squaredNorm();
            worst_shear = std::max(worst_shear, std::abs(q - q0));
        }
        long_runs.push_back(tr);
    }
    c.add("closed form vs integrator", worst_cf <= 1e-8, worst_cf, 1e-8);
    c.add("b.xi drift", worst_bxi <= 1e-8, worst_bxi, 1e-8);
    c.add("(U_y b2 + U_z b3)|xi|^2 drift", worst_shear <= 1e-8, worst_shear, 1e-8);

    double worst_min = 0.0;
    for (const auto& [uy, uz, t] : {std::tuple{1.0, 0.0, 3.0}, std::tuple{1.0, 0.0, 2.0}, std::tuple{0.6, 0.8, 1.5}}) {
        worst_min = std::max(worst_min, std::abs(min_xi_norm(uy, uz, t) - oracle::brute_min_xi(uy, uz, t)));
    }
    c.add("min_xi_norm vs sphere search", worst_min <= 1e-4, worst_min, 1e-4);

    std::vector<double> t, env;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(long_runs[0].t[k]);
        double m = 0.0;
        for (const auto& tr : long_runs) m = std::max(m, tr.states[k].b.norm());
        env.push_back(m);
    }
    const CubicBound cb = fit_cubic_bound(t, env, 50.0);
    double worst_ratio = 0.0;
    for (const auto& tr : long_runs) {
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            worst_ratio = std::max(worst_ratio, tr.states[k].b.norm() / cb(tr.t[k]));
        }
    }
    c.add("max |b(t)| / (c3 t^3 + c4) up to T = 200", worst_ratio <= 1.0, worst_ratio, 1.0);
    return c.done();
}

// 6. essential exponent and mu_0
Outcome essential_exponent() {
    Checks c;
    const VectorField3D f = VectorField3D::sine_shear(1.0, 0.5);
    const LambdaEstimate l = estimate_lambda_m(f, 1, 200.0, 200, 1);
    c.add("Lambda_1", l.value <= 0.05, l.value, 0.05);
    const Mu0Estimate m = estimate_mu0(f, 200.0, 200, 1);
    c.add("mu_0", m.value <= 0.05, m.value, 0.05);
    return c.done();
}

// 7. toy Lyapunov-Perron
Outcome toy_lyapunov_perron() {
    Checks c;
    LPOptions opt;
    opt.delta1_safety = 0.9;
    const LPSystem sys = toy_system(-0.9, 0.9, opt);
    const LPConstants lc = lp_constants(sys, opt);
    const UnstableGraph g = unstable_graph(sys, 0.1, 21, opt);
    c.add("contraction factor", g.max_contraction <= 0.55, g.max_contraction, 0.55);
    double err = 0.0;
    for (std::size_t i = 0; i < g.z_u.size(); ++i) {
        const double x = g.z_u[i][0];
        err = std::max(err, std::abs(g.h[i][0] - x * x / 3.0));
    }
    c.add("sup |h(x) - x^2/3|", err <= 1e-6, err, 1e-6);
    bool bound = true;
    for (double x : {0.1, -0.1, 0.05, 0.01}) {
        bound = bound && solve_fixed_point(Eigen::Vector2d(x, 0.0), sys, 1e-13, 200, opt).bound_holds;
    }
    c.flag("|z(t)| <= 2 C0 |z_u0| e^{lambda t} on the grid", bound);
    const InvarianceReport inv = verify_local_invariance(g, sys, 1.0, opt);
    c.add("backward rate - (lambda - 0.05)", inv.backward_rate >= lc.lambda - 0.05,
          inv.backward_rate - (lc.lambda - 0.05), 0.0);
    return c.done();
}

// 8. Galerkin 2D Euler manifold
Outcome galerkin_manifold() {
    Checks c;
    LPOptions opt;
    opt.dt = 0.1;
    opt.T_max = 80.0;
    const ShearProfile p = sin_profile(64);
    const LPSystem sys = galerkin_reduce(p, 0.8, 16, std::nullopt, std::nullopt, opt);
    const GalerkinModel model(p, 0.8, 16);
    c.flag("dichotomy gap", true);
    c.add("rank P_u", sys.rank_u() == 2, sys.rank_u(), 2);
    const LPConstants lc = lp_constants(sys, opt);
    c.add("delta1/(2 C0)", lc.radius >= 1e-3, lc.radius, 1e-3);

    double worst = 0.0;
    for (double th : {0.0, 1.0, 2.5, 4.0}) {
        const Eigen::VectorXd u = sys.embed_u(Eigen::Vector2d(std::cos(th), std::sin(th)) * 1e-3);
        worst = std::max(worst, solve_fixed_point(u, sys, 1e-13, 200, opt).contraction_factor);
    }
    // the graph mesh covers the interior of the |z_u0| <= 1e-3 ball
    const UnstableGraph g = unstable_graph(sys, 1e-3, 7, opt);
    worst = std::max(worst, g.max_contraction);
    c.add("contraction for |z_u0| <= 1e-3", worst <= 0.55, worst, 0.55);

    const InvarianceReport inv = verify_local_invariance(g, sys, 1.0, opt);
    c.add("off-graph distance over horizon 1", inv.max_distance <= 1e-4, inv.max_distance, 1e-4);

    // forward from small on-manifold points until the orbit leaves the delta_1 ball
    double min_growth = 1e300;
    for (double th : {0.3, 2.0}) {
        const Eigen::Vector2d uc = Eigen::Vector2d(std::cos(th), std::sin(th)) * 1e-5;
        Eigen::VectorXd z = sys.basis_u * uc + sys.basis_cs * graph_value(sys, uc, opt);
        const double e0 = model.energy_norm(z);
        double emax = e0;
        ode::Options o;
        o.rtol = 1e-10;
        o.atol = 1e-14;
        ode::DormandPrince<Eigen::VectorXd> dp(o);
        auto rhs = [&sys](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = sys.z_dot(t, y); };
        for (int k = 0; k < 2000 && z.norm() <= lc.delta1; ++k) {
            dp.advance(rhs, z, 0.1 * k, 0.1 * (k + 1));
            if (z.norm() <= lc.delta1) emax = std::max(emax, model.energy_norm(z));
        }
        min_growth = std::min(min_growth, emax / e0);
    }
    c.add("energy-norm growth before leaving the ball", min_growth >= 5.0, min_growth, 5.0);
    return c.done();
}

// 9. determinism of the batch front end
Outcome determinism() {
    Checks c;
    const fs::path root = fs::temp_directory_path() / "idyll_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::vector<json> configs{
        json{{"command", "lambda-m"},
             {"flow", {{"kind", "abc"}}},
             {"numeric", {{"m", 1}, {"T", 20.0}, {"n_samples", 100}, {"seed", 7}}}},
        json{{"command", "mu0"},
             {"flow", {{"kind", "shear"}, {"amp_z", 0.5}}},
             {"numeric", {{"T", 20.0}, {"n_samples", 100}, {"seed", 3}}}},
        json{{"command", "manifold"}, {"system", {{"kind", "toy"}}}},
        json{{"command", "spectrum2d"}, {"profile", {{"kind", "sin"}}}, {"numeric", {{"alpha", 0.5}}}},
    };
    const int saved = omp_get_max_threads();
    bool identical = true;
    int files = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const fs::path cfg = root / ("config" + std::to_string(i) + ".json");
        std::ofstream(cfg) << configs[i].dump(2);
        std::vector<fs::path> outs;
        for (int run = 0; run < 3; ++run) {
            const fs::path out = root / ("run" + std::to_string(i) + "_" + std::to_string(run));
            std::ostringstream log;
            const int code = run_config_file(cfg.string(), out.string(), run == 1 ? 2 : 1, log);
            identical = identical && code == 0;
            outs.push_back(out);
        }
        for (const auto& e : fs::directory_iterator(outs[0])) {
            const std::string name = e.path().filename().string();
            if (name == "manifest.json") continue;
            auto slurp = [](const fs::path& p) {
                std::ifstream f(p, std::ios::binary);
                std::ostringstream os;
                os << f.rdbuf();
                return os.str();
            };
            const std::string a = slurp(e.path());
            identical = identical && !a.empty() && a == slurp(outs[1] / name) && a == slurp(outs[2] / name);
            ++files;
        }
    }
    omp_set_num_threads(saved);
    c.flag("byte-identical payloads over 3 runs x {1, 2} threads (" + std::to_string(files) + " files)", identical);
    return c.done();
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "neutral-mode identity", 1.0, neutral_mode},
        {2, "instability band", 30.0, instability_band},
        {3, "shooting vs Galerkin eigenvalues", 60.0, cross_module},
        {4, "3D persistence", 300.0, persistence_3d},
        {5, "bicharacteristic identities", 120.0, bicharacteristic_identities},
        {6, "essential exponent and mu_0", 300.0, essential_exponent},
        {7, "toy Lyapunov-Perron manifold", 30.0, toy_lyapunov_perron},
        {8, "Galerkin 2D Euler manifold", 600.0, galerkin_manifold},
        {9, "determinism across runs and threads", 120.0, determinism},
    };
    int failures = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < cr.budget_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("[%s] %d %s: %s; time %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", cr.id, cr.name,
                    o.detail.c_str(), secs, cr.budget_s, in_time ? "" : " EXCEEDED");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
