// cli.cpp
#include "idyll/cli.hpp"

#include "idyll/bicharacteristics.hpp"
#include "idyll/error.hpp"
#include "idyll/lyapunov_perron.hpp"
#include "idyll/rayleigh.hpp"
#include "idyll/spectra.hpp"
#include "idyll/sturm_liouville.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#ifndef IDYLL_VERSION
#define IDYLL_VERSION "unknown"
#endif

namespace idyll {

namespace {

namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ----------------------------------------------------------- strict config

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: '" + name() + "' must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Section sub(const std::string& key) {
        if (!has(key)) throw ConfigError("config: missing required key '" + qualified(key) + "'");
        used_.insert(key);
        return Section(j_.at(key), qualified(key));
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const json* v = fetch(key, fallback.has_value());
        if (!v) return *fallback;
        if (!v->is_string()) throw ConfigError("config: '" + qualified(key) + "' must be a string");
        return v->get<std::string>();
    }

    double number(const std::string& key, std::optional<double> fallback, double lo, double hi) {
        const json* v = fetch(key, fallback.has_value());
        const double x = v ? as_number(*v, key) : *fallback;
        if (!(x >= lo && x <= hi)) throw out_of_range(key, x, lo, hi);
        return x;
    }

    std::optional<double> optional_number(const std::string& key, double lo, double hi) {
        if (!has(key)) return std::nullopt;
        return number(key, std::nullopt, lo, hi);
    }

    long integer(const std::string& key, std::optional<long> fallback, long lo, long hi) {
        const json* v = fetch(key, fallback.has_value());
        if (v && !v->is_number_integer()) {
            throw ConfigError("config: '" + qualified(key) + "' must be an integer");
        }
        const long x = v ? v->get<long>() : *fallback;
        if (x < lo || x > hi) throw out_of_range(key, static_cast<double>(x), lo, hi);
        return x;
    }

    std::vector<double> numbers(const std::string& key, std::size_t min_size) {
        const json* v = fetch(key, false);
        if (!v->is_array() || v->size() < min_size) {
            std::ostringstream os;
            os << "config: '" << qualified(key) << "' must be an array of at least " << min_size << " numbers";
            throw ConfigError(os.str());
        }
        std::vector<double> out;
        for (const auto& e : *v) out.push_back(as_number(e, key));
        return out;
    }

    /// Unknown (never read) keys are errors.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError("config: unknown key '" + qualified(it.key()) + "'");
            }
        }
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string name() const { return path_.empty() ? "<root>" : path_; }

    const json* fetch(const std::string& key, bool optional) {
        if (!has(key)) {
            if (optional) return nullptr;
            throw ConfigError("config: missing required key '" + qualified(key) + "'");
        }
        used_.insert(key);
        return &j_.at(key);
    }

    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) throw ConfigError("config: '" + qualified(key) + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError("config: '" + qualified(key) + "' must be finite");
        return x;
    }

    ConfigError out_of_range(const std::string& key, double x, double lo, double hi) const {
        std::ostringstream os;
        os << "config: '" << qualified(key) << "' = " << format_double(x) << " outside [" << format_double(lo)
           << ", " << format_double(hi) << "]";
        return ConfigError(os.str());
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

constexpr double kBig = 1e300;

// ----------------------------------------------------------- profiles/flows

struct ProfileSpec {
    ShearProfile profile;
    json description;
};

ProfileSpec read_profile(Section& root, Section& numeric) {
    Section p = root.sub("profile");
    const std::string kind = p.string("kind");
    json d{{"kind", kind}};
    if (kind == "sin") {
        const double L = p.number("L_y", kTwoPi, 1e-3, 1e6);
        const double periods = L / kTwoPi;
        const long k = std::lround(periods);
        if (k < 1 || std::abs(periods - k) > 1e-9 * periods) {
            throw ConfigError("config: 'profile.L_y' must be a positive multiple of 2 pi for kind sin");
        }
        const double amp = p.number("amplitude", 1.0, 1e-12, 1e6);
        const double offset = p.number("offset", 0.0, -1e6, 1e6);
        const int n = static_cast<int>(numeric.integer("n", 128, 16, 1 << 16));
        p.finish();
        d.update({{"L_y", L}, {"amplitude", amp}, {"offset", offset}, {"n", n}});
        return {ShearProfile::sine(PeriodicGrid1D(n, L), static_cast<int>(k), amp, offset), d};
    }
    if (kind == "sin-beta") {
        const double beta = p.number("beta", std::nullopt, 1e-3, 1e3);
        p.finish();
        // cell of k = ceil(beta) periods of sin(beta y)
        const int k = std::max(1, static_cast<int>(std::ceil(beta - 1e-12)));
        const double L = kTwoPi * k / beta;
        const int n = static_cast<int>(numeric.integer("n", 128, 16, 1 << 16));
        d.update({{"beta", beta}, {"L_y", L}, {"periods", k}, {"n", n}});
        return {ShearProfile::sine(PeriodicGrid1D(n, L), k, 1.0, 0.0), d};
    }
    if (kind == "custom-samples") {
        const double L = p.number("L_y", std::nullopt, 1e-3, 1e6);
        const std::vector<double> s = p.numbers("samples", 16);
        const std::optional<double> us = p.optional_number("inflection_value", -kBig, kBig);
        p.finish();
        if (numeric.has("n")) {
            const long n = numeric.integer("n", std::nullopt, 16, 1 << 16);
            if (n != static_cast<long>(s.size())) {
                throw ConfigError("config: 'numeric.n' differs from the length of 'profile.samples'");
            }
        }
        const int n = static_cast<int>(s.size());
        d.update({{"L_y", L}, {"n", n}});
        if (us) d["inflection_value"] = *us;
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(s.data(), n);
        return {ShearProfile::from_samples(PeriodicGrid1D(n, L), u, us), d};
    }
    throw ConfigError("config: 'profile.kind' must be one of sin, sin-beta, custom-samples (got '" + kind + "')");
}

double inflection_value(const ShearProfile& profile) {
    if (profile.inflection_value()) return *profile.inflection_value();
    return find_inflection_value(profile).value;
}

struct FlowSpec {
    VectorField3D flow;
    json description;
    double amp_y = 0.0, amp_z = 0.0;
};

FlowSpec read_flow(Section& root, bool shear_only) {
    Section f = root.sub("flow");
    const std::string kind = f.string("kind");
    if (kind == "shear") {
        const double ay = f.number("amp_y", 1.0, -1e3, 1e3);
        const double az = f.number("amp_z", 0.0, -1e3, 1e3);
        f.finish();
        return {VectorField3D::sine_shear(ay, az), json{{"kind", kind}, {"amp_y", ay}, {"amp_z", az}}, ay, az};
    }
    if (shear_only) throw ConfigError("config: 'flow.kind' must be shear for this command");
    if (kind == "abc") {
        const double A = f.number("A", 1.0, -1e3, 1e3);
        const double B = f.number("B", 1.0, -1e3, 1e3);
        const double C = f.number("C", 1.0, -1e3, 1e3);
        f.finish();
        return {VectorField3D::abc(A, B, C), json{{"kind", kind}, {"A", A}, {"B", B}, {"C", C}}};
    }
    if (kind == "constant") {
        const std::vector<double> u = f.numbers("u", 3);
        f.finish();
        if (u.size() != 3) throw ConfigError("config: 'flow.u' must have 3 components");
        return {VectorField3D::constant({u[0], u[1], u[2]}), json{{"kind", kind}, {"u", u}}};
    }
    throw ConfigError("config: 'flow.kind' must be one of shear, abc, constant (got '" + kind + "')");
}

json complex_list(const std::vector<cplx>& v) {
    json a = json::array();
    for (const cplx& z : v) a.push_back({z.real(), z.imag()});
    return a;
}

// ----------------------------------------------------------- commands

struct Context {
    fs::path dir;
    std::vector<std::string> files;

    void csv(const std::string& name, const CsvTable& t) {
        write_csv(dir / name, t);
        files.push_back(name);
    }
};

json run_sturm(Section& root, Section& num, Context& ctx) {
    ProfileSpec ps = read_profile(root, num);
    num.finish();
    const double Us = inflection_value(ps.profile);
    const SLResult sl = lowest_eigenpair(build_K(ps.profile, Us), ps.profile.grid());
    ctx.csv("phi_s.csv", field_csv(ps.profile.grid(), {"phi_s"}, {sl.phi_s}));
    return json{{"profile", ps.description},
                {"inflection_value", Us},
                {"lambda_min", sl.lambda_min},
                {"alpha_max", sl.alpha_max},
                {"gap", sl.gap},
                {"residual", sl.residual},
                {"y1", ps.profile.grid().node(sl.min_index)},
                {"phi_s", "phi_s.csv"}};
}

json run_rayleigh_sweep(Section& root, Section& num, Context& ctx) {
    ProfileSpec ps = read_profile(root, num);
    RayleighOptions ro;
    ro.rtol = num.number("tol", 1e-10, 1e-14, 1e-4);
    std::vector<double> grid;
    std::optional<cplx> guess;
    if (num.has("alpha_grid")) {
        grid = num.numbers("alpha_grid", 1);
    } else {
        grid = {num.number("alpha", std::nullopt, 1e-6, 1e3)};
        const std::vector<double> g = num.numbers("c_guess", 2);
        if (g.size() != 2 || !(g[1] > 0.0)) {
            throw ConfigError("config: 'numeric.c_guess' must be [re, im] with im > 0");
        }
        guess = cplx(g[0], g[1]);
    }
    num.finish();
    const RayleighProblem rp(ps.profile, inflection_value(ps.profile), ro);

    BranchResult br;
    if (guess) {
        br.modes.push_back(rp.find_unstable_mode(grid.front(), *guess));
    } else {
        br = rp.continue_branch(grid);
    }
    CsvTable t{{"alpha", "re_c", "im_c", "growth_rate", "residual"}, {}};
    for (const auto& m : br.modes) {
        t.rows.push_back({m.alpha, m.c.real(), m.c.imag(), m.growth_rate,
                          std::max(m.discriminant_residual, m.rayleigh_residual)});
    }
    ctx.csv("rayleigh_sweep.csv", t);
    json out{{"profile", ps.description},
             {"inflection_value", rp.U_s()},
             {"alpha_max", rp.alpha_max()},
             {"tol", ro.rtol},
             {"alpha_grid", grid},
             {"modes", static_cast<int>(br.modes.size())},
             {"csv", "rayleigh_sweep.csv"}};
    if (br.diagnostic) throw NumericalError("rayleigh-sweep: " + *br.diagnostic);
    return out;
}

json spectrum_json(const ModalOperator& op, Section& num) {
    const std::optional<double> lcs = num.optional_number("lambda_cs", -kBig, kBig);
    const std::optional<double> lu = num.optional_number("lambda_u", -kBig, kBig);
    num.finish();
    const Spectrum sp = unstable_spectrum(op, 0.0);
    json eig = complex_list(sp.eigenvalues);
    json out{{"alpha", op.alpha},
             {"n_modes", op.n_modes},
             {"eigenvalues", eig},
             {"unstable_count", sp.count_unstable},
             {"phase_speeds", complex_list(phase_speeds(op))}};
    if (sp.count_unstable == 0 && !(lcs && lu)) {
        out["dichotomy"] = nullptr;
        return out;
    }
    auto [dcs, du] = sp.count_unstable > 0 ? default_thresholds(sp) : std::pair<double, double>{0.0, 0.0};
    const DichotomySplit ds = dichotomy_split(op, lcs.value_or(dcs), lu.value_or(du));
    out["dichotomy"] = {{"lambda_u", ds.lambda_u}, {"lambda_cs", ds.lambda_cs}, {"M", ds.M},
                        {"rank_u", ds.rank_u()}};
    return out;
}

json run_spectrum2d(Section& root, Section& num, Context&) {
    ProfileSpec ps = read_profile(root, num);
    const double alpha = num.number("alpha", std::nullopt, 1e-6, 1e3);
    const int nm = static_cast<int>(num.integer("n_modes", 32, 16, 512));
    if (2 * nm + 1 > 4 * ps.profile.grid().n()) {
        throw ConfigError("config: 'numeric.n_modes' too large for the profile grid");
    }
    const ModalOperator op = assemble_planar(ps.profile, alpha, nm);
    json out = spectrum_json(op, num);
    out["profile"] = ps.description;
    return out;
}

json run_spectrum3d(Section& root, Section& num, Context&) {
    FlowSpec fs = read_flow(root, true);
    const double alpha = num.number("alpha", std::nullopt, 1e-6, 1e3);
    const int nm = static_cast<int>(num.integer("n_modes", 16, 2, 64));
    const int nz = static_cast<int>(num.integer("n_modes_z", 4, 1, 16));
    const int gy = static_cast<int>(num.integer("n", 64, 8, 1024));
    const int gz = static_cast<int>(num.integer("n_z", 16, 4, 256));
    const ModalOperator op = assemble_shear3d(ShearField2D::sine(gy, gz, fs.amp_y, fs.amp_z), alpha, nm, nz);
    json out = spectrum_json(op, num);
    out["flow"] = fs.description;
    out["n_modes_z"] = nz;
    out["grid"] = {{"n_y", gy}, {"n_z", gz}};
    return out;
}

CsvTable histogram(const std::vector<double>& v, int bins) {
    CsvTable t{{"bin_lo", "bin_hi", "count"}, {}};
    if (v.empty()) return t;
    const double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (hi <= lo) hi = lo + 1e-12;
    std::vector<int> c(bins, 0);
    for (double x : v) ++c[std::min(bins - 1, static_cast<int>((x - lo) / (hi - lo) * bins))];
    for (int b = 0; b < bins; ++b) {
        t.rows.push_back({lo + (hi - lo) * b / bins, lo + (hi - lo) * (b + 1) / bins, static_cast<double>(c[b])});
    }
    return t;
}

CsvTable per_sample(const std::vector<double>& v) {
    CsvTable t{{"sample", "value"}, {}};
    for (std::size_t i = 0; i < v.size(); ++i) t.rows.push_back({static_cast<double>(i), v[i]});
    return t;
}

json run_lambda_m(Section& root, Section& num, Context& ctx) {
    FlowSpec fs = read_flow(root, false);
    const int m = static_cast<int>(num.integer("m", 1, 0, 4));
    const double T = num.number("T", 200.0, 10.0, 1e5);
    const int n = static_cast<int>(num.integer("n_samples", 200, 100, 1000000));
    const auto seed = static_cast<std::uint64_t>(num.integer("seed", 1, 0, std::numeric_limits<long>::max()));
    const double tol = num.number("tol", 1e-10, 1e-13, 1e-4);
    num.finish();
    const LambdaEstimate est = estimate_lambda_m(fs.flow, m, T, n, seed, Exec::parallel, tol);
    ctx.csv("lambda_m_samples.csv", per_sample(est.per_sample));
    ctx.csv("lambda_m_histogram.csv", histogram(est.per_sample, 20));
    json out{{"flow", fs.description}, {"m", m}, {"T", T}, {"n_samples", n}, {"seed", seed},
             {"tol", tol}, {"value", est.value}, {"per_sample_histogram", "lambda_m_histogram.csv"},
             {"per_sample", "lambda_m_samples.csv"}};
    out["bias_bound"] = est.bias_bound ? json(*est.bias_bound) : json(nullptr);
    if (est.bound) out["cubic_bound"] = {{"c3", est.bound->c3}, {"c4", est.bound->c4}, {"fit_T", est.bound->fit_T}};
    return out;
}

json run_mu0(Section& root, Section& num, Context& ctx) {
    FlowSpec fs = read_flow(root, false);
    const double T = num.number("T", 100.0, 1.0, 1e5);
    const int n = static_cast<int>(num.integer("n_samples", 100, 100, 1000000));
    const auto seed = static_cast<std::uint64_t>(num.integer("seed", 1, 0, std::numeric_limits<long>::max()));
    const double tol = num.number("tol", 1e-10, 1e-13, 1e-4);
    num.finish();
    const Mu0Estimate est = estimate_mu0(fs.flow, T, n, seed, Exec::parallel, tol);
    ctx.csv("mu0_samples.csv", per_sample(est.per_sample));
    return json{{"flow", fs.description}, {"T", T}, {"n_samples", n}, {"seed", seed}, {"tol", tol},
                {"value", est.value}, {"per_sample", "mu0_samples.csv"}};
}

json run_manifold(Section& root, Section& num, Context& ctx) {
    Section s = root.sub("system");
    const std::string kind = s.string("kind");
    LPOptions opt;
    opt.seed = static_cast<std::uint64_t>(num.integer("seed", 1, 0, std::numeric_limits<long>::max()));
    opt.c1_samples = static_cast<int>(num.integer("c1_samples", 100, 0, 100000));
    const std::optional<double> lcs = num.optional_number("lambda_cs", -kBig, kBig);
    const std::optional<double> lu = num.optional_number("lambda_u", -kBig, kBig);
    const int n_samples = static_cast<int>(num.integer("n_samples", kind == "toy" ? 21 : 7, 1, 10000));
    const double horizon = num.number("horizon", 1.0, 1e-6, 5.0);

    LPSystem sys;
    double radius = 0.0;
    json desc{{"kind", kind}};
    if (kind == "toy") {
        s.finish();
        opt.dt = num.number("dt", 0.05, 1e-4, 1.0);
        opt.T_max = num.number("T_max", 30.0, 1.0, 1e4);
        opt.delta1_safety = num.number("delta1_safety", 0.9, 1e-6, 1.0);
        radius = num.number("radius", 0.1, 1e-12, 1e3);
        num.finish();
        sys = toy_system(lcs.value_or(-0.9), lu.value_or(0.9), opt);
    } else if (kind == "galerkin") {
        s.finish();
        ProfileSpec ps = read_profile(root, num);
        const double alpha = num.number("alpha", 0.8, 1e-6, 1e3);
        const int nm = static_cast<int>(num.integer("n_modes", 16, 16, 64));
        opt.dt = num.number("dt", 0.1, 1e-4, 1.0);
        opt.T_max = num.number("T_max", 80.0, 1.0, 1e4);
        opt.delta1_safety = num.number("delta1_safety", 0.8, 1e-6, 1.0);
        radius = num.number("radius", 1e-3, 1e-12, 1e3);
        num.finish();
        sys = galerkin_reduce(ps.profile, alpha, nm, lcs, lu, opt);
        desc["profile"] = ps.description;
        desc["alpha"] = alpha;
        desc["n_modes"] = nm;
    } else {
        throw ConfigError("config: 'system.kind' must be toy or galerkin (got '" + kind + "')");
    }

    const LPConstants lc = lp_constants(sys, opt);
    const UnstableGraph g = unstable_graph(sys, radius, n_samples, opt);
    const InvarianceReport inv = verify_local_invariance(g, sys, horizon, opt);

    CsvTable gt;
    for (int i = 0; i < sys.rank_u(); ++i) gt.columns.push_back("z_u" + std::to_string(i));
    for (Eigen::Index i = 0; i < sys.basis_cs.cols(); ++i) gt.columns.push_back("h" + std::to_string(i));
    for (std::size_t k = 0; k < g.z_u.size(); ++k) {
        std::vector<double> row(g.z_u[k].data(), g.z_u[k].data() + g.z_u[k].size());
        row.insert(row.end(), g.h[k].data(), g.h[k].data() + g.h[k].size());
        gt.rows.push_back(std::move(row));
    }
    ctx.csv("manifold_graph.csv", gt);

    // representative decaying trajectory: the fixed point at the largest sample
    std::size_t far = 0;
    for (std::size_t k = 0; k < g.z_u.size(); ++k) {
        if (g.z_u[k].norm() > g.z_u[far].norm()) far = k;
    }
    const FixedPoint fp = solve_fixed_point(sys.embed_u(g.z_u[far]), sys, 1e-13, 200, opt);
    CsvTable tt{{"t", "norm_z", "bound"}, {}};
    for (std::size_t k = 0; k < fp.path.t.size(); ++k) {
        const double t = fp.path.t[k];
        tt.rows.push_back({t, fp.path.z.col(k).norm(), fp.bound * std::exp(lc.lambda * t)});
    }
    ctx.csv("manifold_trajectory.csv", tt);

    return json{{"system", sys.descriptor},
                {"system_config", desc},
                {"dim", sys.dim},
                {"rank_u", sys.rank_u()},
                {"lambda_u", sys.lambda_u},
                {"lambda_cs", sys.lambda_cs},
                {"lambda", lc.lambda},
                {"delta1", lc.delta1},
                {"admissible_radius", lc.radius},
                {"radius", radius},
                {"C0", sys.C0},
                {"C1", sys.C1},
                {"M", sys.M},
                {"dt", opt.dt},
                {"T_max", opt.T_max},
                {"contraction_factor", g.max_contraction},
                {"tangency_norm", g.tangency_norm},
                {"fixed_point_bound_holds", fp.bound_holds},
                {"invariance", {{"horizon", horizon}, {"max_distance", inv.max_distance},
                                {"checks", inv.n_checks}, {"backward_rate", inv.backward_rate}}},
                {"graph", "manifold_graph.csv"},
                {"trajectory", "manifold_trajectory.csv"}};
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

json parse_config(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace

RunOutcome execute(const json& config, const fs::path& out_dir) {
    Section root(config, "");
    const std::string command = root.string("command");
    root.string("output", std::string());  // consumed here, resolved by the caller
    json empty = json::object();
    std::optional<Section> num_holder;
    if (root.has("numeric")) {
        num_holder.emplace(root.sub("numeric"));
    } else {
        num_holder.emplace(empty, "numeric");
    }
    Section& num = *num_holder;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    Context ctx{out_dir, {}};

    json payload;
    if (command == "sturm") payload = run_sturm(root, num, ctx);
    else if (command == "rayleigh-sweep") payload = run_rayleigh_sweep(root, num, ctx);
    else if (command == "spectrum2d") payload = run_spectrum2d(root, num, ctx);
    else if (command == "spectrum3d") payload = run_spectrum3d(root, num, ctx);
    else if (command == "lambda-m") payload = run_lambda_m(root, num, ctx);
    else if (command == "mu0") payload = run_mu0(root, num, ctx);
    else if (command == "manifold") payload = run_manifold(root, num, ctx);
    else {
        throw ConfigError("config: 'command' must be one of sturm, rayleigh-sweep, spectrum2d, spectrum3d, "
                          "lambda-m, mu0, manifold (got '" + command + "')");
    }
    root.finish();
    payload["command"] = command;

    RunOutcome out;
    std::string stem = command;
    std::replace(stem.begin(), stem.end(), '-', '_');
    out.result_file = stem + ".json";
    write_json(out_dir / out.result_file, payload);
    out.payload = std::move(payload);
    out.files.push_back(out.result_file);
    out.files.insert(out.files.end(), ctx.files.begin(), ctx.files.end());
    return out;
}

int run_config_file(const std::string& config_path, const std::optional<std::string>& output,
                    std::optional<int> threads, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    std::optional<fs::path> dir;
    std::string hash;
    std::string command;
    auto finish = [&](int code, const std::vector<std::string>& files, const std::string& kind,
                      const std::string& message) {
        if (!dir) return code;
        try {
            if (code != 0) {
                fs::create_directories(*dir);
                write_json(*dir / "error.json", json{{"error", kind}, {"message", message}, {"exit_code", code}});
            }
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::vector<std::string> all = files;
            if (code != 0) all.push_back("error.json");
            write_json(*dir / "manifest.json", json{{"command", command},
                                                    {"config", config_path},
                                                    {"config_hash", "fnv1a64:" + hash},
                                                    {"version", IDYLL_VERSION},
                                                    {"threads", omp_get_max_threads()},
                                                    {"wall_time_s", wall},
                                                    {"exit_code", code},
                                                    {"files", all}});
        } catch (const std::exception& e) {
            log << "idyll: could not write the manifest: " << e.what() << "\n";
        }
        return code;
    };

    try {
        if (threads) {
            if (*threads < 1) throw ConfigError("--threads must be >= 1");
            omp_set_num_threads(*threads);
        }
        const std::string text = read_file(config_path);
        hash = fnv1a_hex(text);
        const json config = parse_config(text);
        if (output) {
            dir = fs::path(*output);
        } else if (config.is_object() && config.contains("output") && config["output"].is_string()) {
            dir = fs::path(config["output"].get<std::string>());
        } else {
            throw ConfigError("no output directory: give --output or the config key 'output'");
        }
        if (config.is_object() && config.contains("command") && config["command"].is_string()) {
            command = config["command"].get<std::string>();
        }
        const RunOutcome r = execute(config, *dir);
        log << "idyll: " << command << " -> " << (*dir / r.result_file).string() << "\n";
        return finish(0, r.files, "", "");
    } catch (const ConfigError& e) {
        log << "idyll: configuration error: " << e.what() << "\n";
        return finish(1, {}, "config", e.what());
    } catch (const NumericalError& e) {
        log << "idyll: numerical failure: " << e.what() << "\n";
        return finish(2, {}, "numerical", e.what());
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"idyll: shear-flow stability and unstable-manifold computations"};
    app.set_version_flag("--version", std::string(IDYLL_VERSION));
    std::string config;
    std::optional<std::string> output;
    std::optional<int> threads;
    app.add_option("config", config, "JSON run configuration")->required();
    app.add_option("--output", output, "output directory (overrides the config's \"output\")");
    app.add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return run_config_file(config, output, threads, std::cerr);
}

}  // namespace idyll
