// rayleigh.hpp
// Unstable Rayleigh modes by shooting on the periodic cell.
//
// With c the (absolute) phase speed, the Rayleigh equation
//     U'' phi - (U - c)(phi'' - alpha^2 phi) = 0
// is written as phi'' = (a + U''/(U - c)) phi, a = alpha^2. The fundamental
// pair phi_1, phi_2 starts at y_1 (minimum node of the Sturm-Liouville ground
// state) with unit Cauchy data, and the periodicity discriminant
//     I(c, a) = phi_1(y_2) + phi_2'(y_2) - 2,   y_2 = y_1 + L
// vanishes exactly when a periodic solution exists.
#pragma once

#include "idyll/fields.hpp"
#include "idyll/sturm_liouville.hpp"

#include <optional>
#include <string>
#include <vector>

namespace idyll {

struct FundamentalPair {
    cplx phi1, dphi1, phi2, dphi2;  // values at y_2
    std::optional<cplx> dI_dc;      // filled when sensitivities were requested
    double max_wronskian_drift = 0.0;
    long steps = 0;
    // Optional samples at y_1 + j L / n_samples, j = 0 .. n_samples - 1
    Eigen::VectorXcd phi1_samples, phi2_samples, dphi1_samples, dphi2_samples;

    cplx discriminant() const { return phi1 + dphi2 - 2.0; }
};

struct ComplexMode {
    double alpha = 0.0;
    cplx c;
    Eigen::VectorXcd phi;               // eigenfunction at the profile nodes
    double discriminant_residual = 0.0; // |I|
    double rayleigh_residual = 0.0;     // |U''phi - (U-c)(phi''-alpha^2 phi)|_inf / |phi|_inf
    double growth_rate = 0.0;           // alpha Im c
    int iterations = 0;

    bool in_howard_semicircle(double u_min, double u_max, double slack = 1e-8) const;
};

struct BranchResult {
    std::vector<ComplexMode> modes;
    std::optional<std::string> diagnostic;  // set when the branch was lost
};

struct RayleighOptions {
    double rtol = 1e-10;
    double atol = 1e-13;
    int max_newton = 100;
    double discriminant_tol = 1e-8;
    int residual_points = 1024;
};

/// Shooting problem for a fixed profile. Construction solves the
/// Sturm-Liouville problem to obtain alpha_max and y_1; profiles without an
/// inflection instability (U'' == 0) get alpha_max = 0 and y_1 = 0.
class RayleighProblem {
public:
    RayleighProblem(ShearProfile profile, double U_s, RayleighOptions opt = {});

    const ShearProfile& profile() const { return profile_; }
    double U_s() const { return U_s_; }
    double alpha_max() const { return alpha_max_; }
    double y1() const { return profile_.grid().node(y1_index_); }
    int y1_index() const { return y1_index_; }
    const std::optional<SLResult>& neutral() const { return neutral_; }
    const RayleighOptions& options() const { return opt_; }

    /// Integrate phi'' = (a + U''/(U - c)) phi over one period. With
    /// `sensitivity` the c-derivative of the pair is integrated alongside.
    FundamentalPair integrate_fundamental(double a, cplx c, bool sensitivity = false,
                                          int n_samples = 0) const;
    FundamentalPair integrate_fundamental(double a, cplx c, double rtol) const;

    cplx discriminant(double a, cplx c) const;

    /// Discriminant exactly at c = U_s, where U''/(U - U_s) = -K is regular:
    /// integrates phi'' = (a - K(y)) phi with K filled by its limit at the
    /// zeros of U - U_s.
    double neutral_discriminant(double a) const;

    /// Damped Newton on I(., alpha^2) from c_guess, never leaving Im c > 0.
    ComplexMode find_unstable_mode(double alpha, cplx c_guess) const;

    /// Follow the unstable branch over a strictly decreasing alpha grid that
    /// starts within 0.05 of alpha_max.
    BranchResult continue_branch(const std::vector<double>& alpha_grid) const;

private:
    ComplexMode assemble_mode(double alpha, cplx c, int iterations) const;

    ShearProfile profile_;
    double U_s_;
    RayleighOptions opt_;
    double alpha_max_ = 0.0;
    int y1_index_ = 0;
    std::optional<SLResult> neutral_;
};

}  // namespace idyll
