#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddopt/drawdown.hpp"
#include "ddopt/models.hpp"

namespace ddopt {

// Variational problem: minimize over admissible draw-down slopes u in
// [0, u_max] and horizons b the Bolza objective -log(value), subject to an
// optional area budget integral_a^b d <= K and an initial datum d(a) that is
// either fixed or free in [0, d_a_max].
struct PMPConfig {
    double a = 0.0;
    double d_a_max = 0.0;
    std::optional<double> d_a;
    std::optional<double> K;
    double u_max = 1.0;
    TransformModel model;
    int costate_mesh = 4096;
};

enum class Regime { slope0, structure, slopeU };

struct CostateSample {
    double t;
    double d;
    double u;
    double p;
    double switching; // p - d2_nu/nu, negative on max-slope arcs
};

struct PMPSolution {
    DrawdownFn dd;
    double b_star = 0.0;
    double r = 0.0; // area multiplier, 0 when the budget is slack or absent
    std::vector<CostateSample> costate;
    std::vector<Regime> regimes;
    double hamiltonian_residual = 0.0;
    bool distribute_immediately = false;
    bool area_saturated = false;
    double d_a = 0.0;   // resolved initial datum
    double value = 0.0; // dividend value started from a (0 when d(a) = 0)
    double j_objective = 0.0;
};

// Extended Hamiltonian evaluated at (t, t - d):
//   H+ = nu + (d1_nu + d2_nu)/nu + (p - d2_nu/nu) u + r d
double hamiltonian(const TransformModel& tm, double t, double d, double u, double p,
                   double r);

// dp/dt = -dH+/dd along d(t), u(t); p itself does not enter.
double costate_rhs(const TransformModel& tm, double t, double d, double u, double p,
                   double r);

// Solutions d > 0 of the structure (singular-arc) equation
// d2_nu(t, t - d) = r, found by mesh scan plus bracketed refinement.
// Empty when no sign change exists (always the case for r = 0).
std::vector<double> structure_solve(const TransformModel& tm, double t, double r);

struct GbmStructureRoot {
    double delta;    // log-scale gap F(x) - F(x - d_opt)
    double d_opt;    // (x + beta/alpha)(1 - e^{-delta})
    double residual; // both-sides defect of the exponential structure equation
};

struct GbmStructureResult {
    std::vector<GbmStructureRoot> roots;
    bool multiple = false;
    // one-root certificate from the monotone-sides argument; requires a convex
    // transform, so it never applies to the (concave) log-affine one
    std::string certificate;
};

GbmStructureResult gbm_structure_solve(const TransformModel& tm, double x, double r);

// Closed-form optimum for the identity transform: the optimal draw-down is
// affine with maximal slope from d(a); b* solves
//   nu(d(b)) + u_max * nu'(d(b))/nu(d(b)) = 0,
// capped by the area-budget horizon b+ when a budget is set. A free initial
// datum is resolved to the better of {0, d_a_max}.
PMPSolution levy_optimal(const PMPConfig& cfg);

// General-transform candidate with the same affine max-slope structure, the
// horizon determined from the terminal transversality condition. Necessary
// conditions only; verify_pmp and the enumeration oracle judge it.
PMPSolution affine_candidate(const PMPConfig& cfg);

// Dispatch: identity transforms use levy_optimal, others affine_candidate.
PMPSolution optimize(const PMPConfig& cfg);

struct PMPVerifyReport {
    double h_terminal = 0.0;          // |H+(b*)| with p(b*) = 0
    double h_max_deviation = 0.0;     // max |H+| along the trajectory (homogeneous)
    double p_terminal = 0.0;          // |p(b*)|
    double switching_violation = 0.0; // worst regime-sign breach along the mesh
    double p0_residual = 0.0;         // free interior d(a) transversality, else NaN
    // structure-arc residuals under both multiplier sign conventions
    double structure_residual_pos = 0.0;
    double structure_residual_neg = 0.0;
    bool homogeneous = false;
    bool degenerate = false;
    double degenerate_margin = 0.0; // H+ at the start when b* = a; >= -tol required
    bool pass = false;
    double tol = 1e-6;
};

// Integrates the costate backward from p(b*) = 0 with classic RK4 and checks
// transversality, Hamiltonian constancy (homogeneous models) and the
// switching-sign consistency of every regime segment.
PMPVerifyReport verify_pmp(const TransformModel& tm, const PMPSolution& sol,
                           const PMPConfig& cfg, double tol = 1e-6);

// Residual of the affine-family barrier identity
//   W'' W / (W')^2 (d(b*)) = -xi/(1 - xi),  xi = 1 - u_max;
// zero at the optimal barrier of a slope-bounded identity-transform problem.
double xiopt_check(const TransformModel& tm, double b_star, double u_max,
                   double a = 0.0, double d_a = 0.0);

} // namespace ddopt
