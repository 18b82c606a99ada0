#pragma once

#include "ddopt/drawdown.hpp"
#include "ddopt/models.hpp"
#include "ddopt/quadrature.hpp"

namespace ddopt {

// Discounted dividends of the barrier strategy at b, started from x, paid
// until the generalized draw-down time:
//   value = survival_factor * barrier_payout
// with survival_factor = E_x[e^{-q tau_b}; tau_b before draw-down]
//                      = exp(-integral_x^b nu_q(z, dhat(z)) dz)
// and barrier_payout = 1 / nu_q(b, dhat(b)).
struct ValueBreakdown {
    double survival_factor = 1.0;
    double barrier_payout = 0.0;
    double value = 0.0;
    double integral_of_nu = 0.0;
};

double survival_factor(const TransformModel& tm, const DrawdownFn& dd, double x,
                       double b, double tol = kQuadTol);

double barrier_payout(const TransformModel& tm, const DrawdownFn& dd, double b);

ValueBreakdown value(const TransformModel& tm, const DrawdownFn& dd, double x,
                     double b, double tol = kQuadTol);

// Bolza running-cost objective over [a, b]:
//   J = integral_a^b [ nu + (d1_nu + d2_nu (1 - u))/nu ](y, dhat(y)) dy
//       + log nu(a, dhat(a))
// which equals -log(value at x = a).
double objective_j(const TransformModel& tm, const DrawdownFn& dd, double a,
                   double b, double tol = kQuadTol);

} // namespace ddopt
