#pragma once

#include <string>
#include <vector>

namespace ddopt {

// Piecewise-linear draw-down function d(s) for s >= a.
//
// breakpoints[0] == a and slopes[i] applies on [breakpoints[i],
// breakpoints[i+1]); the last slope extends to +infinity. Admissibility
// requires every slope in [0, u_max] with u_max <= 1, so that both d and the
// trailing stop dhat(s) = s - d(s) are nondecreasing.
struct DrawdownFn {
    double a = 0.0;
    double d_a = 0.0;
    std::vector<double> breakpoints;
    std::vector<double> slopes;
    double u_max = 1.0;
};

// d(x) = (1 - xi) x + d0, the pencil of lines through (-d0, d0).
// xi = 1 is the classic constant draw-down, xi = 0 the classic ruin level -d0.
struct AffineDrawdown {
    double xi;
    double d0;
};

// Lossless conversion to a single-segment piecewise representation anchored at a.
DrawdownFn to_piecewise(const AffineDrawdown& aff, double a = 0.0);

struct ValidationReport {
    bool ok = true;
    std::string violation; // first violated clause, empty when ok
};

ValidationReport validate(const DrawdownFn& dd);

double eval_d(const DrawdownFn& dd, double s);
double eval_dhat(const DrawdownFn& dd, double s);

// slope in force at s (right-continuous)
double slope_at(const DrawdownFn& dd, double s);

// exact integral of d over [a, b]
double area(const DrawdownFn& dd, double b);

// draw-down stopping test: has the process at x, with running maximum
// running_max, fallen strictly below the trailing stop?
bool is_stopped(const DrawdownFn& dd, double running_max, double x);

// minimum of d over [lo, hi]; used to guard singular integrands
double min_d_on(const DrawdownFn& dd, double lo, double hi);

} // namespace ddopt
