#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace ddopt {

// Brent's zero finder on [a, b]. Requires f(a) and f(b) of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-13);

// Scan [lo, hi] on a mesh (geometric when log_spaced), refine every
// sign-change bracket with brent_root, return the roots in ascending order.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo,
                               double hi, int mesh = 256, bool log_spaced = false,
                               double tol = 1e-13);

// Roots of a*x^2 + b*x + c = 0, cancellation-free variant.
// Returns (larger, smaller); throws NumericalError on complex roots or a = 0.
std::pair<double, double> quadratic_roots(double a, double b, double c);

} // namespace ddopt
