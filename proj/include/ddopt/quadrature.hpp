#pragma once

#include <functional>

namespace ddopt {

inline constexpr double kQuadTol = 1e-12;
inline constexpr long kQuadMaxPanels = 1'000'000;

// Adaptive Simpson on [a, b] to the given absolute tolerance. Throws
// NumericalError on a non-finite integrand value or an exhausted panel budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = kQuadTol, long max_panels = kQuadMaxPanels);

} // namespace ddopt
