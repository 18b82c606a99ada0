#include "ddopt/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "ddopt/errors.hpp"

namespace ddopt {

namespace {

void check_not_singular(const TransformModel& tm, const DrawdownFn& dd, double lo,
                        double hi) {
    if (!(min_d_on(dd, lo, hi) > 0.0)) {
        std::ostringstream msg;
        msg << "singular integrand: d touches 0 on [" << lo << ", " << hi
            << "]; nu_q(0+) is infinite for diffusive models";
        throw NumericalError(msg.str());
    }
    // the trailing stop must stay inside the transform domain
    const double floor = tm.domain_floor();
    if (std::isfinite(floor)) {
        const double worst = std::min(eval_dhat(dd, lo), eval_dhat(dd, hi));
        if (!(worst > floor)) {
            throw ValidationError("trailing stop at or below the transform domain floor");
        }
    }
}

// integrate f over [lo, hi], splitting panels at draw-down breakpoints so the
// integrand is smooth on each panel
double integrate_split(const DrawdownFn& dd, double lo, double hi,
                       const std::function<double(double)>& f, double tol) {
    std::vector<double> cuts{lo};
    for (double s : dd.breakpoints) {
        if (s > lo && s < hi) cuts.push_back(s);
    }
    cuts.push_back(hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += integrate(f, cuts[i], cuts[i + 1], tol);
    }
    return total;
}

} // namespace

double survival_factor(const TransformModel& tm, const DrawdownFn& dd, double x,
                       double b, double tol) {
    if (b < x) throw ValidationError("survival_factor: b < x");
    if (x < dd.a) throw ValidationError("survival_factor: x below draw-down start");
    if (x == b) return 1.0;
    check_not_singular(tm, dd, x, b);
    const double integral = integrate_split(
        dd, x, b, [&](double z) { return tm.nu2(z, eval_dhat(dd, z)); }, tol);
    return std::exp(-integral);
}

double barrier_payout(const TransformModel& tm, const DrawdownFn& dd, double b) {
    const double db = eval_d(dd, b);
    if (!(db > 0.0)) {
        throw NumericalError("barrier_payout: d(b) = 0 gives a zero-payout singularity");
    }
    return 1.0 / tm.nu2(b, eval_dhat(dd, b));
}

ValueBreakdown value(const TransformModel& tm, const DrawdownFn& dd, double x,
                     double b, double tol) {
    if (x > b) {
        // above the barrier the strategy pays the excess immediately
        ValueBreakdown at_b = value(tm, dd, b, b, tol);
        at_b.value += x - b;
        return at_b;
    }
    ValueBreakdown out;
    if (x < b) {
        check_not_singular(tm, dd, x, b);
        out.integral_of_nu = integrate_split(
            dd, x, b, [&](double z) { return tm.nu2(z, eval_dhat(dd, z)); }, tol);
    }
    out.survival_factor = std::exp(-out.integral_of_nu);
    out.barrier_payout = barrier_payout(tm, dd, b);
    out.value = out.survival_factor * out.barrier_payout;
    return out;
}

double objective_j(const TransformModel& tm, const DrawdownFn& dd, double a,
                   double b, double tol) {
    if (b < a) throw ValidationError("objective_j: b < a");
    if (a < dd.a) throw ValidationError("objective_j: a below draw-down start");
    const double d_at_a = eval_d(dd, a);
    if (!(d_at_a > 0.0)) {
        throw NumericalError("objective_j: d(a) = 0 makes the terminal term singular");
    }
    double integral = 0.0;
    if (b > a) {
        check_not_singular(tm, dd, a, b);
        integral = integrate_split(
            dd, a, b,
            [&](double y) {
                const double h = eval_dhat(dd, y);
                const double u = slope_at(dd, y);
                const double n = tm.nu2(y, h);
                return n + (tm.d1_nu2(y, h) + tm.d2_nu2(y, h) * (1.0 - u)) / n;
            },
            tol);
    }
    return integral + std::log(tm.nu2(a, a - d_at_a));
}

} // namespace ddopt
