#include "ddopt/quadrature.hpp"

#include <cmath>

#include "ddopt/errors.hpp"

namespace ddopt {

namespace {

double simpson(double h, double fa, double fm, double fb) {
    return (fa + 4.0 * fm + fb) * (h / 6.0);
}

struct AdaptiveState {
    const std::function<double(double)>& f;
    long panels_left;

    double eval(double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw NumericalError("integrate: non-finite integrand value");
        }
        return v;
    }

    double refine(double a, double m, double b, double fa, double fm, double fb,
                  double whole, double tol, int depth) {
        if (--panels_left < 0) {
            throw NumericalError("integrate: subdivision budget exhausted");
        }
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double h = b - a;
        const double left = simpson(0.5 * h, fa, flm, fm);
        const double right = simpson(0.5 * h, fm, frm, fb);
        const double err = (left + right - whole) / 15.0;
        // depth floor keeps roundoff from forcing endless refinement
        if (std::fabs(err) <= tol || depth >= 52) {
            return left + right + err;
        }
        return refine(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               refine(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, long max_panels) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    AdaptiveState st{f, max_panels};
    const double m = 0.5 * (a + b);
    const double fa = st.eval(a);
    const double fm = st.eval(m);
    const double fb = st.eval(b);
    const double whole = simpson(b - a, fa, fm, fb);
    return sign * st.refine(a, m, b, fa, fm, fb, whole, abs_tol, 0);
}

} // namespace ddopt
