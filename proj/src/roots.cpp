#include "ddopt/roots.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ddopt/errors.hpp"

namespace ddopt {

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol) {
    const double eps = std::numeric_limits<double>::epsilon();
    double fa = f(a);
    double fb = f(b);
    if (std::isnan(fa) || std::isnan(fb)) {
        throw NumericalError("brent_root: NaN at bracket endpoint");
    }
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::copysign(1.0, fa) == std::copysign(1.0, fb)) {
        std::ostringstream msg;
        msg << "brent_root: root not bracketed, f(" << a << ")=" << fa << ", f(" << b
            << ")=" << fb;
        throw NumericalError(msg.str());
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::copysign(1.0, fb) == std::copysign(1.0, fc)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
            const double min2 = std::fabs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1) {
            b += d;
        } else {
            b += std::copysign(tol1, xm);
        }
        fb = f(b);
        if (std::isnan(fb)) throw NumericalError("brent_root: NaN during iteration");
    }
    return b;
}

std::vector<double> scan_roots(const std::function<double(double)>& f, double lo,
                               double hi, int mesh, bool log_spaced, double tol) {
    if (!(hi > lo) || mesh < 2) {
        throw ValidationError("scan_roots: bad interval or mesh");
    }
    if (log_spaced && lo <= 0.0) {
        throw ValidationError("scan_roots: log mesh needs lo > 0");
    }
    std::vector<double> roots;
    double x_prev = lo;
    double f_prev = f(lo);
    const double ratio = log_spaced ? std::pow(hi / lo, 1.0 / mesh) : 0.0;
    const double step = log_spaced ? 0.0 : (hi - lo) / mesh;
    for (int i = 1; i <= mesh; ++i) {
        const double x = log_spaced ? lo * std::pow(ratio, i) : lo + step * i;
        const double fx = f(x);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (!std::isnan(fx) && !std::isnan(f_prev) &&
                   std::copysign(1.0, fx) != std::copysign(1.0, f_prev)) {
            roots.push_back(brent_root(f, x_prev, x, tol));
        }
        x_prev = x;
        f_prev = fx;
    }
    if (f_prev == 0.0) roots.push_back(x_prev);
    return roots;
}

std::pair<double, double> quadratic_roots(double a, double b, double c) {
    if (a == 0.0) throw NumericalError("quadratic_roots: leading coefficient zero");
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) throw NumericalError("quadratic_roots: complex roots");
    const double sq = std::sqrt(disc);
    // q = -(b + sign(b)*sqrt(disc))/2 avoids subtracting nearly equal numbers
    const double q = (b >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
    double r1, r2;
    if (q != 0.0) {
        r1 = q / a;
        r2 = c / q;
    } else {
        r1 = 0.0;
        r2 = -b / a;
    }
    if (r1 < r2) std::swap(r1, r2);
    return {r1, r2};
}

} // namespace ddopt
