#include "ddopt/drawdown.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddopt/errors.hpp"

namespace ddopt {

namespace {

void require_in_range(const DrawdownFn& dd, double s, const char* fn) {
    if (s < dd.a) {
        std::ostringstream msg;
        msg << fn << ": s=" << s << " below start abscissa a=" << dd.a;
        throw ValidationError(msg.str());
    }
}

// index of the segment containing s
std::size_t segment_index(const DrawdownFn& dd, double s) {
    const auto& bp = dd.breakpoints;
    auto it = std::upper_bound(bp.begin(), bp.end(), s);
    if (it == bp.begin()) return 0;
    return static_cast<std::size_t>(it - bp.begin()) - 1;
}

} // namespace

DrawdownFn to_piecewise(const AffineDrawdown& aff, double a) {
    DrawdownFn dd;
    dd.a = a;
    dd.d_a = (1.0 - aff.xi) * a + aff.d0;
    dd.breakpoints = {a};
    dd.slopes = {1.0 - aff.xi};
    dd.u_max = 1.0;
    return dd;
}

ValidationReport validate(const DrawdownFn& dd) {
    if (dd.breakpoints.empty() || dd.slopes.size() != dd.breakpoints.size()) {
        return {false, "breakpoints/slopes size mismatch"};
    }
    if (dd.breakpoints.front() != dd.a) {
        return {false, "first breakpoint differs from start abscissa"};
    }
    for (std::size_t i = 1; i < dd.breakpoints.size(); ++i) {
        if (!(dd.breakpoints[i] > dd.breakpoints[i - 1])) {
            return {false, "breakpoints not strictly increasing"};
        }
    }
    if (!(dd.u_max > 0.0) || dd.u_max > 1.0) {
        return {false, "u_max not in (0, 1]"};
    }
    if (dd.d_a < 0.0) {
        return {false, "initial value d(a) negative"};
    }
    for (double u : dd.slopes) {
        if (u < 0.0) return {false, "d not nondecreasing"};
        if (u > 1.0) return {false, "dhat not nondecreasing"};
        if (u > dd.u_max) return {false, "slope exceeds u_max"};
    }
    return {};
}

double eval_d(const DrawdownFn& dd, double s) {
    require_in_range(dd, s, "eval_d");
    double v = dd.d_a;
    for (std::size_t i = 0; i < dd.breakpoints.size(); ++i) {
        const double seg_lo = dd.breakpoints[i];
        const double seg_hi =
            (i + 1 < dd.breakpoints.size()) ? std::min(dd.breakpoints[i + 1], s) : s;
        if (seg_hi <= seg_lo) break;
        v += dd.slopes[i] * (seg_hi - seg_lo);
        if (seg_hi == s) break;
    }
    return v;
}

double eval_dhat(const DrawdownFn& dd, double s) { return s - eval_d(dd, s); }

double slope_at(const DrawdownFn& dd, double s) {
    require_in_range(dd, s, "slope_at");
    return dd.slopes[segment_index(dd, s)];
}

double area(const DrawdownFn& dd, double b) {
    require_in_range(dd, b, "area");
    double total = 0.0;
    double d_lo = dd.d_a;
    for (std::size_t i = 0; i < dd.breakpoints.size(); ++i) {
        const double seg_lo = dd.breakpoints[i];
        const double seg_hi =
            (i + 1 < dd.breakpoints.size()) ? std::min(dd.breakpoints[i + 1], b) : b;
        if (seg_hi <= seg_lo) break;
        const double w = seg_hi - seg_lo;
        total += d_lo * w + 0.5 * dd.slopes[i] * w * w;
        d_lo += dd.slopes[i] * w;
        if (seg_hi == b) break;
    }
    return total;
}

bool is_stopped(const DrawdownFn& dd, double running_max, double x) {
    return x < eval_dhat(dd, running_max);
}

double min_d_on(const DrawdownFn& dd, double lo, double hi) {
    require_in_range(dd, lo, "min_d_on");
    if (hi < lo) throw ValidationError("min_d_on: hi < lo");
    // d is piecewise linear, so the minimum sits at a panel endpoint
    double m = std::min(eval_d(dd, lo), eval_d(dd, hi));
    for (double s : dd.breakpoints) {
        if (s > lo && s < hi) m = std::min(m, eval_d(dd, s));
    }
    return m;
}

} // namespace ddopt
