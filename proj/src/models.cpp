#include "ddopt/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ddopt/errors.hpp"
#include "ddopt/roots.hpp"

namespace ddopt {

namespace {

// Ratios (rp^k - rm^k s)/(1 - s) with s = e^{(rm - rp) x}. These give
// W^(k)(x)/W(x) without forming the exponentials separately, so they stay
// finite for every x > 0.
struct ExpRatios {
    double e1, e2, e3;

    ExpRatios(double rp, double rm, double x) {
        const double s = std::exp((rm - rp) * x);
        const double one_minus_s = -std::expm1((rm - rp) * x);
        e1 = (rp - rm * s) / one_minus_s;
        e2 = (rp * rp - rm * rm * s) / one_minus_s;
        e3 = (rp * rp * rp - rm * rm * rm * s) / one_minus_s;
    }
};

double nu_from(const ExpRatios& r) { return r.e1; }
double nu_prime_from(const ExpRatios& r) { return r.e2 - r.e1 * r.e1; }
double nu_second_from(const ExpRatios& r) {
    return r.e3 - 3.0 * r.e1 * r.e2 + 2.0 * r.e1 * r.e1 * r.e1;
}

void require_positive_depth(double x, const char* fn) {
    if (!(x > 0.0)) {
        std::ostringstream msg;
        msg << fn << ": argument must be positive (nu_q(0+) is singular), got " << x;
        throw ValidationError(msg.str());
    }
}

} // namespace

DriftedBmModel::DriftedBmModel(double mu_, double sigma_, double q_)
    : mu(mu_), sigma(sigma_), q(q_) {
    if (!(sigma > 0.0)) throw ValidationError("DriftedBmModel: sigma must be > 0");
    if (!(q > 0.0)) throw ValidationError("DriftedBmModel: q must be > 0");
    delta = std::sqrt(mu * mu + 2.0 * q * sigma * sigma);
    phi_q = (-mu + delta) / (sigma * sigma);
    rho_q = (mu + delta) / (sigma * sigma);
}

double laplace_exponent(const DriftedBmModel& m, double s) {
    return m.mu * s + 0.5 * m.sigma * m.sigma * s * s;
}

double scale_w(const DriftedBmModel& m, double x, int order) {
    if (x < 0.0) throw ValidationError("scale_w: x must be >= 0");
    if (order < 0 || order > 2) throw ValidationError("scale_w: order must be 0, 1 or 2");
    // W^(k)(x) = e^{phi x} (phi^k - (-rho)^k s)/delta, s = e^{-(phi+rho)x}
    const double s = std::exp(-(m.phi_q + m.rho_q) * x);
    const double lead = std::exp(m.phi_q * x) / m.delta;
    switch (order) {
        case 0: return lead * (-std::expm1(-(m.phi_q + m.rho_q) * x));
        case 1: return lead * (m.phi_q + m.rho_q * s);
        default: return lead * (m.phi_q * m.phi_q - m.rho_q * m.rho_q * s);
    }
}

double nu(const DriftedBmModel& m, double x) {
    require_positive_depth(x, "nu");
    return nu_from(ExpRatios(m.phi_q, -m.rho_q, x));
}

double nu_prime(const DriftedBmModel& m, double x) {
    require_positive_depth(x, "nu_prime");
    return nu_prime_from(ExpRatios(m.phi_q, -m.rho_q, x));
}

double nu_second(const DriftedBmModel& m, double x) {
    require_positive_depth(x, "nu_second");
    return nu_second_from(ExpRatios(m.phi_q, -m.rho_q, x));
}

std::pair<double, double> gbm_roots(double alpha, double eps, double q) {
    if (!(alpha > 0.0 && eps > 0.0 && q > 0.0)) {
        throw ValidationError("gbm_roots: alpha, eps, q must be > 0");
    }
    const double a2 = 0.5 * eps * eps * alpha * alpha;
    return quadratic_roots(a2, alpha - a2, -q);
}

TransformModel::TransformModel(const DriftedBmModel& base)
    : base_(base), transform_(IdentityTransform{}) {}

TransformModel::TransformModel(const LogAffineTransform& t, double q)
    : base_(t.alpha - 0.5 * t.eps * t.eps * t.alpha * t.alpha, t.eps * t.alpha, q),
      transform_(t) {
    if (!(t.alpha > 0.0 && t.beta > 0.0 && t.eps > 0.0)) {
        throw ValidationError("LogAffineTransform: alpha, beta, eps must be > 0");
    }
    if (!(t.alpha * t.x0 + t.beta > 0.0)) {
        throw ValidationError("LogAffineTransform: reference point below -beta/alpha");
    }
}

bool TransformModel::is_identity() const {
    return std::holds_alternative<IdentityTransform>(transform_);
}

double TransformModel::domain_floor() const {
    if (is_identity()) return -std::numeric_limits<double>::infinity();
    const auto& t = std::get<LogAffineTransform>(transform_);
    return -t.beta / t.alpha;
}

double TransformModel::f(double x) const {
    if (is_identity()) return x;
    const auto& t = std::get<LogAffineTransform>(transform_);
    const double num = t.alpha * x + t.beta;
    if (!(num > 0.0)) throw ValidationError("TransformModel::f: x below -beta/alpha");
    return std::log(num / (t.alpha * t.x0 + t.beta));
}

double TransformModel::f_prime(double x) const {
    if (is_identity()) return 1.0;
    const auto& t = std::get<LogAffineTransform>(transform_);
    const double num = t.alpha * x + t.beta;
    if (!(num > 0.0)) throw ValidationError("TransformModel::f_prime: x below -beta/alpha");
    return t.alpha / num;
}

double TransformModel::f_second(double x) const {
    if (is_identity()) return 0.0;
    const auto& t = std::get<LogAffineTransform>(transform_);
    const double num = t.alpha * x + t.beta;
    if (!(num > 0.0)) throw ValidationError("TransformModel::f_second: x below -beta/alpha");
    return -t.alpha * t.alpha / (num * num);
}

double TransformModel::f_inv(double z) const {
    if (is_identity()) return z;
    const auto& t = std::get<LogAffineTransform>(transform_);
    return ((t.alpha * t.x0 + t.beta) * std::exp(z) - t.beta) / t.alpha;
}

void TransformModel::check_domain(double x, double y) const {
    if (!(y < x)) {
        std::ostringstream msg;
        msg << "TransformModel: requires y < x, got x=" << x << " y=" << y;
        throw ValidationError(msg.str());
    }
    if (!(y > domain_floor())) {
        throw ValidationError("TransformModel: y at or below the transform domain floor");
    }
}

double TransformModel::nu2(double x, double y) const {
    check_domain(x, y);
    return f_prime(x) * nu(base_, f(x) - f(y));
}

double TransformModel::d1_nu2(double x, double y) const {
    check_domain(x, y);
    const double dz = f(x) - f(y);
    const double fp = f_prime(x);
    return f_second(x) * nu(base_, dz) + fp * fp * nu_prime(base_, dz);
}

double TransformModel::d2_nu2(double x, double y) const {
    check_domain(x, y);
    return -f_prime(x) * f_prime(y) * nu_prime(base_, f(x) - f(y));
}

double TransformModel::d12_nu2(double x, double y) const {
    check_domain(x, y);
    const double dz = f(x) - f(y);
    const double fpx = f_prime(x);
    return -f_prime(y) * (f_second(x) * nu_prime(base_, dz) + fpx * fpx * nu_second(base_, dz));
}

double TransformModel::d22_nu2(double x, double y) const {
    check_domain(x, y);
    const double dz = f(x) - f(y);
    const double fpy = f_prime(y);
    return f_prime(x) * (fpy * fpy * nu_second(base_, dz) - f_second(y) * nu_prime(base_, dz));
}

} // namespace ddopt
