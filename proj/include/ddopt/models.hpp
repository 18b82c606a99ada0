#pragma once

#include <utility>
#include <variant>

namespace ddopt {

// Brownian motion with drift, X_t = mu*t + sigma*B_t, discounted at rate q.
//
// Laplace exponent kappa(s) = mu*s + sigma^2*s^2/2. phi_q and -rho_q are the
// positive and negative roots of kappa(s) = q, and the scale function is
//   W_q(x) = (e^{phi_q x} - e^{-rho_q x}) / delta,  delta = sqrt(mu^2 + 2 q sigma^2).
// nu_q = W_q'/W_q is the downward-excursion hazard rate; it decreases from
// +infinity at 0+ to phi_q at infinity.
struct DriftedBmModel {
    double mu;
    double sigma;
    double q;
    // derived
    double delta;
    double phi_q;
    double rho_q;

    DriftedBmModel(double mu_, double sigma_, double q_);
};

double laplace_exponent(const DriftedBmModel& m, double s);

// W_q and its first two derivatives; order in {0, 1, 2}, x >= 0.
double scale_w(const DriftedBmModel& m, double x, int order);

// nu_q(x) = W_q'(x)/W_q(x) and its derivatives, x > 0.
double nu(const DriftedBmModel& m, double x);
double nu_prime(const DriftedBmModel& m, double x);
double nu_second(const DriftedBmModel& m, double x);

// Roots of (eps^2 alpha^2/2) r^2 + (alpha - eps^2 alpha^2/2) r - q = 0,
// returned as (r_plus, r_minus) with r_plus > 0 > r_minus.
std::pair<double, double> gbm_roots(double alpha, double eps, double q);

struct IdentityTransform {};

// F(x) = ln((alpha*x + beta)/(alpha*x0 + beta)); the transformed process
// F(X_t) is a Brownian motion with drift alpha - eps^2 alpha^2/2 and
// volatility eps*alpha. This is the geometric (logarithmic) diffusion
//   dX = (alpha X + beta)(dt + eps dB).
struct LogAffineTransform {
    double alpha;
    double beta;
    double eps;
    double x0;
};

using Transform = std::variant<IdentityTransform, LogAffineTransform>;

// A strictly monotone transform of a drifted Brownian motion Z. The two-sided
// excursion characteristics factor through the one-dimensional ones of Z:
//   nu_q(x, y) = F'(x) * nu^Z_q(F(x) - F(y)).
class TransformModel {
public:
    // identity transform over the given driving model
    explicit TransformModel(const DriftedBmModel& base);
    // log-affine transform; the driving model is induced by (alpha, eps, q)
    TransformModel(const LogAffineTransform& t, double q);

    const DriftedBmModel& base() const { return base_; }
    const Transform& transform() const { return transform_; }
    bool is_identity() const;

    // state space lower boundary: -beta/alpha for log-affine, -inf for identity
    double domain_floor() const;

    double f(double x) const;
    double f_prime(double x) const;
    double f_second(double x) const;
    double f_inv(double z) const;

    double r_plus() const { return base_.phi_q; }
    double r_minus() const { return -base_.rho_q; }

    // two-variable excursion rate and partials, y < x, both above the floor
    double nu2(double x, double y) const;
    double d1_nu2(double x, double y) const;
    double d2_nu2(double x, double y) const;
    double d12_nu2(double x, double y) const;
    double d22_nu2(double x, double y) const;

private:
    void check_domain(double x, double y) const;

    DriftedBmModel base_;
    Transform transform_;
};

} // namespace ddopt
