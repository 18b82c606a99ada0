#include <doctest.h>

#include <cmath>
#include <random>

#include "ddopt/errors.hpp"
#include "ddopt/models.hpp"
#include "ddopt/quadrature.hpp"
#include "ddopt/roots.hpp"

using namespace ddopt;

namespace {
// mu=0, sigma^2=2, q=1 collapses the scale function to sinh
const DriftedBmModel kSinh(0.0, std::sqrt(2.0), 1.0);
}

TEST_CASE("laplace exponent") {
    CHECK(laplace_exponent(kSinh, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    const DriftedBmModel m(0.7, 1.3, 0.2);
    CHECK(laplace_exponent(m, 0.0) == 0.0);
    CHECK(laplace_exponent(m, m.phi_q) == doctest::Approx(m.q).epsilon(1e-13));
}

TEST_CASE("scale function matches the sinh oracle") {
    CHECK(kSinh.phi_q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kSinh.rho_q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(scale_w(kSinh, 1.0, 0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
    CHECK(scale_w(kSinh, 0.0, 0) == 0.0);
    CHECK(scale_w(kSinh, 1.0, 1) == doctest::Approx(std::cosh(1.0)).epsilon(1e-14));
    CHECK(scale_w(kSinh, 0.0, 2) == doctest::Approx(0.0));
    CHECK_THROWS_AS(scale_w(kSinh, -0.5, 0), ValidationError);
}

TEST_CASE("scale function survives large arguments") {
    const DriftedBmModel m(1.0, 1.0, 0.1);
    const double x = 500.0; // phi*x ~ 47.7, naive e^{rho x} would be e^{1048}
    const double w = scale_w(m, x, 0);
    CHECK(std::isfinite(w));
    CHECK(w == doctest::Approx(std::exp(m.phi_q * x) / m.delta).epsilon(1e-13));
    CHECK(nu(m, x) == doctest::Approx(m.phi_q).epsilon(1e-13));
}

TEST_CASE("nu is coth for the sinh model") {
    const double coth1 = std::cosh(1.0) / std::sinh(1.0);
    CHECK(nu(kSinh, 1.0) == doctest::Approx(coth1).epsilon(1e-14));
    // nu -> phi_q from above at long range
    CHECK(std::fabs(nu(kSinh, 50.0) - kSinh.phi_q) < 1e-10);
    // derivative of coth is -csch^2
    const double csch2 = 1.0 / (std::sinh(1.0) * std::sinh(1.0));
    CHECK(nu_prime(kSinh, 1.0) == doctest::Approx(-csch2).epsilon(1e-13));
    CHECK_THROWS_AS(nu(kSinh, 0.0), ValidationError);
    CHECK_THROWS_AS(nu(kSinh, -1.0), ValidationError);
}

TEST_CASE("nu derivatives agree with central differences") {
    const DriftedBmModel m(0.8, 1.1, 0.3);
    const double h = 1e-5;
    for (double x : {0.3, 1.0, 2.7, 6.0}) {
        const double fd1 = (nu(m, x + h) - nu(m, x - h)) / (2 * h);
        CHECK(nu_prime(m, x) == doctest::Approx(fd1).epsilon(1e-6));
        const double fd2 = (nu_prime(m, x + h) - nu_prime(m, x - h)) / (2 * h);
        CHECK(nu_second(m, x) == doctest::Approx(fd2).epsilon(1e-6));
    }
}

TEST_CASE("nu decreases strictly and stays above phi_q") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> um(-1.5, 1.5), us(0.3, 2.0), uq(0.05, 1.0);
    for (int i = 0; i < 20; ++i) {
        const DriftedBmModel m(um(rng), us(rng), uq(rng));
        // beyond (phi+rho) x ~ 30 the gap nu - phi falls under double resolution
        const double x_cap = std::min(60.0, 30.0 / (m.phi_q + m.rho_q));
        double prev = nu(m, 1e-3);
        for (double x = 1e-2; x < x_cap; x *= 1.6) {
            const double cur = nu(m, x);
            CHECK(cur < prev);
            CHECK(cur > m.phi_q);
            prev = cur;
        }
    }
}

TEST_CASE("kappa(phi_q) = q for 100 random draws") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> um(-3.0, 3.0), us(0.1, 3.0), uq(0.01, 2.0);
    for (int i = 0; i < 100; ++i) {
        const DriftedBmModel m(um(rng), us(rng), uq(rng));
        CHECK(std::fabs(laplace_exponent(m, m.phi_q) - m.q) <= 1e-12 * m.q);
        CHECK(m.phi_q > 0.0);
        CHECK(m.rho_q > 0.0);
    }
}

TEST_CASE("scale ratio equals the integrated hazard") {
    // W(x)/W(b) = exp(-int_x^b nu), the two-sided exit identity
    const DriftedBmModel m(0.5, 1.2, 0.4);
    for (auto [x, b] : {std::pair{0.1, 1.0}, {0.5, 4.0}, {2.0, 10.0}}) {
        const double lhs = scale_w(m, x, 0) / scale_w(m, b, 0);
        const double integral =
            integrate([&](double s) { return nu(m, s); }, x, b, 1e-12);
        CHECK(lhs == doctest::Approx(std::exp(-integral)).epsilon(1e-8));
    }
}

TEST_CASE("smooth fit at the W'' root") {
    const DriftedBmModel m(1.0, 1.0, 0.1);
    const double b_star =
        brent_root([&](double x) { return scale_w(m, x, 2); }, 0.1, 20.0, 1e-14);
    CHECK(std::fabs(nu_prime(m, b_star) + nu(m, b_star) * nu(m, b_star)) < 1e-8);
}

TEST_CASE("gbm quadratic roots") {
    auto [rp, rm] = gbm_roots(1.0, 1.0, 1.0);
    CHECK(rp == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rm == doctest::Approx(-2.0).epsilon(1e-14));

    // q -> 0 degenerates to (0, -1); the stable formula keeps r_plus accurate
    auto [rp0, rm0] = gbm_roots(1.0, 1.0, 1e-12);
    CHECK(rp0 == doctest::Approx(2e-12).epsilon(1e-9));
    CHECK(rm0 == doctest::Approx(-1.0).epsilon(1e-11));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double alpha = u(rng), eps = u(rng), q = u(rng);
        auto [p, n] = gbm_roots(alpha, eps, q);
        CHECK(p > 0.0);
        CHECK(n < 0.0);
        const double a2 = 0.5 * eps * eps * alpha * alpha;
        for (double r : {p, n}) {
            CHECK(std::fabs(a2 * r * r + (alpha - a2) * r - q) < 1e-12 * std::max(1.0, q));
        }
    }
}

TEST_CASE("log-affine transform basics") {
    const LogAffineTransform t{1.0, 1.0, 1.0, 0.0};
    const TransformModel tm(t, 1.0);
    CHECK(tm.f(0.0) == 0.0);
    CHECK(tm.f_inv(tm.f(2.5)) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(tm.r_plus() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tm.r_minus() == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(tm.domain_floor() == doctest::Approx(-1.0));
    CHECK_THROWS_AS(tm.f(-1.0), ValidationError);
}

TEST_CASE("two-variable excursion rate") {
    SUBCASE("identity reduces to one variable exactly") {
        const TransformModel tm(kSinh);
        CHECK(tm.nu2(2.0, 1.0) == nu(kSinh, 1.0));
        CHECK(tm.nu2(2.0, 1.0) ==
              doctest::Approx(std::cosh(1.0) / std::sinh(1.0)).epsilon(1e-14));
        CHECK_THROWS_AS(tm.nu2(1.0, 1.0), ValidationError);
    }
    SUBCASE("log-affine closed form") {
        const TransformModel tm(LogAffineTransform{1.0, 1.0, 1.0, 0.0}, 1.0);
        // nu(x,y) = 1/(x+1) * mu(ln((x+1)/(y+1))), mu(z) = (e^z + 2e^{-2z})/(e^z - e^{-2z})
        auto mu_oracle = [](double z) {
            return (std::exp(z) + 2.0 * std::exp(-2.0 * z)) /
                   (std::exp(z) - std::exp(-2.0 * z));
        };
        for (auto [x, y] : {std::pair{1.0, 0.0}, {2.0, 0.5}, {5.0, 4.0}}) {
            const double expected = mu_oracle(std::log((x + 1.0) / (y + 1.0))) / (x + 1.0);
            CHECK(tm.nu2(x, y) == doctest::Approx(expected).epsilon(1e-13));
        }
        // mu(ln 2) = (2 + 1/2)/(2 - 1/4) = 10/7, so nu(1, 0) = 5/7
        CHECK(tm.nu2(1.0, 0.0) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
        CHECK_THROWS_AS(tm.nu2(0.5, -1.0), ValidationError);
    }
}

TEST_CASE("nu2 partials agree with central differences") {
    const double h = 1e-5;
    const TransformModel models[] = {
        TransformModel(DriftedBmModel(0.6, 1.1, 0.5)),
        TransformModel(LogAffineTransform{0.8, 1.4, 0.9, 0.0}, 0.7)};
    for (const auto& tm : models) {
        for (auto [x, y] : {std::pair{1.0, 0.2}, {2.5, 1.0}, {4.0, 3.2}}) {
            const double d1 = (tm.nu2(x + h, y) - tm.nu2(x - h, y)) / (2 * h);
            const double d2 = (tm.nu2(x, y + h) - tm.nu2(x, y - h)) / (2 * h);
            CHECK(tm.d1_nu2(x, y) == doctest::Approx(d1).epsilon(1e-6));
            CHECK(tm.d2_nu2(x, y) == doctest::Approx(d2).epsilon(1e-6));
            const double d12 =
                (tm.d2_nu2(x + h, y) - tm.d2_nu2(x - h, y)) / (2 * h);
            const double d22 =
                (tm.d2_nu2(x, y + h) - tm.d2_nu2(x, y - h)) / (2 * h);
            CHECK(tm.d12_nu2(x, y) == doctest::Approx(d12).epsilon(1e-6));
            CHECK(tm.d22_nu2(x, y) == doctest::Approx(d22).epsilon(1e-6));
        }
    }
}

TEST_CASE("model constructor rejects bad parameters") {
    CHECK_THROWS_AS(DriftedBmModel(0.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(DriftedBmModel(0.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(TransformModel(LogAffineTransform{-1.0, 1.0, 1.0, 0.0}, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(TransformModel(LogAffineTransform{1.0, 1.0, 1.0, -2.0}, 1.0),
                    ValidationError);
}
