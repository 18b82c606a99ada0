#include <doctest.h>

#include <cmath>

#include "ddopt/errors.hpp"
#include "ddopt/quadrature.hpp"
#include "ddopt/roots.hpp"

using namespace ddopt;

TEST_CASE("brent finds cos root") {
    const double r = brent_root([](double x) { return std::cos(x); }, 1.0, 2.0);
    CHECK(r == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
}

TEST_CASE("brent requires a bracket") {
    CHECK_THROWS_AS(brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                    NumericalError);
}

TEST_CASE("scan_roots picks up every sign change") {
    const auto roots = scan_roots([](double x) { return std::sin(x); }, 0.5, 10.0, 512);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
    CHECK(roots[2] == doctest::Approx(3 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("quadratic_roots is stable for widely separated roots") {
    // x^2 - 1e8 x + 1 = 0: roots ~1e8 and ~1e-8
    auto [hi, lo] = quadratic_roots(1.0, -1e8, 1.0);
    CHECK(hi == doctest::Approx(1e8).epsilon(1e-14));
    CHECK(lo == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK_THROWS_AS(quadratic_roots(1.0, 0.0, 1.0), NumericalError);
}

TEST_CASE("adaptive simpson hits tight tolerances") {
    const double v = integrate([](double x) { return std::exp(-x * x); }, 0.0, 3.0, 1e-13);
    // erf oracle
    const double expected = 0.5 * std::sqrt(std::numbers::pi) * std::erf(3.0);
    CHECK(std::fabs(v - expected) < 1e-12);

    const double kink = integrate([](double x) { return std::fabs(x - 0.3); }, 0.0, 1.0, 1e-12);
    CHECK(kink == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-10));
}

TEST_CASE("simpson rejects non-finite integrands") {
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), NumericalError);
}
