#include <doctest.h>

#include <cmath>

#include "ddopt/errors.hpp"
#include "ddopt/simulate.hpp"
#include "ddopt/valuation.hpp"

using namespace ddopt;

namespace {
const TransformModel kSinhTm(DriftedBmModel(0.0, std::sqrt(2.0), 1.0));

SimConfig base_cfg() {
    SimConfig cfg{.model = kSinhTm, .dd = to_piecewise(AffineDrawdown{1.0, 1.0})};
    cfg.dt = 1e-4;
    cfg.n_paths = 20'000;
    cfg.seed = 2024;
    cfg.b = 0.0;
    cfg.x0 = 0.0;
    return cfg;
}
} // namespace

TEST_CASE("same seed gives bit-identical results, parallel and serial") {
    SimConfig cfg = base_cfg();
    cfg.n_paths = 2'000;
    const SimResult par1 = simulate_value(cfg);
    const SimResult par2 = simulate_value(cfg);
    const SimResult ser = simulate_value_serial(cfg);
    CHECK(par1.mean == par2.mean);
    CHECK(par1.std_err == par2.std_err);
    CHECK(par1.mean == ser.mean);
    CHECK(par1.std_err == ser.std_err);

    cfg.seed = 7;
    const SimResult other = simulate_value(cfg);
    CHECK(other.mean != par1.mean);
}

TEST_CASE("dividends until a unit draw-down match tanh(1)") {
    const SimConfig cfg = base_cfg();
    const SimResult res = simulate_value(cfg);
    const double analytic = std::tanh(1.0);
    CHECK(std::fabs(res.mean - analytic) < 4.0 * res.std_err);
    CHECK(res.truncated_fraction < 1e-3);
}

TEST_CASE("deep draw-down approaches the perpetuity 1/phi_q") {
    SimConfig cfg = base_cfg();
    cfg.dd = to_piecewise(AffineDrawdown{1.0, 1000.0});
    cfg.dt = 2e-4;
    cfg.n_paths = 1'200;
    const SimResult res = simulate_value(cfg);
    // every path runs to the horizon
    CHECK(res.truncated_fraction == 1.0);
    CHECK(res.n_effective == 0);
    CHECK(std::fabs(res.mean - 1.0) < 4.0 * res.std_err);
}

TEST_CASE("start below the trailing stop pays nothing") {
    SimConfig cfg = base_cfg();
    cfg.dd = to_piecewise(AffineDrawdown{0.0, 1.0}); // ruin at -1
    cfg.x0 = -1.5;
    cfg.b = 0.0;
    const SimResult res = simulate_value(cfg);
    CHECK(res.mean == 0.0);
    CHECK(res.std_err == 0.0);
}

TEST_CASE("survival factor of the classic ruin exit") {
    SimConfig cfg = base_cfg();
    cfg.dd = to_piecewise(AffineDrawdown{0.0, 1.0});
    const SimResult at_b = simulate_survival_factor(cfg, 2.0, 2.0);
    CHECK(at_b.mean == 1.0);
    CHECK(at_b.std_err == 0.0);

    const SimResult res = simulate_survival_factor(cfg, 1.0, 2.0);
    const double analytic = std::sinh(2.0) / std::sinh(3.0);
    CHECK(std::fabs(res.mean - analytic) < 4.0 * res.std_err);
}

TEST_CASE("halving dt moves the estimate by little") {
    SimConfig cfg = base_cfg();
    cfg.n_paths = 10'000;
    cfg.dt = 4e-4;
    const SimResult coarse = simulate_value(cfg);
    cfg.dt = 2e-4;
    const SimResult fine = simulate_value(cfg);
    const double combined = std::hypot(coarse.std_err, fine.std_err);
    CHECK(std::fabs(coarse.mean - fine.mean) < 2.0 * combined);
}

TEST_CASE("config validation") {
    SimConfig cfg = base_cfg();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(simulate_value(cfg), ValidationError);

    cfg = base_cfg();
    cfg.x0 = 0.5; // above the barrier
    CHECK_THROWS_AS(simulate_value(cfg), ValidationError);

    cfg = base_cfg();
    cfg.t_max = 1.0; // e^{-q t_max} far above the discount floor
    CHECK_THROWS_AS(simulate_value(cfg), ValidationError);

    cfg = base_cfg();
    CHECK_THROWS_AS(simulate_survival_factor(cfg, 1.0, 0.5), ValidationError);
}
