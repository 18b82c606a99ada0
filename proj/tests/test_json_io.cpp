#include <doctest.h>

#include <cmath>

#include "ddopt/errors.hpp"
#include "ddopt/json_io.hpp"

using namespace ddopt;

TEST_CASE("model json round trip") {
    const json bm = {{"kind", "bm"}, {"mu", 0.5}, {"sigma", 1.2}, {"q", 0.3}};
    const TransformModel tm = model_from_json(bm);
    CHECK(tm.is_identity());
    CHECK(model_to_json(tm) == bm);

    const json gbm = {{"kind", "gbm"}, {"alpha", 1.0}, {"beta", 2.0},
                      {"eps", 0.5},    {"q", 1.0},     {"x0", 0.0}};
    const TransformModel tg = model_from_json(gbm);
    CHECK_FALSE(tg.is_identity());
    CHECK(model_to_json(tg) == gbm);

    CHECK_THROWS_AS(model_from_json({{"kind", "bm"}, {"mu", 0.0}}), ValidationError);
    CHECK_THROWS_AS(model_from_json({{"kind", "bm"}, {"mu", 0.0}, {"sigma", 1.0},
                                     {"q", 1.0}, {"extra", 1}}),
                    ValidationError);
    CHECK_THROWS_AS(model_from_json({{"kind", "cir"}}), ValidationError);
}

TEST_CASE("drawdown json forms") {
    const json affine = {{"kind", "affine"}, {"xi", 0.5}, {"d0", 1.0}};
    const DrawdownFn aff = drawdown_from_json(affine);
    CHECK(aff.slopes == std::vector<double>{0.5});
    CHECK(eval_d(aff, 2.0) == doctest::Approx(2.0));

    const json pw = {{"a", 0.0},
                     {"d_a", 0.2},
                     {"breakpoints", {0.0, 1.0}},
                     {"slopes", {0.0, 1.0}}};
    const DrawdownFn dd = drawdown_from_json(pw);
    CHECK(eval_d(dd, 2.0) == doctest::Approx(1.2));
    const json out = drawdown_to_json(dd);
    const DrawdownFn back = drawdown_from_json(out);
    CHECK(eval_d(back, 1.7) == eval_d(dd, 1.7));

    json bad = pw;
    bad["slopes"] = {0.0, 1.5};
    CHECK_THROWS_WITH_AS(drawdown_from_json(bad), "drawdown: dhat not nondecreasing",
                         ValidationError);
}

TEST_CASE("results serialize without loss of the key fields") {
    SimResult r;
    r.mean = 0.125;
    r.std_err = 0.5e-3;
    r.n_effective = 99;
    r.truncated_fraction = 0.01;
    const json j = sim_result_to_json(r);
    CHECK(j["mean"] == 0.125);
    CHECK(j["n_effective"] == 99);

    PMPSolution sol;
    sol.dd = to_piecewise(AffineDrawdown{0.0, 1.0});
    sol.regimes = {Regime::slopeU};
    sol.b_star = 2.5;
    sol.j_objective = INFINITY;
    const json js = pmp_solution_to_json(sol);
    CHECK(js["b_star"] == 2.5);
    CHECK(js["j_objective"] == "inf");
    CHECK(js["regimes"][0] == "slopeU");
}
