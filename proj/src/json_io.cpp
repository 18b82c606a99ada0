#include "ddopt/json_io.hpp"

#include <string>

#include "ddopt/errors.hpp"

namespace ddopt {

namespace {

double get_num(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw ValidationError(std::string(where) + ": missing key '" + key + "'");
    }
    if (!j[key].is_number()) {
        throw ValidationError(std::string(where) + ": key '" + key + "' must be a number");
    }
    return j[key].get<double>();
}

} // namespace

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError(std::string(where) + ": unknown key '" + it.key() + "'");
        }
    }
}

TransformModel model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ValidationError("model: expected an object with a 'kind' key");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "bm") {
        reject_unknown_keys(j, {"kind", "mu", "sigma", "q"}, "model(bm)");
        return TransformModel(DriftedBmModel(get_num(j, "mu", "model"),
                                             get_num(j, "sigma", "model"),
                                             get_num(j, "q", "model")));
    }
    if (kind == "gbm") {
        reject_unknown_keys(j, {"kind", "alpha", "beta", "eps", "q", "x0"}, "model(gbm)");
        LogAffineTransform t{get_num(j, "alpha", "model"), get_num(j, "beta", "model"),
                             get_num(j, "eps", "model"), get_num(j, "x0", "model")};
        return TransformModel(t, get_num(j, "q", "model"));
    }
    throw ValidationError("model: kind must be 'bm' or 'gbm'");
}

json model_to_json(const TransformModel& tm) {
    if (tm.is_identity()) {
        const auto& m = tm.base();
        return {{"kind", "bm"}, {"mu", m.mu}, {"sigma", m.sigma}, {"q", m.q}};
    }
    const auto& t = std::get<LogAffineTransform>(tm.transform());
    return {{"kind", "gbm"}, {"alpha", t.alpha}, {"beta", t.beta},
            {"eps", t.eps},  {"q", tm.base().q}, {"x0", t.x0}};
}

DrawdownFn drawdown_from_json(const json& j, double default_a) {
    if (!j.is_object()) throw ValidationError("drawdown: expected an object");
    if (j.contains("kind")) {
        if (j["kind"].get<std::string>() != "affine") {
            throw ValidationError("drawdown: unknown kind");
        }
        reject_unknown_keys(j, {"kind", "xi", "d0", "a"}, "drawdown(affine)");
        const AffineDrawdown aff{get_num(j, "xi", "drawdown"),
                                 get_num(j, "d0", "drawdown")};
        if (aff.xi < 0.0 || aff.xi > 1.0) {
            throw ValidationError("drawdown: xi must be in [0, 1]");
        }
        if (aff.d0 < 0.0) throw ValidationError("drawdown: d0 must be >= 0");
        const double a = j.contains("a") ? get_num(j, "a", "drawdown") : default_a;
        return to_piecewise(aff, a);
    }
    reject_unknown_keys(j, {"a", "d_a", "breakpoints", "slopes", "u_max"}, "drawdown");
    DrawdownFn dd;
    dd.a = get_num(j, "a", "drawdown");
    dd.d_a = get_num(j, "d_a", "drawdown");
    if (!j.contains("breakpoints") || !j.contains("slopes")) {
        throw ValidationError("drawdown: breakpoints and slopes are required");
    }
    dd.breakpoints = j["breakpoints"].get<std::vector<double>>();
    dd.slopes = j["slopes"].get<std::vector<double>>();
    if (j.contains("u_max")) dd.u_max = get_num(j, "u_max", "drawdown");
    const auto rep = validate(dd);
    if (!rep.ok) throw ValidationError("drawdown: " + rep.violation);
    return dd;
}

json drawdown_to_json(const DrawdownFn& dd) {
    return {{"a", dd.a},
            {"d_a", dd.d_a},
            {"breakpoints", dd.breakpoints},
            {"slopes", dd.slopes},
            {"u_max", dd.u_max}};
}

json value_breakdown_to_json(const ValueBreakdown& vb) {
    return {{"survival_factor", vb.survival_factor},
            {"barrier_payout", vb.barrier_payout},
            {"value", vb.value},
            {"integral_of_nu", vb.integral_of_nu}};
}

json sim_result_to_json(const SimResult& r) {
    return {{"mean", r.mean},
            {"std_err", r.std_err},
            {"n_effective", r.n_effective},
            {"truncated_fraction", r.truncated_fraction},
            {"runtime_s", r.runtime_s}};
}

json pmp_solution_to_json(const PMPSolution& sol) {
    json regimes = json::array();
    for (Regime r : sol.regimes) {
        regimes.push_back(r == Regime::slope0     ? "slope0"
                          : r == Regime::structure ? "structure"
                                                   : "slopeU");
    }
    json j{{"drawdown", drawdown_to_json(sol.dd)},
           {"b_star", sol.b_star},
           {"r", sol.r},
           {"regimes", regimes},
           {"hamiltonian_residual", sol.hamiltonian_residual},
           {"distribute_immediately", sol.distribute_immediately},
           {"area_saturated", sol.area_saturated},
           {"d_a", sol.d_a},
           {"value", sol.value}};
    j["j_objective"] = std::isfinite(sol.j_objective)
                           ? json(sol.j_objective)
                           : json("inf");
    return j;
}

json pmp_report_to_json(const PMPVerifyReport& rep) {
    auto num_or_null = [](double v) {
        return std::isnan(v) ? json(nullptr) : json(v);
    };
    return {{"h_terminal", num_or_null(rep.h_terminal)},
            {"h_max_deviation", num_or_null(rep.h_max_deviation)},
            {"p_terminal", rep.p_terminal},
            {"switching_violation", rep.switching_violation},
            {"p0_residual", num_or_null(rep.p0_residual)},
            {"structure_residual_pos", num_or_null(rep.structure_residual_pos)},
            {"structure_residual_neg", num_or_null(rep.structure_residual_neg)},
            {"homogeneous", rep.homogeneous},
            {"degenerate", rep.degenerate},
            {"degenerate_margin",
             std::isfinite(rep.degenerate_margin) ? json(rep.degenerate_margin)
                                                  : json(nullptr)},
            {"pass", rep.pass},
            {"tol", rep.tol}};
}

json oracle_result_to_json(const OracleResult& res) {
    return {{"best_control", res.best_control},
            {"best_b", res.best_b},
            {"best_j", res.best_j},
            {"best_value", res.best_value},
            {"feasible_count", res.feasible_count},
            {"best_word", res.best_word},
            {"second_best_j", res.second_best_j},
            {"second_best_word", res.second_best_word}};
}

json oracle_compare_to_json(const OracleCompareReport& rep) {
    return {{"j_pmp", rep.j_pmp},
            {"j_oracle", rep.j_oracle},
            {"gap", rep.gap},
            {"slack", rep.slack},
            {"pass", rep.pass},
            {"oracle_beats_beyond_slack", rep.oracle_beats_beyond_slack}};
}

} // namespace ddopt
