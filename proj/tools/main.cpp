// Command-line front door: one JSON config per run, machine-readable results.
// Exit codes: 0 success, 1 failed verification, 2 validation error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <omp.h>
#include <optional>
#include <sstream>
#include <string>

#include "ddopt/errors.hpp"
#include "ddopt/json_io.hpp"
#include "ddopt/models.hpp"
#include "ddopt/oracle.hpp"
#include "ddopt/pontryagin.hpp"
#include "ddopt/simulate.hpp"
#include "ddopt/valuation.hpp"

namespace {

using ddopt::json;

struct Options {
    std::string config_path;
    std::string output; // empty: stdout
    std::string format = "json";
    std::optional<std::uint64_t> seed_override;
    int threads = 0;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_artifact(const Options& opt, const std::string& text) {
    if (opt.output.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opt.output);
    if (!out) throw ddopt::ValidationError("cannot open output path: " + opt.output);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

json load_config(const Options& opt, const std::string& command) {
    std::ifstream in(opt.config_path);
    if (!in) throw ddopt::ValidationError("cannot open config: " + opt.config_path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ddopt::ValidationError(std::string("config parse error: ") + e.what());
    }
    if (cfg.contains("command") && cfg["command"].get<std::string>() != command) {
        throw ddopt::ValidationError("config 'command' field disagrees with the subcommand");
    }
    return cfg;
}

const json& need_section(const json& cfg, const char* key) {
    if (!cfg.contains(key)) {
        throw ddopt::ValidationError(std::string("config: missing section '") + key + "'");
    }
    return cfg.at(key);
}

double need_num(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ddopt::ValidationError(std::string(where) + ": missing numeric '" + key + "'");
    }
    return j[key].get<double>();
}

ddopt::PMPConfig problem_from_json(const json& cfg) {
    const json& p = need_section(cfg, "problem");
    ddopt::reject_unknown_keys(
        p, {"a", "d_a", "d_a_max", "K", "u_max", "costate_mesh"}, "problem");
    ddopt::PMPConfig pc{.model = ddopt::model_from_json(need_section(cfg, "model"))};
    pc.a = need_num(p, "a", "problem");
    if (p.contains("d_a")) pc.d_a = need_num(p, "d_a", "problem");
    if (p.contains("d_a_max")) pc.d_a_max = need_num(p, "d_a_max", "problem");
    if (p.contains("K")) pc.K = need_num(p, "K", "problem");
    pc.u_max = need_num(p, "u_max", "problem");
    if (p.contains("costate_mesh")) {
        pc.costate_mesh = static_cast<int>(need_num(p, "costate_mesh", "problem"));
    }
    if (!pc.d_a && !p.contains("d_a_max")) {
        throw ddopt::ValidationError("problem: set d_a (fixed) or d_a_max (free datum)");
    }
    return pc;
}

ddopt::SimConfig sim_from_json(const json& cfg, const Options& opt) {
    const json& s = need_section(cfg, "sim");
    ddopt::reject_unknown_keys(s,
                               {"dt", "n_paths", "seed", "t_max", "b", "x0", "x",
                                "estimator", "discount_floor"},
                               "sim");
    ddopt::SimConfig sc{.model = ddopt::model_from_json(need_section(cfg, "model")),
                        .dd = ddopt::drawdown_from_json(need_section(cfg, "drawdown"))};
    sc.dt = need_num(s, "dt", "sim");
    sc.n_paths = static_cast<std::int64_t>(need_num(s, "n_paths", "sim"));
    sc.seed = s.contains("seed")
                  ? static_cast<std::uint64_t>(s["seed"].get<std::uint64_t>())
                  : 1;
    if (s.contains("t_max")) sc.t_max = need_num(s, "t_max", "sim");
    sc.b = need_num(s, "b", "sim");
    sc.x0 = need_num(s, "x0", "sim");
    if (s.contains("discount_floor")) {
        sc.discount_floor = need_num(s, "discount_floor", "sim");
    }
    if (opt.seed_override) sc.seed = *opt.seed_override;
    return sc;
}

// ---- commands --------------------------------------------------------------

int cmd_scale(const Options& opt) {
    const json cfg = load_config(opt, "scale");
    ddopt::reject_unknown_keys(cfg, {"command", "model", "grid", "output", "format"},
                               "config");
    const ddopt::TransformModel tm = ddopt::model_from_json(need_section(cfg, "model"));
    if (!tm.is_identity()) {
        throw ddopt::ValidationError("scale: only 'bm' models tabulate a scale function");
    }
    const json& g = need_section(cfg, "grid");
    ddopt::reject_unknown_keys(g, {"x_min", "x_max", "n"}, "grid");
    const double x_min = need_num(g, "x_min", "grid");
    const double x_max = need_num(g, "x_max", "grid");
    const int n = static_cast<int>(need_num(g, "n", "grid"));
    if (!(x_max > x_min) || x_min < 0.0 || n < 2) {
        throw ddopt::ValidationError("grid: need 0 <= x_min < x_max and n >= 2");
    }
    const auto& m = tm.base();
    if (opt.format == "csv") {
        std::ostringstream out;
        out << "x,W,W1,W2,nu,nu_prime\n";
        for (int i = 0; i < n; ++i) {
            const double x = x_min + (x_max - x_min) * i / (n - 1);
            out << fmt17(x) << ',' << fmt17(ddopt::scale_w(m, x, 0)) << ','
                << fmt17(ddopt::scale_w(m, x, 1)) << ',' << fmt17(ddopt::scale_w(m, x, 2))
                << ',' << fmt17(x > 0.0 ? ddopt::nu(m, x) : INFINITY) << ','
                << fmt17(x > 0.0 ? ddopt::nu_prime(m, x) : -INFINITY) << '\n';
        }
        write_artifact(opt, out.str());
    } else {
        json rows = json::array();
        for (int i = 0; i < n; ++i) {
            const double x = x_min + (x_max - x_min) * i / (n - 1);
            json row{{"x", x},
                     {"W", ddopt::scale_w(m, x, 0)},
                     {"W1", ddopt::scale_w(m, x, 1)},
                     {"W2", ddopt::scale_w(m, x, 2)}};
            row["nu"] = x > 0.0 ? json(ddopt::nu(m, x)) : json(nullptr);
            row["nu_prime"] = x > 0.0 ? json(ddopt::nu_prime(m, x)) : json(nullptr);
            rows.push_back(row);
        }
        write_artifact(opt, json{{"config", cfg}, {"rows", rows}}.dump(2));
    }
    return 0;
}

int cmd_value(const Options& opt) {
    const json cfg = load_config(opt, "value");
    ddopt::reject_unknown_keys(
        cfg, {"command", "model", "drawdown", "x", "b", "output", "format"}, "config");
    const ddopt::TransformModel tm = ddopt::model_from_json(need_section(cfg, "model"));
    const ddopt::DrawdownFn dd = ddopt::drawdown_from_json(need_section(cfg, "drawdown"));
    const double x = need_num(cfg, "x", "config");
    const double b = need_num(cfg, "b", "config");
    const ddopt::ValueBreakdown vb = ddopt::value(tm, dd, x, b);
    json out{{"config", cfg}, {"result", ddopt::value_breakdown_to_json(vb)}};
    write_artifact(opt, out.dump(2));
    return 0;
}

int cmd_optimize(const Options& opt) {
    const json cfg = load_config(opt, "optimize");
    ddopt::reject_unknown_keys(cfg, {"command", "model", "problem", "output", "format"},
                               "config");
    const ddopt::PMPConfig pc = problem_from_json(cfg);
    const ddopt::PMPSolution sol = ddopt::optimize(pc);
    if (opt.format == "csv") {
        std::ostringstream out;
        out << "t,d,u,p,switching_value\n";
        for (const auto& s : sol.costate) {
            out << fmt17(s.t) << ',' << fmt17(s.d) << ',' << fmt17(s.u) << ','
                << fmt17(s.p) << ',' << fmt17(s.switching) << '\n';
        }
        write_artifact(opt, out.str());
    } else {
        write_artifact(
            opt, json{{"config", cfg}, {"result", ddopt::pmp_solution_to_json(sol)}}.dump(2));
    }
    return 0;
}

int cmd_simulate(const Options& opt) {
    const json cfg = load_config(opt, "simulate");
    ddopt::reject_unknown_keys(
        cfg, {"command", "model", "drawdown", "sim", "output", "format"}, "config");
    const ddopt::SimConfig sc = sim_from_json(cfg, opt);
    const json& s = cfg["sim"];
    const std::string estimator =
        s.contains("estimator") ? s["estimator"].get<std::string>() : "value";
    ddopt::SimResult res;
    if (estimator == "value") {
        res = ddopt::simulate_value(sc);
    } else if (estimator == "survival_factor") {
        const double x = s.contains("x") ? s["x"].get<double>() : sc.x0;
        res = ddopt::simulate_survival_factor(sc, x, sc.b);
    } else {
        throw ddopt::ValidationError("sim: estimator must be 'value' or 'survival_factor'");
    }
    write_artifact(opt,
                   json{{"config", cfg}, {"result", ddopt::sim_result_to_json(res)}}.dump(2));
    return 0;
}

ddopt::OracleConfig oracle_from_json(const json& cfg) {
    const json& o = need_section(cfg, "oracle");
    ddopt::reject_unknown_keys(
        o, {"a", "d_a", "u_max", "K", "n_segments", "b_grid", "b_center", "b_width",
            "b_points", "dump_candidates"},
        "oracle");
    ddopt::OracleConfig oc{.model = ddopt::model_from_json(need_section(cfg, "model"))};
    oc.a = need_num(o, "a", "oracle");
    oc.d_a = need_num(o, "d_a", "oracle");
    oc.u_max = need_num(o, "u_max", "oracle");
    if (o.contains("K")) oc.K = need_num(o, "K", "oracle");
    oc.n_segments = static_cast<int>(need_num(o, "n_segments", "oracle"));
    if (o.contains("b_grid")) {
        oc.b_grid = o["b_grid"].get<std::vector<double>>();
    } else {
        // grid centered on the PMP horizon, +-20%, 41 points
        ddopt::PMPConfig pc{.model = oc.model};
        pc.a = oc.a;
        pc.d_a = oc.d_a;
        pc.u_max = oc.u_max;
        pc.K = oc.K;
        const ddopt::PMPSolution sol = ddopt::optimize(pc);
        const double center = o.contains("b_center")
                                  ? need_num(o, "b_center", "oracle")
                                  : sol.b_star;
        if (!(center > oc.a)) {
            throw ddopt::ValidationError("oracle: degenerate horizon, give an explicit b_grid");
        }
        const double width = o.contains("b_width") ? need_num(o, "b_width", "oracle")
                                                   : 0.2 * (center - oc.a);
        const int points =
            o.contains("b_points") ? static_cast<int>(need_num(o, "b_points", "oracle")) : 41;
        for (int i = 0; i < points; ++i) {
            const double b =
                center - width + 2.0 * width * (points == 1 ? 0.5 : double(i) / (points - 1));
            if (b > oc.a) oc.b_grid.push_back(b);
        }
    }
    return oc;
}

int cmd_oracle(const Options& opt) {
    const json cfg = load_config(opt, "oracle");
    ddopt::reject_unknown_keys(cfg, {"command", "model", "oracle", "output", "format"},
                               "config");
    const ddopt::OracleConfig oc = oracle_from_json(cfg);
    const bool dump = cfg["oracle"].contains("dump_candidates") &&
                      cfg["oracle"]["dump_candidates"].get<bool>();
    std::vector<ddopt::OracleCandidate> rows;
    const ddopt::OracleResult res =
        ddopt::enumerate_controls(oc, dump ? &rows : nullptr);
    if (opt.format == "csv" && dump) {
        std::ostringstream out;
        out << "word,b,J,area,feasible\n";
        for (const auto& r : rows) {
            out << r.word << ',' << fmt17(r.b) << ',' << fmt17(r.j) << ','
                << fmt17(r.area) << ',' << (r.feasible ? 1 : 0) << '\n';
        }
        write_artifact(opt, out.str());
    } else {
        write_artifact(
            opt,
            json{{"config", cfg}, {"result", ddopt::oracle_result_to_json(res)}}.dump(2));
    }
    return 0;
}

int cmd_verify(const Options& opt) {
    const json cfg = load_config(opt, "verify");
    ddopt::reject_unknown_keys(cfg, {"command", "model", "problem", "verify", "output",
                                     "format"},
                               "config");
    const ddopt::PMPConfig pc = problem_from_json(cfg);
    json v = cfg.contains("verify") ? cfg["verify"] : json::object();
    ddopt::reject_unknown_keys(
        v, {"n_segments", "n_paths", "dt", "seed", "sigma_tolerance", "tol"}, "verify");

    json report;
    bool passed = true;

    const ddopt::PMPSolution sol = ddopt::optimize(pc);
    report["optimize"] = ddopt::pmp_solution_to_json(sol);

    const double tol = v.contains("tol") ? v["tol"].get<double>() : 1e-6;
    const ddopt::PMPVerifyReport rep = ddopt::verify_pmp(pc.model, sol, pc, tol);
    report["pmp_check"] = ddopt::pmp_report_to_json(rep);
    passed = passed && rep.pass;

    if (!sol.distribute_immediately && sol.d_a > 0.0) {
        ddopt::OracleConfig oc{.model = pc.model};
        oc.a = pc.a;
        oc.d_a = sol.d_a;
        oc.u_max = pc.u_max;
        oc.K = pc.K;
        oc.n_segments =
            v.contains("n_segments") ? v["n_segments"].get<int>() : 10;
        const double width = 0.2 * (sol.b_star - pc.a);
        for (int i = 0; i < 41; ++i) {
            const double b = sol.b_star - width + 2.0 * width * i / 40.0;
            if (b > pc.a) oc.b_grid.push_back(b);
        }
        const ddopt::OracleResult ores = ddopt::enumerate_controls(oc);
        report["oracle"] = ddopt::oracle_result_to_json(ores);
        const ddopt::OracleCompareReport cmp = ddopt::compare_with_pmp(ores, oc, sol, pc);
        report["oracle_compare"] = ddopt::oracle_compare_to_json(cmp);
        passed = passed && cmp.pass;
    } else {
        report["oracle"] = "skipped: degenerate horizon or singular initial datum";
    }

    if (sol.d_a > 0.0) {
        ddopt::SimConfig sc{.model = pc.model, .dd = sol.dd};
        sc.dt = v.contains("dt") ? v["dt"].get<double>() : 1e-4;
        sc.n_paths = v.contains("n_paths") ? v["n_paths"].get<std::int64_t>() : 20'000;
        sc.seed = v.contains("seed") ? v["seed"].get<std::uint64_t>() : 1;
        if (opt.seed_override) sc.seed = *opt.seed_override;
        sc.b = sol.b_star;
        sc.x0 = pc.a;
        const ddopt::SimResult sim = ddopt::simulate_value(sc);
        const double sigmas = v.contains("sigma_tolerance")
                                  ? v["sigma_tolerance"].get<double>()
                                  : 4.0;
        const double dist = std::fabs(sim.mean - sol.value) /
                            std::max(sim.std_err, 1e-300);
        report["simulate"] = {{"result", ddopt::sim_result_to_json(sim)},
                              {"analytic", sol.value},
                              {"sigmas", dist},
                              {"pass", dist <= sigmas}};
        passed = passed && dist <= sigmas;
    } else {
        report["simulate"] = "skipped: value at a singular initial datum is 0";
    }

    report["passed"] = passed;
    write_artifact(opt, json{{"config", cfg}, {"report", report}}.dump(2));
    return passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"De Finetti dividend barriers under generalized draw-down stopping"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opt.config_path, "JSON config file")->required();
        sub->add_option("--output", opt.output, "write the artifact here (default stdout)");
        sub->add_option("--format", opt.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed-override", opt.seed_override, "replace the config seed");
        sub->add_option("--threads", opt.threads, "bound worker threads");
    };

    auto* scale = app.add_subcommand("scale", "tabulate W, W', W'', nu, nu'");
    auto* value = app.add_subcommand("value", "value a barrier + draw-down policy");
    auto* optimize = app.add_subcommand("optimize", "solve for the optimal policy");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate");
    auto* oracle = app.add_subcommand("oracle", "brute-force control enumeration");
    auto* verify = app.add_subcommand("verify", "optimize + verify + oracle + simulate");
    for (auto* sub : {scale, value, optimize, simulate, oracle, verify}) add_common(sub);

    CLI11_PARSE(app, argc, argv);
    if (opt.threads > 0) omp_set_num_threads(opt.threads);

    try {
        if (scale->parsed()) return cmd_scale(opt);
        if (value->parsed()) return cmd_value(opt);
        if (optimize->parsed()) return cmd_optimize(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (oracle->parsed()) return cmd_oracle(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const ddopt::ValidationError& e) {
        std::cerr << ddopt::json{{"error", {{"kind", "validation"}, {"message", e.what()}}}}
                  << '\n';
        return 2;
    } catch (const ddopt::NumericalError& e) {
        std::cerr << ddopt::json{{"error", {{"kind", "numerical"}, {"message", e.what()}}}}
                  << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << ddopt::json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}
                  << '\n';
        return 3;
    }
    return 0;
}
