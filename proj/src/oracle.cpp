#include "ddopt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "ddopt/errors.hpp"
#include "ddopt/quadrature.hpp"
#include "ddopt/valuation.hpp"

namespace ddopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_config(const OracleConfig& cfg) {
    if (cfg.n_segments < 1 || cfg.n_segments > 20) {
        throw ValidationError("OracleConfig: n_segments must be in [1, 20]");
    }
    if (cfg.b_grid.empty()) throw ValidationError("OracleConfig: b_grid is empty");
    for (double b : cfg.b_grid) {
        if (!(b > cfg.a)) throw ValidationError("OracleConfig: b_grid entries must be > a");
    }
    if (!(cfg.u_max > 0.0) || cfg.u_max > 1.0) {
        throw ValidationError("OracleConfig: u_max must be in (0, 1]");
    }
    if (cfg.d_a < 0.0) throw ValidationError("OracleConfig: d_a must be >= 0");
    if (cfg.K && !(*cfg.K > 0.0)) throw ValidationError("OracleConfig: K must be > 0");
}

// cost and area of segment i given k prior max-slope segments and slope v*u_max
struct SegmentTables {
    int n;
    double h;
    // indexed [i][k][v]
    std::vector<double> cost;
    std::vector<double> area;

    double& at(std::vector<double>& tbl, int i, int k, int v) {
        return tbl[static_cast<std::size_t>((i * (n + 1) + k) * 2 + v)];
    }
    double get(const std::vector<double>& tbl, int i, int k, int v) const {
        return tbl[static_cast<std::size_t>((i * (n + 1) + k) * 2 + v)];
    }
};

SegmentTables build_tables(const OracleConfig& cfg, double b) {
    SegmentTables t;
    t.n = cfg.n_segments;
    t.h = (b - cfg.a) / t.n;
    t.cost.assign(static_cast<std::size_t>(t.n * (t.n + 1) * 2), kInf);
    t.area.assign(static_cast<std::size_t>(t.n * (t.n + 1) * 2), kInf);
    const TransformModel& tm = cfg.model;
    for (int i = 0; i < t.n; ++i) {
        const double y0 = cfg.a + i * t.h;
        for (int k = 0; k <= i; ++k) {
            const double d0 = cfg.d_a + cfg.u_max * t.h * k;
            for (int v = 0; v < 2; ++v) {
                const double u = v ? cfg.u_max : 0.0;
                t.at(t.area, i, k, v) = d0 * t.h + 0.5 * u * t.h * t.h;
                try {
                    t.at(t.cost, i, k, v) = integrate(
                        [&](double y) {
                            const double d = d0 + u * (y - y0);
                            const double hd = y - d;
                            const double n = tm.nu2(y, hd);
                            return n + (tm.d1_nu2(y, hd) +
                                        tm.d2_nu2(y, hd) * (1.0 - u)) /
                                           n;
                        },
                        y0, y0 + t.h, kQuadTol);
                } catch (const std::exception&) {
                    // singular segment (d reaches 0): the word is infeasible
                }
            }
        }
    }
    return t;
}

struct WordBest {
    double j = kInf;
    double b = 0.0;
};

OracleResult enumerate_impl(const OracleConfig& cfg, bool parallel,
                            std::vector<OracleCandidate>* dump) {
    validate_config(cfg);
    const int n = cfg.n_segments;
    const std::uint32_t n_words = 1u << n;
    const TransformModel& tm = cfg.model;

    double terminal_at_a = kInf;
    if (cfg.d_a > 0.0) {
        terminal_at_a = std::log(tm.nu2(cfg.a, cfg.a - cfg.d_a));
    }

    std::vector<WordBest> words(n_words);
    std::int64_t feasible = 0;
    if (dump) dump->resize(static_cast<std::size_t>(n_words) * cfg.b_grid.size());

    for (std::size_t bi = 0; bi < cfg.b_grid.size(); ++bi) {
        const double b = cfg.b_grid[bi];
        const SegmentTables t = build_tables(cfg, b);
        std::int64_t feas_b = 0;
#pragma omp parallel for schedule(static) reduction(+ : feas_b) if (parallel)
        for (std::int64_t wi = 0; wi < static_cast<std::int64_t>(n_words); ++wi) {
            const auto word = static_cast<std::uint32_t>(wi);
            double j = terminal_at_a;
            double area_total = 0.0;
            int k = 0;
            for (int i = 0; i < n && std::isfinite(j); ++i) {
                const int v = (word >> (n - 1 - i)) & 1u;
                j += t.get(t.cost, i, k, v);
                area_total += t.get(t.area, i, k, v);
                k += v;
            }
            const bool feas = std::isfinite(j) &&
                              (!cfg.K || area_total <= *cfg.K * (1.0 + 1e-12) + 1e-12);
            if (dump) {
                (*dump)[bi * n_words + word] = {word, b, j, area_total, feas};
            }
            if (!feas) continue;
            ++feas_b;
            WordBest& wb = words[word];
            if (j < wb.j) {
                wb.j = j;
                wb.b = b;
            }
        }
        feasible += feas_b;
    }

    // deterministic argmin in word-index order = lexicographic slope order
    std::uint32_t best_word = 0, second_word = 0;
    double best_j = kInf, second_j = kInf;
    for (std::uint32_t w = 0; w < n_words; ++w) {
        const double j = words[w].j;
        if (j < best_j) {
            second_j = best_j;
            second_word = best_word;
            best_j = j;
            best_word = w;
        } else if (j < second_j) {
            second_j = j;
            second_word = w;
        }
    }
    if (!std::isfinite(best_j)) {
        throw NumericalError("enumerate_controls: empty feasible set (area budget "
                             "excludes every control)");
    }

    OracleResult res;
    res.best_word = best_word;
    res.best_b = words[best_word].b;
    res.best_j = best_j;
    res.second_best_j = second_j;
    res.second_best_word = second_word;
    res.feasible_count = feasible;
    res.best_control.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        res.best_control[static_cast<std::size_t>(i)] =
            ((best_word >> (n - 1 - i)) & 1u) ? cfg.u_max : 0.0;
    }
    res.best_value = value(tm, word_to_drawdown(cfg, best_word, res.best_b), cfg.a,
                           res.best_b)
                         .value;
    return res;
}

} // namespace

DrawdownFn word_to_drawdown(const OracleConfig& cfg, std::uint32_t word, double b) {
    const int n = cfg.n_segments;
    const double h = (b - cfg.a) / n;
    DrawdownFn dd;
    dd.a = cfg.a;
    dd.d_a = cfg.d_a;
    dd.u_max = cfg.u_max;
    dd.breakpoints.resize(static_cast<std::size_t>(n));
    dd.slopes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dd.breakpoints[static_cast<std::size_t>(i)] = cfg.a + i * h;
        dd.slopes[static_cast<std::size_t>(i)] =
            ((word >> (n - 1 - i)) & 1u) ? cfg.u_max : 0.0;
    }
    return dd;
}

OracleResult enumerate_controls(const OracleConfig& cfg,
                                std::vector<OracleCandidate>* dump) {
    return enumerate_impl(cfg, true, dump);
}

OracleResult enumerate_controls_serial(const OracleConfig& cfg,
                                       std::vector<OracleCandidate>* dump) {
    return enumerate_impl(cfg, false, dump);
}

OracleCompareReport compare_with_pmp(const OracleResult& oracle,
                                     const OracleConfig& ocfg, const PMPSolution& pmp,
                                     const PMPConfig& pcfg) {
    const auto same = [](double x, double y) { return std::fabs(x - y) < 1e-12; };
    const bool model_match =
        same(ocfg.model.base().mu, pcfg.model.base().mu) &&
        same(ocfg.model.base().sigma, pcfg.model.base().sigma) &&
        same(ocfg.model.base().q, pcfg.model.base().q) &&
        ocfg.model.is_identity() == pcfg.model.is_identity();
    const bool k_match = ocfg.K.has_value() == pcfg.K.has_value() &&
                         (!ocfg.K || same(*ocfg.K, *pcfg.K));
    if (!model_match || !same(ocfg.a, pcfg.a) || !same(ocfg.d_a, pmp.d_a) ||
        !same(ocfg.u_max, pcfg.u_max) || !k_match) {
        throw ValidationError("compare_with_pmp: oracle and PMP configs disagree");
    }

    OracleCompareReport rep;
    rep.j_oracle = oracle.best_j;
    rep.j_pmp = pmp.distribute_immediately && pmp.d_a <= 0.0
                    ? std::numeric_limits<double>::infinity()
                    : objective_j(pcfg.model, pmp.dd, pcfg.a,
                                  std::max(pmp.b_star, pcfg.a + 1e-12));
    rep.gap = rep.j_pmp - rep.j_oracle;

    // Lipschitz slack: the piecewise-constant oracle control tracks the PMP
    // profile to within u_max*h/2 in d, so J can differ by at most L*u_max*h*(b-a)
    const double span = std::max(oracle.best_b, pmp.b_star) - ocfg.a;
    const double h_seg = span / ocfg.n_segments;
    double lip = 0.0;
    const int samples = 129;
    for (int i = 0; i <= samples; ++i) {
        const double t = ocfg.a + span * i / samples;
        const double d = eval_d(pmp.dd, t);
        if (!(d > 0.0)) continue;
        const double u = slope_at(pmp.dd, t);
        // d-derivative of the running cost is -costate_rhs at r = 0
        lip = std::max(lip, std::fabs(costate_rhs(pcfg.model, t, d, u, 0.0, 0.0)));
    }
    rep.slack = lip * ocfg.u_max * h_seg * span + 1e-9;
    rep.pass = rep.j_pmp <= rep.j_oracle + rep.slack;
    rep.oracle_beats_beyond_slack = !rep.pass;
    return rep;
}

} // namespace ddopt
