#include "ddopt/pontryagin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddopt/errors.hpp"
#include "ddopt/quadrature.hpp"
#include "ddopt/roots.hpp"
#include "ddopt/valuation.hpp"

namespace ddopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double switching_value(const TransformModel& tm, double t, double d, double p) {
    const double y = t - d;
    return p - tm.d2_nu2(t, y) / tm.nu2(t, y);
}

// ---- identity-transform (Levy) closed forms -------------------------------

// (1-u)*nu(d) + u*(W''/W)(d)/nu(d), the sign function whose upward zero is the
// optimal barrier depth. Written through s = e^{-(phi+rho)d} so it is finite
// at d = 0 when u = 1, where it reduces to W''/W' exactly.
double levy_barrier_fn(const DriftedBmModel& m, double d, double u) {
    const double c = m.phi_q + m.rho_q;
    const double s = std::exp(-c * d);
    const double w2_over_w1 =
        (m.phi_q * m.phi_q - m.rho_q * m.rho_q * s) / (m.phi_q + m.rho_q * s);
    double v = u * w2_over_w1;
    if (u < 1.0) {
        const double one_minus_s = -std::expm1(-c * d);
        v += (1.0 - u) * (m.phi_q + m.rho_q * s) / one_minus_s;
    }
    return v;
}

double log_scale_w(const DriftedBmModel& m, double d) {
    return m.phi_q * d + std::log1p(-std::exp(-(m.phi_q + m.rho_q) * d)) -
           std::log(m.delta);
}

// ranking potential psi(d) = (1/u) log W(d) + log nu(d); differs from the
// objective J by a constant in b, so argmin matches
double levy_psi(const DriftedBmModel& m, double d, double u) {
    return log_scale_w(m, d) / u + std::log(nu(m, d));
}

// ---- shared helpers --------------------------------------------------------

DrawdownFn affine_slope(double a, double d_a, double u, double u_max) {
    DrawdownFn dd;
    dd.a = a;
    dd.d_a = d_a;
    dd.breakpoints = {a};
    dd.slopes = {u};
    dd.u_max = u_max;
    return dd;
}

// horizon at which the affine profile exhausts the area budget:
// d_a w + u w^2/2 = K, cancellation-free
double area_horizon(double a, double d_a, double u, double K) {
    return a + 2.0 * K / (d_a + std::sqrt(d_a * d_a + 2.0 * u * K));
}

void validate_config(const PMPConfig& cfg) {
    if (!(cfg.u_max > 0.0) || cfg.u_max > 1.0) {
        throw ValidationError("PMPConfig: u_max must be in (0, 1]");
    }
    if (cfg.K && !(*cfg.K > 0.0)) throw ValidationError("PMPConfig: K must be > 0");
    if (cfg.d_a) {
        if (*cfg.d_a < 0.0) throw ValidationError("PMPConfig: d_a must be >= 0");
        if (cfg.d_a_max > 0.0 && *cfg.d_a > cfg.d_a_max) {
            throw ValidationError("PMPConfig: d_a exceeds d_a_max");
        }
    } else if (cfg.d_a_max < 0.0) {
        throw ValidationError("PMPConfig: d_a_max must be >= 0");
    }
    if (cfg.costate_mesh < 16) throw ValidationError("PMPConfig: costate_mesh too small");
}

// keep only roots where f crosses upward (local minima of the objective)
std::vector<double> upward_roots(const std::function<double(double)>& f,
                                 const std::vector<double>& roots, double scale,
                                 double domain_lo) {
    std::vector<double> up;
    for (double r : roots) {
        double h = 1e-6 * (scale + std::fabs(r));
        if (r - h <= domain_lo) h = 0.45 * (r - domain_lo);
        if (f(r + h) > f(r - h)) up.push_back(r);
    }
    return up;
}

PMPSolution degenerate_solution(const PMPConfig& cfg, double d_a) {
    PMPSolution sol;
    sol.dd = affine_slope(cfg.a, d_a, cfg.u_max, cfg.u_max);
    sol.regimes = {Regime::slopeU};
    sol.b_star = cfg.a;
    sol.distribute_immediately = true;
    if (d_a > 0.0) {
        sol.value = 1.0 / cfg.model.nu2(cfg.a, cfg.a - d_a);
        sol.j_objective = -std::log(sol.value);
    } else {
        sol.value = 0.0;
        sol.j_objective = kInf;
    }
    sol.d_a = d_a;
    return sol;
}

PMPSolution solve_levy_fixed(const PMPConfig& cfg, double d_a) {
    const DriftedBmModel& m = cfg.model.base();
    const double u = cfg.u_max;
    const double a = cfg.a;

    auto g = [&](double d) { return levy_barrier_fn(m, d, u); };

    // barrier depths scanned over [d_a, d_a + 50 u / phi] on a geometric
    // offset mesh so both the 1/rho and 1/phi scales are resolved
    const double w_hi = 50.0 * u / m.phi_q + 5.0 / m.rho_q;
    auto g_off = [&](double w) { return g(d_a + w); };
    std::vector<double> d_roots;
    for (double w : scan_roots(g_off, 1e-9 * u, w_hi, 2048, true, 1e-15)) {
        d_roots.push_back(d_a + w);
    }
    d_roots = upward_roots(g, d_roots, 1.0 / m.phi_q, 0.0);

    std::optional<double> d_plus; // depth at the area horizon
    if (cfg.K) {
        const double b_plus = area_horizon(a, d_a, u, *cfg.K);
        d_plus = d_a + u * (b_plus - a);
    }

    // candidate depths: interior optima below the budget horizon, the budget
    // horizon itself, and the immediate-distribution corner when d_a > 0.
    // The objective minimum over [a, b+] sits at one of these.
    struct Candidate {
        double d;
        bool corner;
        bool at_budget;
    };
    std::vector<Candidate> cands;
    if (d_a > 0.0) cands.push_back({d_a, true, false});
    for (double d : d_roots) {
        if (!d_plus || d < *d_plus) cands.push_back({d, false, false});
    }
    if (d_plus) cands.push_back({*d_plus, false, true});
    if (cands.empty()) return degenerate_solution(cfg, d_a);

    const Candidate* best = nullptr;
    double best_psi = kInf;
    for (const Candidate& c : cands) {
        const double psi = levy_psi(m, c.d, u);
        if (psi < best_psi) {
            best_psi = psi;
            best = &c;
        }
    }
    if (best->corner) return degenerate_solution(cfg, d_a);

    PMPSolution sol;
    sol.d_a = d_a;
    sol.dd = affine_slope(a, d_a, u, cfg.u_max);
    sol.regimes = {Regime::slopeU};
    sol.b_star = a + (best->d - d_a) / u;
    const double d_b = best->d;
    if (best->at_budget) {
        sol.area_saturated = true;
        const double gb = g(d_b);
        sol.r = (gb < 0.0) ? -gb / d_b : 0.0;
    }
    sol.hamiltonian_residual = std::fabs(g(d_b) + sol.r * d_b);

    if (d_a > 0.0) {
        sol.value = std::exp(-(log_scale_w(m, d_b) - log_scale_w(m, d_a)) / u) /
                    nu(m, d_b);
        sol.j_objective = (log_scale_w(m, d_b) - log_scale_w(m, d_a)) / u +
                          std::log(nu(m, d_b));
    } else {
        sol.value = 0.0;
        sol.j_objective = kInf;
    }

    // closed-form costate: H is a first integral, H = 0 along the trajectory
    const int n = cfg.costate_mesh;
    sol.costate.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = a + (sol.b_star - a) * k / n;
        const double d = d_a + u * (t - a);
        if (!(d > 0.0)) continue;
        const double nv = nu(m, d);
        const double np = nu_prime(m, d);
        const double p = -(nv + sol.r * d) / u - np / nv;
        sol.costate.push_back({t, d, u, p, p + np / nv});
    }
    return sol;
}

// relative-objective ranking for the general transform: consecutive candidate
// gaps are integrated so a singular d(a) = 0 start never enters a quadrature
std::size_t rank_by_relative_j(const TransformModel& tm, const DrawdownFn& dd,
                               const std::vector<double>& bs) {
    std::size_t best = 0;
    double j = 0.0, best_j = 0.0;
    for (std::size_t i = 1; i < bs.size(); ++i) {
        j += integrate(
            [&](double y) {
                const double h = eval_dhat(dd, y);
                const double u = slope_at(dd, y);
                const double n = tm.nu2(y, h);
                return n + (tm.d1_nu2(y, h) + tm.d2_nu2(y, h) * (1.0 - u)) / n;
            },
            bs[i - 1], bs[i], kQuadTol);
        j += std::log(tm.nu2(bs[i], eval_dhat(dd, bs[i]))) -
             std::log(tm.nu2(bs[i - 1], eval_dhat(dd, bs[i - 1])));
        if (j < best_j) {
            best_j = j;
            best = i;
        }
    }
    return best;
}

std::vector<CostateSample> integrate_costate(const TransformModel& tm,
                                             const DrawdownFn& dd, double a, double b,
                                             double r, int mesh);

PMPSolution solve_affine_general(const PMPConfig& cfg, double d_a) {
    const TransformModel& tm = cfg.model;
    const double u = cfg.u_max;
    const double a = cfg.a;
    const DrawdownFn dd = affine_slope(a, d_a, u, cfg.u_max);

    auto g0 = [&](double b) {
        return hamiltonian(tm, b, eval_d(dd, b), u, 0.0, 0.0);
    };
    const double scale = 1.0 / tm.base().phi_q + d_a + 1.0 +
                         (std::isfinite(tm.domain_floor()) ? a - tm.domain_floor() : 0.0);
    auto g_off = [&](double w) { return g0(a + w); };
    std::vector<double> b_roots;
    for (double w : scan_roots(g_off, 1e-9 * scale, 200.0 * scale, 2048, true, 1e-14)) {
        b_roots.push_back(a + w);
    }
    b_roots = upward_roots(g0, b_roots, scale, a);

    std::optional<double> b_plus;
    if (cfg.K) b_plus = area_horizon(a, d_a, u, *cfg.K);

    // without a budget the objective may keep falling as b grows (the value is
    // then unbounded); detect it from the far-end sign before committing
    if (!b_plus && g0(a + 200.0 * scale) < 0.0) {
        throw NumericalError(
            "affine_candidate: no finite optimal horizon; the value grows with b "
            "(set an area budget K)");
    }

    std::vector<double> cands;
    const bool corner = d_a > 0.0;
    if (corner) cands.push_back(a);
    for (double b : b_roots) {
        if (!b_plus || b < *b_plus) cands.push_back(b);
    }
    if (b_plus) cands.push_back(*b_plus);
    if (cands.empty() || (corner && cands.size() == 1)) {
        return degenerate_solution(cfg, d_a);
    }

    const std::size_t pick = rank_by_relative_j(tm, dd, cands);
    if (corner && pick == 0) return degenerate_solution(cfg, d_a);

    PMPSolution sol;
    sol.d_a = d_a;
    sol.dd = dd;
    sol.regimes = {Regime::slopeU};
    sol.b_star = cands[pick];
    if (b_plus && sol.b_star == *b_plus) {
        sol.area_saturated = true;
        const double gb = g0(sol.b_star);
        const double db = eval_d(dd, sol.b_star);
        sol.r = (gb < 0.0) ? -gb / db : 0.0;
    }
    sol.hamiltonian_residual =
        std::fabs(hamiltonian(tm, sol.b_star, eval_d(dd, sol.b_star), u, 0.0, sol.r));
    if (d_a > 0.0) {
        sol.value = value(tm, dd, a, sol.b_star).value;
        sol.j_objective = objective_j(tm, dd, a, sol.b_star);
    } else {
        sol.value = 0.0;
        sol.j_objective = kInf;
    }
    sol.costate = integrate_costate(tm, dd, a, sol.b_star, sol.r, cfg.costate_mesh);
    return sol;
}

std::vector<CostateSample> integrate_costate(const TransformModel& tm,
                                             const DrawdownFn& dd, double a, double b,
                                             double r, int mesh) {
    // nodes aligned with draw-down breakpoints so u is constant per RK4 step;
    // a singular start (d(a) = 0) is left one step short
    std::vector<double> nodes;
    const double lo = (eval_d(dd, a) > 0.0) ? a : a + (b - a) / mesh;
    std::vector<double> cuts{lo};
    for (double s : dd.breakpoints) {
        if (s > lo && s < b) cuts.push_back(s);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const int steps = std::max(
            8, static_cast<int>(std::ceil(mesh * (cuts[i + 1] - cuts[i]) / (b - lo))));
        for (int k = 0; k < steps; ++k) {
            nodes.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * k / steps);
        }
    }
    nodes.push_back(b);

    std::vector<CostateSample> out(nodes.size());
    double p = 0.0;
    for (std::size_t idx = nodes.size(); idx-- > 0;) {
        const double t = nodes[idx];
        const double d = eval_d(dd, t);
        const double u = slope_at(dd, t);
        if (idx + 1 < nodes.size()) {
            const double t1 = nodes[idx + 1];
            const double h = t - t1; // negative: backward
            const double us = slope_at(dd, 0.5 * (t + t1));
            auto rhs = [&](double tt, double pp) {
                return costate_rhs(tm, tt, eval_d(dd, tt), us, pp, r);
            };
            const double k1 = rhs(t1, p);
            const double k2 = rhs(t1 + 0.5 * h, p + 0.5 * h * k1);
            const double k3 = rhs(t1 + 0.5 * h, p + 0.5 * h * k2);
            const double k4 = rhs(t1 + h, p + h * k3);
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out[idx] = {t, d, u, p, switching_value(tm, t, d, p)};
    }
    return out;
}

} // namespace

double hamiltonian(const TransformModel& tm, double t, double d, double u, double p,
                   double r) {
    if (!(d > 0.0)) throw ValidationError("hamiltonian: d must be > 0");
    const double y = t - d;
    const double n = tm.nu2(t, y);
    const double n2 = tm.d2_nu2(t, y);
    return n + (tm.d1_nu2(t, y) + n2) / n + (p - n2 / n) * u + r * d;
}

double costate_rhs(const TransformModel& tm, double t, double d, double u,
                   double /*p*/, double r) {
    if (!(d > 0.0)) throw ValidationError("costate_rhs: d must be > 0");
    const double y = t - d;
    const double n = tm.nu2(t, y);
    const double n1 = tm.d1_nu2(t, y);
    const double n2 = tm.d2_nu2(t, y);
    const double n12 = tm.d12_nu2(t, y);
    const double n22 = tm.d22_nu2(t, y);
    return n2 + (n12 + n22) / n - (n1 + n2) * n2 / (n * n) +
           (n2 * n2 - n22 * n) / (n * n) * u - r;
}

std::vector<double> structure_solve(const TransformModel& tm, double t, double r) {
    if (r < 0.0) throw ValidationError("structure_solve: r must be >= 0");
    if (tm.is_identity()) {
        // d2_nu(t, t - d) = -nu'(d) = r; -nu' falls monotonically from +inf to 0
        if (r == 0.0) return {};
        const DriftedBmModel& m = tm.base();
        auto f = [&](double d) { return -nu_prime(m, d) - r; };
        double lo = 1.0 / m.phi_q;
        while (f(lo) <= 0.0) {
            lo *= 0.5;
            if (lo < 1e-300) return {};
        }
        double hi = 2.0 * lo;
        while (f(hi) >= 0.0) {
            hi *= 2.0;
            if (hi > 1e15 / m.phi_q) return {};
        }
        return {brent_root(f, lo, hi, 1e-15)};
    }
    GbmStructureResult res = gbm_structure_solve(tm, t, r);
    std::vector<double> out;
    for (const auto& root : res.roots) out.push_back(root.d_opt);
    return out;
}

GbmStructureResult gbm_structure_solve(const TransformModel& tm, double x, double r) {
    if (tm.is_identity()) {
        throw ValidationError("gbm_structure_solve: log-affine transform required");
    }
    if (r < 0.0) throw ValidationError("gbm_structure_solve: r must be >= 0");
    const auto& tr = std::get<LogAffineTransform>(tm.transform());
    if (!(x > tm.domain_floor())) {
        throw ValidationError("gbm_structure_solve: x below -beta/alpha");
    }
    GbmStructureResult res;
    res.certificate = "inapplicable: log-affine transform is concave";
    if (r == 0.0) return res; // would force r_plus = r_minus

    const double rp = tm.r_plus();
    const double rm = tm.r_minus();
    const double gap = x + tr.beta / tr.alpha;
    const double log_rhs0 = std::log(r * gap * gap);

    // -mu'(D) = s (rp-rm)^2/(1-s)^2 with s = e^{(rm-rp)D}; compare in log space
    // against r (x + beta/alpha)^2 e^{-D}
    auto g_log = [&](double D) {
        const double e = (rm - rp) * D;
        return e + 2.0 * std::log(rp - rm) - 2.0 * std::log1p(-std::exp(e)) + D -
               log_rhs0;
    };
    const std::vector<double> deltas = scan_roots(g_log, 1e-9, 400.0, 1024, true, 1e-15);

    const double a2 = 0.5 * tr.eps * tr.eps * tr.alpha * tr.alpha;
    const double c1 = 1.0 - 2.0 / (tr.eps * tr.eps * tr.alpha);
    const double q = tm.base().q;
    for (double D : deltas) {
        GbmStructureRoot root;
        root.delta = D;
        root.d_opt = gap * (-std::expm1(-D));
        // defect of the exponential form: rp e^{rp D} - rm e^{rm D} versus the
        // explicit square-root branch times (e^{rp D} - e^{rm D})
        const double m =
            0.5 * (c1 + std::sqrt(c1 * c1 + 4.0 * q / a2 + 4.0 * r * gap * gap *
                                                               std::exp(-D)));
        const double lhs = rp * std::exp(rp * D) - rm * std::exp(rm * D);
        const double rhs = m * (std::exp(rp * D) - std::exp(rm * D));
        root.residual = std::fabs(lhs - rhs);
        res.roots.push_back(root);
    }
    res.multiple = res.roots.size() > 1;
    return res;
}

PMPSolution levy_optimal(const PMPConfig& cfg) {
    if (!cfg.model.is_identity()) {
        throw ValidationError("levy_optimal: identity transform required");
    }
    validate_config(cfg);
    if (cfg.d_a) return solve_levy_fixed(cfg, *cfg.d_a);
    PMPSolution low = solve_levy_fixed(cfg, 0.0);
    PMPSolution high = solve_levy_fixed(cfg, cfg.d_a_max);
    return (high.value >= low.value) ? high : low;
}

PMPSolution affine_candidate(const PMPConfig& cfg) {
    validate_config(cfg);
    if (cfg.model.is_identity()) return levy_optimal(cfg);
    if (cfg.d_a) return solve_affine_general(cfg, *cfg.d_a);
    // the value rises with d(a) pointwise, so a free datum resolves to the cap
    return solve_affine_general(cfg, cfg.d_a_max);
}

PMPSolution optimize(const PMPConfig& cfg) {
    return cfg.model.is_identity() ? levy_optimal(cfg) : affine_candidate(cfg);
}

PMPVerifyReport verify_pmp(const TransformModel& tm, const PMPSolution& sol,
                           const PMPConfig& cfg, double tol) {
    PMPVerifyReport rep;
    rep.tol = tol;
    rep.homogeneous = tm.is_identity();
    rep.p0_residual = kNaN;
    rep.structure_residual_pos = kNaN;
    rep.structure_residual_neg = kNaN;

    if (sol.distribute_immediately) {
        rep.degenerate = true;
        const double u = cfg.u_max;
        if (sol.d_a > 0.0) {
            rep.degenerate_margin =
                hamiltonian(tm, cfg.a, sol.d_a, u, 0.0, sol.r);
        } else if (rep.homogeneous) {
            // boundary limit of the barrier function at d -> 0+
            rep.degenerate_margin =
                (u < 1.0) ? kInf : tm.base().phi_q - tm.base().rho_q;
        } else {
            rep.degenerate_margin = hamiltonian(tm, cfg.a, 1e-8, u, 0.0, sol.r);
        }
        rep.pass = rep.degenerate_margin >= -tol;
        return rep;
    }

    const auto traj = integrate_costate(tm, sol.dd, cfg.a, sol.b_star, sol.r,
                                        cfg.costate_mesh);
    const CostateSample& last = traj.back();
    rep.p_terminal = std::fabs(last.p);
    rep.h_terminal =
        std::fabs(hamiltonian(tm, last.t, last.d, last.u, last.p, sol.r));

    double h_dev = 0.0, sw_breach = 0.0;
    double st_pos = 0.0, st_neg = 0.0;
    bool has_structure = false;
    for (const auto& s : traj) {
        if (rep.homogeneous) {
            h_dev = std::max(
                h_dev, std::fabs(hamiltonian(tm, s.t, s.d, s.u, s.p, sol.r)));
        }
        // regime of the segment in force at s.t
        std::size_t seg = 0;
        for (std::size_t i = 0; i < sol.dd.breakpoints.size(); ++i) {
            if (s.t >= sol.dd.breakpoints[i]) seg = i;
        }
        const Regime regime =
            seg < sol.regimes.size() ? sol.regimes[seg] : Regime::slopeU;
        switch (regime) {
            case Regime::slope0:
                sw_breach = std::max(sw_breach, -s.switching);
                break;
            case Regime::slopeU:
                sw_breach = std::max(sw_breach, s.switching);
                break;
            case Regime::structure: {
                sw_breach = std::max(sw_breach, std::fabs(s.switching));
                has_structure = true;
                const double d2 = tm.d2_nu2(s.t, s.t - s.d);
                st_pos = std::max(st_pos, std::fabs(d2 - sol.r));
                st_neg = std::max(st_neg, std::fabs(d2 + sol.r));
                break;
            }
        }
    }
    rep.h_max_deviation = rep.homogeneous ? h_dev : kNaN;
    rep.switching_violation = sw_breach;
    if (has_structure) {
        rep.structure_residual_pos = st_pos;
        rep.structure_residual_neg = st_neg;
    }

    const bool free_interior = !cfg.d_a && sol.d_a > 0.0 && sol.d_a < cfg.d_a_max;
    if (free_interior) {
        const CostateSample& first = traj.front();
        rep.p0_residual = std::fabs(first.p - tm.d2_nu2(first.t, first.t - first.d) /
                                                  tm.nu2(first.t, first.t - first.d));
    }

    rep.pass = rep.h_terminal < tol && rep.p_terminal < tol &&
               rep.switching_violation < tol &&
               (!rep.homogeneous || rep.h_max_deviation < tol) &&
               (!free_interior || rep.p0_residual < tol) &&
               (!has_structure || rep.structure_residual_pos < tol);
    return rep;
}

double xiopt_check(const TransformModel& tm, double b_star, double u_max, double a,
                   double d_a) {
    if (!tm.is_identity()) throw ValidationError("xiopt_check: identity transform required");
    if (!(u_max > 0.0) || u_max > 1.0) {
        throw ValidationError("xiopt_check: u_max must be in (0, 1]");
    }
    const DriftedBmModel& m = tm.base();
    const double d = d_a + u_max * (b_star - a);
    if (!(d > 0.0)) throw ValidationError("xiopt_check: d(b_star) must be > 0");
    const double s = std::exp(-(m.phi_q + m.rho_q) * d);
    const double one_minus_s = -std::expm1(-(m.phi_q + m.rho_q) * d);
    const double e1 = (m.phi_q + m.rho_q * s) / one_minus_s;
    const double e2 = (m.phi_q * m.phi_q - m.rho_q * m.rho_q * s) / one_minus_s;
    const double xi = 1.0 - u_max;
    return e2 / (e1 * e1) + xi / (1.0 - xi);
}

} // namespace ddopt
