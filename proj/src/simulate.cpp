#include "ddopt/simulate.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "ddopt/errors.hpp"

namespace ddopt {

namespace {

// splitmix64: a counter-based generator; one independent stream per path,
// keyed by (seed, path index)
struct PathRng {
    std::uint64_t state;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    PathRng(std::uint64_t seed, std::uint64_t path)
        : state(mix(seed) ^ mix(path * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EEFC9ULL)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on (0, 1]
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Box-Muller pair, second draw cached
    bool have_spare = false;
    double spare = 0.0;

    double next_normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double r = std::sqrt(-2.0 * std::log(next_unit()));
        const double theta = 2.0 * std::numbers::pi * next_unit();
        spare = r * std::sin(theta);
        have_spare = true;
        return r * std::cos(theta);
    }
};

struct Dynamics {
    double mu0, sig0;   // identity coefficients
    double alpha, beta; // log-affine: drift (alpha x + beta), vol eps(alpha x + beta)
    double eps;
    bool affine;

    explicit Dynamics(const TransformModel& tm) {
        if (tm.is_identity()) {
            affine = false;
            mu0 = tm.base().mu;
            sig0 = tm.base().sigma;
            alpha = beta = eps = 0.0;
        } else {
            affine = true;
            const auto& t = std::get<LogAffineTransform>(tm.transform());
            alpha = t.alpha;
            beta = t.beta;
            eps = t.eps;
            mu0 = sig0 = 0.0;
        }
    }

    double drift(double x) const { return affine ? alpha * x + beta : mu0; }
    double vol(double x) const { return affine ? eps * (alpha * x + beta) : sig0; }
};

struct PathOutcome {
    double payoff = 0.0;
    bool truncated = false;
};

double resolve_t_max(const SimConfig& cfg) {
    const double q = cfg.model.base().q;
    const double needed = -std::log(cfg.discount_floor) / q;
    if (cfg.t_max > 0.0) {
        if (std::exp(-q * cfg.t_max) > cfg.discount_floor) {
            throw ValidationError(
                "SimConfig: t_max too small, e^{-q t_max} above the discount floor");
        }
        return cfg.t_max;
    }
    return needed;
}

void validate_common(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ValidationError("SimConfig: dt must be > 0");
    if (cfg.n_paths < 1) throw ValidationError("SimConfig: n_paths must be >= 1");
    if (!(cfg.discount_floor > 0.0 && cfg.discount_floor < 1.0)) {
        throw ValidationError("SimConfig: discount_floor must be in (0, 1)");
    }
    const auto rep = validate(cfg.dd);
    if (!rep.ok) throw ValidationError("SimConfig: invalid draw-down: " + rep.violation);
}

// Trailing-stop test with the first segment extended linearly below a, so
// starts under the draw-down start abscissa still stop sensibly. Single
// segment profiles (the common case) reduce to one fused multiply.
struct StopRule {
    const DrawdownFn* dd;
    bool affine;
    double c1, c0; // dhat(m) = c1 m + c0 when affine

    explicit StopRule(const DrawdownFn& d) : dd(&d) {
        affine = d.breakpoints.size() == 1;
        const double u0 = d.slopes.front();
        c1 = 1.0 - u0;
        c0 = u0 * d.a - d.d_a;
    }

    bool stopped(double running_max, double x) const {
        if (affine || running_max < dd->a) return x < c1 * running_max + c0;
        return x < eval_dhat(*dd, running_max);
    }
};

PathOutcome run_value_path(const SimConfig& cfg, const Dynamics& dyn,
                           const StopRule& stop, double t_max, std::int64_t path) {
    PathRng rng(cfg.seed, static_cast<std::uint64_t>(path));
    const double q = cfg.model.base().q;
    const double sqrt_dt = std::sqrt(cfg.dt);
    const double decay = std::exp(-q * cfg.dt);
    const auto n_steps = static_cast<std::int64_t>(std::ceil(t_max / cfg.dt));
    double x = cfg.x0;
    double xbar = cfg.x0;
    double disc = 1.0;
    double pay = 0.0;
    if (stop.stopped(xbar, x)) return {0.0, false};
    for (std::int64_t k = 0; k < n_steps; ++k) {
        disc *= decay;
        x += dyn.drift(x) * cfg.dt + dyn.vol(x) * sqrt_dt * rng.next_normal();
        if (x > cfg.b) {
            pay += disc * (x - cfg.b);
            x = cfg.b;
        }
        if (x > xbar) xbar = x;
        if (stop.stopped(xbar, x)) return {pay, false};
    }
    return {pay, true};
}

PathOutcome run_survival_path(const SimConfig& cfg, const Dynamics& dyn,
                              const StopRule& stop, double t_max, double x_start,
                              double b, std::int64_t path) {
    PathRng rng(cfg.seed, static_cast<std::uint64_t>(path));
    const double q = cfg.model.base().q;
    const double sqrt_dt = std::sqrt(cfg.dt);
    const double decay = std::exp(-q * cfg.dt);
    const auto n_steps = static_cast<std::int64_t>(std::ceil(t_max / cfg.dt));
    double x = x_start;
    double xbar = x_start;
    double disc = 1.0;
    if (x >= b) return {1.0, false};
    if (stop.stopped(xbar, x)) return {0.0, false};
    for (std::int64_t k = 0; k < n_steps; ++k) {
        disc *= decay;
        x += dyn.drift(x) * cfg.dt + dyn.vol(x) * sqrt_dt * rng.next_normal();
        if (x >= b) return {disc, false};
        if (x > xbar) xbar = x;
        if (stop.stopped(xbar, x)) return {0.0, false};
    }
    return {0.0, true};
}

template <typename PathFn>
SimResult reduce_paths(std::int64_t n, bool parallel, PathFn&& run) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> payoff(static_cast<std::size_t>(n));
    std::vector<unsigned char> truncated(static_cast<std::size_t>(n));
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
        for (std::int64_t i = 0; i < n; ++i) {
            const PathOutcome o = run(i);
            payoff[static_cast<std::size_t>(i)] = o.payoff;
            truncated[static_cast<std::size_t>(i)] = o.truncated ? 1 : 0;
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            const PathOutcome o = run(i);
            payoff[static_cast<std::size_t>(i)] = o.payoff;
            truncated[static_cast<std::size_t>(i)] = o.truncated ? 1 : 0;
        }
    }
    // deterministic reduction in path order
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t n_trunc = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double v = payoff[static_cast<std::size_t>(i)];
        sum += v;
        sum_sq += v * v;
        n_trunc += truncated[static_cast<std::size_t>(i)];
    }
    SimResult res;
    res.mean = sum / static_cast<double>(n);
    const double var =
        (n > 1) ? std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) /
                                    static_cast<double>(n - 1))
                : 0.0;
    res.std_err = std::sqrt(var / static_cast<double>(n));
    res.n_effective = n - n_trunc;
    res.truncated_fraction = static_cast<double>(n_trunc) / static_cast<double>(n);
    res.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

SimResult value_impl(const SimConfig& cfg, bool parallel) {
    validate_common(cfg);
    if (cfg.x0 > cfg.b) {
        throw ValidationError("simulate_value: x0 must be <= b (start at the maximum)");
    }
    const double t_max = resolve_t_max(cfg);
    const Dynamics dyn(cfg.model);
    const StopRule stop(cfg.dd);
    return reduce_paths(cfg.n_paths, parallel, [&](std::int64_t i) {
        return run_value_path(cfg, dyn, stop, t_max, i);
    });
}

SimResult survival_impl(const SimConfig& cfg, double x, double b, bool parallel) {
    validate_common(cfg);
    if (x > b) throw ValidationError("simulate_survival_factor: x must be <= b");
    const double t_max = resolve_t_max(cfg);
    const Dynamics dyn(cfg.model);
    const StopRule stop(cfg.dd);
    return reduce_paths(cfg.n_paths, parallel, [&](std::int64_t i) {
        return run_survival_path(cfg, dyn, stop, t_max, x, b, i);
    });
}

} // namespace

SimResult simulate_value(const SimConfig& cfg) { return value_impl(cfg, true); }
SimResult simulate_value_serial(const SimConfig& cfg) { return value_impl(cfg, false); }

SimResult simulate_survival_factor(const SimConfig& cfg, double x, double b) {
    return survival_impl(cfg, x, b, true);
}
SimResult simulate_survival_factor_serial(const SimConfig& cfg, double x, double b) {
    return survival_impl(cfg, x, b, false);
}

} // namespace ddopt
