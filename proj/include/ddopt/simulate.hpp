#pragma once

#include <cstdint>

#include "ddopt/drawdown.hpp"
#include "ddopt/models.hpp"

namespace ddopt {

// Euler-Maruyama simulation of the barrier-reflected diffusion with
// generalized draw-down stopping. Paths are independent and carry their own
// counter-based random stream keyed by (seed, path index), so results are
// reproducible and independent of the execution order.
struct SimConfig {
    double dt = 1e-4;
    std::int64_t n_paths = 100'000;
    std::uint64_t seed = 1;
    double t_max = 0.0; // <= 0: derived from discount_floor
    double b = 0.0;
    double x0 = 0.0;
    TransformModel model;
    DrawdownFn dd;
    double discount_floor = 1e-8; // cap on e^{-q t_max}
};

struct SimResult {
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t n_effective = 0;  // paths resolved before t_max
    double truncated_fraction = 0.0;
    double runtime_s = 0.0;
};

// Discounted dividends of the barrier strategy until the draw-down time,
// started at x0 = running max <= b. Overshoots above b are credited as
// dividends and the state clamped back (naive reflection).
SimResult simulate_value(const SimConfig& cfg);
SimResult simulate_value_serial(const SimConfig& cfg);

// E[e^{-q tau_b}; tau_b < draw-down time], absorbing at b, no reflection.
SimResult simulate_survival_factor(const SimConfig& cfg, double x, double b);
SimResult simulate_survival_factor_serial(const SimConfig& cfg, double x, double b);

} // namespace ddopt
