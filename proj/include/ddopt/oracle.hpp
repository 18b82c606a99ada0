#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddopt/models.hpp"
#include "ddopt/pontryagin.hpp"

namespace ddopt {

// Brute-force check of the variational solution: enumerate every bang-bang
// control word in {0, u_max}^n_segments over [a, b] for every candidate b,
// evaluate the exact objective by quadrature, keep the feasible minimizer.
struct OracleConfig {
    double a = 0.0;
    double d_a = 1.0;
    double u_max = 1.0;
    std::optional<double> K;
    int n_segments = 8;
    std::vector<double> b_grid;
    TransformModel model;
};

struct OracleResult {
    std::vector<double> best_control; // per-segment slopes, each 0 or u_max
    double best_b = 0.0;
    double best_j = 0.0;
    double best_value = 0.0;
    std::int64_t feasible_count = 0;
    std::uint32_t best_word = 0;       // bit n_segments-1-i is segment i
    double second_best_j = 0.0;        // best over b of the runner-up word
    std::uint32_t second_best_word = 0;
};

// one row per (control word, horizon) candidate; for CSV dumps
struct OracleCandidate {
    std::uint32_t word = 0;
    double b = 0.0;
    double j = 0.0;
    double area = 0.0;
    bool feasible = false;
};

OracleResult enumerate_controls(const OracleConfig& cfg,
                                std::vector<OracleCandidate>* dump = nullptr);
OracleResult enumerate_controls_serial(const OracleConfig& cfg,
                                       std::vector<OracleCandidate>* dump = nullptr);

// draw-down profile of a control word on [a, b]
DrawdownFn word_to_drawdown(const OracleConfig& cfg, std::uint32_t word, double b);

struct OracleCompareReport {
    double j_pmp = 0.0;
    double j_oracle = 0.0;
    double gap = 0.0;   // j_pmp - j_oracle, negative or ~0 expected
    double slack = 0.0; // discretization allowance u_max (b-a)/n * Lipschitz bound
    bool pass = false;  // j_pmp <= j_oracle + slack
    bool oracle_beats_beyond_slack = false;
};

// Same-config consistency is enforced; throws ValidationError on mismatch.
OracleCompareReport compare_with_pmp(const OracleResult& oracle,
                                     const OracleConfig& ocfg, const PMPSolution& pmp,
                                     const PMPConfig& pcfg);

} // namespace ddopt
