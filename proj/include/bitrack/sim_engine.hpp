#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitrack/dynamics.hpp"

namespace bitrack {

struct TraceRow {
    int k = 0;
    double t = 0.0;
    Vector x0, v0;
    Matrix x, v;
    double err_pos = 0.0;
    double err_vel = 0.0;
};

struct SimulationTrace {
    std::vector<TraceRow> rows;  // horizon + 1 entries
    std::uint64_t seed = 0;
    std::string spec_digest;
    // Max divergence between agent-level error coordinates and the matrix
    // recursion, when the dual check ran (-1 otherwise).
    double max_dual_divergence = -1.0;
};

struct RunOptions {
    bool dual_check = true;
};

SimulationTrace run(const ScenarioSpec& spec, const RunOptions& opts = {});

struct ConvergenceVerdict {
    bool tracked = false;          // bounded-tracking verdict for sec. 12/13 kinds
    bool bounded_kind = false;
    int k_converged = -1;
    double tail_error = 0.0;
    double threshold = 0.0;        // the comparison threshold actually used
    double residual_bound = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double cond_J = std::numeric_limits<double>::quiet_NaN();
};

ConvergenceVerdict verdict(const SimulationTrace& trace, const ScenarioSpec& spec,
                           double tail_fraction, double threshold);

// Theoretical residual bound omega_bar tau ||J^-1|| ||J|| (1-rho)^-1 from the
// eigendecomposition of the error-system matrix (Noise / UnmeasurableLeader).
struct ResidualBound {
    double bound = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double cond_J = std::numeric_limits<double>::quiet_NaN();
};
ResidualBound residual_bound(const ScenarioSpec& spec);

struct MonteCarloResult {
    int replicates = 0;
    std::vector<double> mean_err;   // per step, mean combined error norm
    std::vector<double> se_err;     // standard error of that mean
    std::vector<char> tracked;      // per replicate
    double fraction_tracked = 0.0;
    double tail_mean_err = 0.0;

    std::vector<int> checkpoints;
    std::vector<Matrix> mc_mean_state;   // stacked error mean at checkpoints
    std::vector<Matrix> mc_se_state;     // componentwise standard error
    std::vector<Matrix> expected_state;  // expectation-recursion state
    double max_sigma_deviation = 0.0;    // max |mean - expected| / SE
};

MonteCarloResult monte_carlo(const ScenarioSpec& spec, int replicates, std::uint64_t seed0);

// Expectation recursion of the stacked error state (exact for PacketLoss and
// RandomNetwork; the per-step matrix sequence otherwise).
std::vector<Matrix> expectation_trajectory(const ScenarioSpec& spec,
                                           const std::vector<int>& checkpoints);

// Infinity norms of the window products of the error-system matrices, windows
// [j stride, j stride + window_len) for j = 0..num_windows-1 (stride defaults
// to window_len).
std::vector<double> window_contraction_scan(const ScenarioSpec& spec, int window_len,
                                            int num_windows, int stride = -1);

}  // namespace bitrack
