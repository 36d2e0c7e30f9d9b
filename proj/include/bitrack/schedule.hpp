#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bitrack/core.hpp"
#include "bitrack/signed_graph.hpp"

namespace bitrack {

// Per-follower communication instants {s^i_k}: s^i_0 = 0 and consecutive gaps
// in {1..h}.
struct AsyncSchedule {
    int n = 0;
    int h = 1;
    std::vector<std::vector<int>> instants;

    bool active(int agent, int k) const;
    std::vector<bool> active_mask(int k) const;
};

AsyncSchedule generate_async(int n, int horizon, int h, std::uint64_t seed);
bool validate_async(const AsyncSchedule& s);

// Synchronous special case (every agent active at every step).
AsyncSchedule synchronous_schedule(int n, int horizon);

// Per-edge, per-step transmission delays in {0..sigma_max}. Column n holds the
// leader-edge delay. Draws are keyed by (seed, k, i, j) so any (k, i, j) can be
// queried independently; an explicit table overrides the seeded stream.
struct DelayProcess {
    int n = 0;
    int sigma_max = 0;
    std::uint64_t seed = 0;
    std::optional<std::vector<Eigen::MatrixXi>> table;  // per step, n x (n+1)

    int delay(int k, int i, int j) const;         // follower edge j -> i
    int leader_delay(int k, int i) const;         // edge v_0 -> v_i
};

DelayProcess sample_delays(const SignedDigraph& g, int sigma_max, std::uint64_t seed);

// Bernoulli packet-arrival process: theta(k) = 1 with probability theta_bar.
struct LossProcess {
    double theta_bar = 1.0;
    std::uint64_t seed = 0;
    std::optional<std::vector<std::uint8_t>> table;

    bool delivered(int k) const;
};

LossProcess sample_losses(double theta_bar, std::uint64_t seed);

// Random signed network: edge (j -> i) appears at step k with probability
// probs(i, j) carrying weight weights.adj(i, j); same for leader edges.
struct RandomSignedNetwork {
    SignedDigraph weights;
    Matrix probs;          // n x n
    Vector leader_probs;   // n
    std::uint64_t seed = 0;

    void validate() const;
    SignedDigraph expected() const;  // entries p_ij * w_ij
};

SignedDigraph realize_network(const RandomSignedNetwork& r, int k);

}  // namespace bitrack
