#pragma once

#include <optional>
#include <vector>

#include "bitrack/core.hpp"

namespace bitrack {

// Signed leader-follower digraph. adj(i, j) = a_ij is the weight of the edge
// (v_j, v_i): follower j's information as seen by follower i. leader(i) = a_i0.
// Follower indices are 0-based internally; file formats are 1-based.
struct SignedDigraph {
    int n = 0;
    Matrix adj;
    Vector leader;

    static SignedDigraph zero(int n);

    void validate() const;  // throws ConfigError on self-loops / non-finite / bad shape

    bool has_edge(int i, int j) const { return adj(i, j) != 0.0; }
    bool has_leader_edge(int i) const { return leader(i) != 0.0; }

    // D = diag(sum_j |a_ij|)
    Matrix degree_matrix() const;
    // B = diag(|a_i0|)
    Matrix leader_matrix() const;
    // H = D + B - |A|
    Matrix interaction_matrix() const;
};

struct GaugePartition {
    Eigen::VectorXi sigma;  // entries in {+1, -1}; leader fixed to +1

    bool consistent_with(const SignedDigraph& g) const;
};

// Outcome of the structural-balance (C1) check. Either a gauge partition or a
// witness cycle with negative sign product (vertices over the undirected
// support; -1 denotes the leader).
struct BalanceResult {
    std::optional<GaugePartition> partition;
    std::vector<int> witness_cycle;

    bool balanced() const { return partition.has_value(); }
};

BalanceResult gauge_partition(const SignedDigraph& g);

// Condition C2: a directed path from the leader to every follower.
struct Reachability {
    bool holds = false;
    int eccentricity = 0;           // P = max_i d(v_0, v_i); 0 when n = 0
    std::vector<int> unreachable;   // followers with no path from the leader
    std::vector<int> distance;      // d(v_0, v_i); -1 when unreachable
};

Reachability leader_reaches_all(const SignedDigraph& g);

struct GraphConstants {
    double d_M = 0.0;                 // max_i sum_j |a_ij| + |a_i0|
    std::optional<double> b_m;        // min positive |a_i0|; absent without leader edges
    int P = 0;                        // leader eccentricity; 0 when C2 fails
    bool reaches_all = false;
    double rho_lower = 0.0;           // min / max modulus over all edge weights
    double rho_upper = 0.0;
};

GraphConstants graph_constants(const SignedDigraph& g);

// Switching topology (C4). The signal is periodic: graph_at(k) =
// signal[k mod period]; intervals repeat with the period. bounds holds the
// interval boundaries within one period, starting at 0 and ending at period.
struct SwitchingSequence {
    std::vector<SignedDigraph> graphs;
    std::vector<int> signal;   // length = period, values index into graphs
    std::vector<int> bounds;   // 0 = b_0 < b_1 < ... < b_m = period

    void validate() const;
    int period() const { return static_cast<int>(signal.size()); }
    int graph_index_at(int k) const { return signal[k % period()]; }
    const SignedDigraph& graph_at(int k) const { return graphs[graph_index_at(k)]; }

    int intervals_per_period() const { return static_cast<int>(bounds.size()) - 1; }
    // s_j of condition C4, extended periodically.
    int interval_start(int j) const;
    // varsigma: max number of steps in any interval
    int varsigma() const;
};

SignedDigraph union_graph(const SwitchingSequence& seq, int interval_index);

}  // namespace bitrack
