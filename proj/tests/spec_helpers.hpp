#pragma once

// Scenario fixtures shared by the dynamics/sim unit tests and the acceptance
// suite: the preset examples plus synthetic specs for the kinds that have no
// preset of their own.

#include "bitrack/dynamics.hpp"
#include "bitrack/presets.hpp"

namespace bitrack::testspec {

inline SignedDigraph chain_graph_57() {
    SignedDigraph g = SignedDigraph::zero(6);
    g.leader(0) = 1.0;
    g.leader(3) = -1.0;
    g.adj(1, 0) = 1.0;
    g.adj(2, 1) = 1.0;
    g.adj(4, 3) = 1.0;
    g.adj(5, 4) = 1.0;
    return g;
}

inline Matrix default_x_init() {
    Matrix x(6, 1);
    x << 2.0, -1.0, 1.5, -2.0, 1.0, -1.5;
    return x;
}

inline Matrix default_v_init() {
    Matrix v(6, 1);
    v << 0.2, -0.2, 0.1, -0.1, 0.3, -0.3;
    return v;
}

// sec. 7: delays on the example-4.5 topology.
inline ScenarioSpec delay_spec(int sigma_max = 2, int horizon = 400) {
    ScenarioSpec s = load_preset("example-4.5");
    s.kind = ScenarioKind::SecondOrderDelay;
    s.name = "delay-test";
    s.sigma_max = sigma_max;
    s.horizon = horizon;
    s.h = 1;
    return s;
}

// sec. 8.2: two alternating 2-follower graphs, one interval per step, with
// gains satisfying (8.19) and (8.20).
inline ScenarioSpec switch_active_spec(int horizon = 14000) {
    ScenarioSpec s;
    s.kind = ScenarioKind::SwitchActive;
    s.name = "switch-active-test";
    SignedDigraph ga = SignedDigraph::zero(2);
    ga.leader(0) = 1.0;
    ga.adj(1, 0) = -1.0;
    SignedDigraph gb = SignedDigraph::zero(2);
    gb.leader(1) = -1.0;
    gb.adj(0, 1) = -1.0;
    s.switching.graphs = {ga, gb};
    s.switching.signal = {0, 1};
    s.switching.bounds = {0, 1, 2};
    s.gains.tau = 0.01;
    s.gains.beta = 10.0;
    s.gains.alpha = 1.01;
    s.horizon = horizon;
    s.x_init = Matrix(2, 1);
    s.x_init << 1.5, -0.5;
    s.v_init = Matrix::Zero(2, 1);
    s.leader.x0 = Vector::Zero(1);
    s.leader.theta0 = Vector::Constant(1, 0.4);
    s.seed = 7;
    return s;
}

// Two-follower signed chain: leader -> 1 (cooperative), 1 -> 2 (competitive);
// P = 2, d_M = b_m = 1.
inline SignedDigraph chain_graph_2() {
    SignedDigraph g = SignedDigraph::zero(2);
    g.leader(0) = 1.0;
    g.adj(1, 0) = -1.0;
    return g;
}

// sec. 9 on the 2-follower chain; gains satisfy (9.4) with P = 2 (phi = 0.5,
// requirement (alpha^2 - 1)/(tau b_m phi) = 3.36 < beta = 4 <= 8).
inline ScenarioSpec packet_loss_spec(double theta_bar, int horizon = 1000) {
    ScenarioSpec s;
    s.kind = ScenarioKind::PacketLoss;
    s.name = "packet-loss-test";
    s.graph = chain_graph_2();
    s.gains.tau = 0.125;
    s.gains.beta = 4.0;
    s.gains.alpha = 1.1;
    s.theta_bar = theta_bar;
    s.horizon = horizon;
    s.x_init = Matrix(2, 1);
    s.x_init << 2.0, -1.5;
    s.v_init = Matrix(2, 1);
    s.v_init << 0.3, -0.2;
    s.leader.x0 = Vector::Zero(1);
    s.leader.theta0 = Vector::Constant(1, 0.5);
    s.seed = 9;
    return s;
}

// sec. 10 on the same chain with uniform edge probability; gains satisfy
// (10.3) at prob = 0.5.
inline ScenarioSpec random_network_spec(double prob, int horizon = 800) {
    ScenarioSpec s;
    s.kind = ScenarioKind::RandomNetwork;
    s.name = "random-network-test";
    s.random_net.weights = chain_graph_2();
    s.random_net.probs = Matrix::Constant(2, 2, prob);
    s.random_net.leader_probs = Vector::Constant(2, prob);
    s.random_net.seed = 2;
    s.gains.tau = 0.2;
    s.gains.beta = 5.0;
    s.gains.alpha = 1.1;
    s.horizon = horizon;
    s.x_init = Matrix(2, 1);
    s.x_init << 2.0, -1.5;
    s.v_init = Matrix(2, 1);
    s.v_init << 0.3, -0.2;
    s.leader.x0 = Vector::Zero(1);
    s.leader.theta0 = Vector::Constant(1, 0.5);
    s.seed = 10;
    return s;
}

// sec. 11.1 on the example-4.5 topology, +10% disturbance on two edges.
inline ScenarioSpec disturb_static_spec(int horizon = 500) {
    ScenarioSpec s = load_preset("example-4.5");
    s.kind = ScenarioKind::DisturbStatic;
    s.name = "disturb-static-test";
    s.horizon = horizon;
    DisturbanceSpec d;
    d.delta_adj = Matrix::Zero(6, 6);
    d.delta_leader = Vector::Zero(6);
    d.delta_adj(1, 0) = 0.1;    // a_21 = 1 -> 1.1
    d.delta_adj(4, 0) = -0.1;   // a_51 = -1 -> -1.1
    d.delta_leader(3) = -0.05;  // a_40 = -1 -> -1.05
    s.disturbance = d;
    return s;
}

// sec. 11.2 on the two-chain topology.
inline ScenarioSpec disturb_active_spec(int horizon = 3000) {
    ScenarioSpec s;
    s.kind = ScenarioKind::DisturbActive;
    s.name = "disturb-active-test";
    s.graph = chain_graph_57();
    s.gains.tau = 0.02;
    s.gains.beta = 35.0;
    s.gains.alpha = 1.01;
    s.horizon = horizon;
    DisturbanceSpec d;
    d.delta_adj = Matrix::Zero(6, 6);
    d.delta_leader = Vector::Zero(6);
    d.delta_adj(1, 0) = 0.1;
    d.delta_adj(4, 3) = 0.08;
    d.delta_leader(0) = 0.05;
    s.disturbance = d;
    s.x_init = default_x_init();
    s.v_init = default_v_init();
    s.leader.x0 = Vector::Zero(1);
    s.leader.theta0 = Vector::Constant(1, 0.5);
    s.seed = 11;
    return s;
}

// sec. 12 with seeded uniform noise instead of the sinusoid preset.
inline ScenarioSpec noise_random_spec(std::uint64_t noise_seed, int horizon = 1200) {
    ScenarioSpec s = load_preset("example-12.7");
    s.noise.kind = NoiseSpec::Kind::RandomUniform;
    s.noise.bound = 0.5;
    s.noise.seed = noise_seed;
    s.horizon = horizon;
    return s;
}

}  // namespace bitrack::testspec
