#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bitrack/core.hpp"
#include "bitrack/schedule.hpp"
#include "bitrack/signed_graph.hpp"
#include "bitrack/stochastic_matrix.hpp"

namespace bitrack {

enum class ScenarioKind {
    FirstOrderAsync,        // sec. 3 protocol
    SecondOrderStaticAsync, // sec. 4
    SecondOrderActiveAsync, // sec. 5
    GeneralLinearAsync,     // sec. 6
    SecondOrderDelay,       // sec. 7
    SwitchStatic,           // sec. 8.1
    SwitchActive,           // sec. 8.2
    PacketLoss,             // sec. 9
    RandomNetwork,          // sec. 10
    DisturbStatic,          // sec. 11.1
    DisturbActive,          // sec. 11.2
    Noise,                  // sec. 12
    UnmeasurableLeader,     // sec. 13
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct GainParameters {
    double tau = 0.0;      // update step size
    double psi = 0.0;      // first-order gain
    double gamma = 0.0;    // static-leader second-order gain
    double beta = 0.0;     // active-leader velocity gain
    double alpha = 0.0;    // model-transform constant (> 1)
    double psi_star = 0.0; // general-linear gain
    double phi1 = 0.0;     // estimation gains (sec. 13)
    double phi2 = 0.0;
};

struct NoiseSpec {
    enum class Kind { None, Sinusoid, RandomUniform };
    Kind kind = Kind::None;
    double amplitude = 0.0;  // sinusoid: amplitude * sin(freq * k)
    double freq = 0.0;
    double bound = 0.0;      // omega_bar; also clamps out-of-range signals
    std::uint64_t seed = 0;

    // Per-agent noise at step k, clamped to [-bound, bound].
    double sample(int agent, int k) const;
};

struct LeaderSpec {
    Vector x0;            // initial position (p)
    Vector theta0;        // constant velocity (active-leader kinds)
    double accel_base = 0.0;  // a_0(k), the broadcast acceleration estimate
    double accel_amp = 0.0;   // a(k) = accel_base + accel_amp * sin(accel_freq * k)
    double accel_freq = 0.0;

    double accel_estimate(int) const { return accel_base; }
    double accel_true(int k) const;
    double zeta(int k) const { return accel_true(k) - accel_estimate(k); }
};

struct DisturbanceSpec {
    Matrix delta_adj;     // same sign pattern as the graph adjacency
    Vector delta_leader;
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::FirstOrderAsync;
    std::string name;
    SignedDigraph graph;           // all kinds except switching
    SwitchingSequence switching;   // SwitchStatic / SwitchActive
    GainParameters gains;
    int horizon = 0;
    int p = 1;                     // per-coordinate state dimension
    int h = 1;                     // async max gap
    std::uint64_t seed = 0;

    Matrix x_init;                 // n x p
    Matrix v_init;                 // n x p (second-order kinds)
    LeaderSpec leader;

    Matrix A, B;                   // general linear (A: p x p, B: p x q)
    int sigma_max = 0;             // delays
    std::optional<std::vector<Eigen::MatrixXi>> delay_table;  // explicit replay tables
    double theta_bar = 1.0;        // packet loss
    std::optional<std::vector<std::uint8_t>> loss_table;
    RandomSignedNetwork random_net;
    std::optional<DisturbanceSpec> disturbance;
    NoiseSpec noise;
    double zeta_bar = 0.0;         // acceleration error bound (sec. 13)

    std::optional<AsyncSchedule> explicit_schedule;
    int P_override = -1;           // leader eccentricity used by gates when the
                                   // source example states one explicitly
    double threshold = 1e-3;
    double tail_fraction = 0.2;

    const SignedDigraph& base_graph() const;
    bool is_switching() const {
        return kind == ScenarioKind::SwitchStatic || kind == ScenarioKind::SwitchActive;
    }
    bool is_async() const {
        return kind == ScenarioKind::FirstOrderAsync ||
               kind == ScenarioKind::SecondOrderStaticAsync ||
               kind == ScenarioKind::SecondOrderActiveAsync ||
               kind == ScenarioKind::GeneralLinearAsync;
    }
    bool second_order() const { return kind != ScenarioKind::FirstOrderAsync; }
    bool bounded_tracking_kind() const {
        return kind == ScenarioKind::Noise || kind == ScenarioKind::UnmeasurableLeader;
    }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Error-system coefficient builders. `active` masks rows of D(k), B(k), A(k)
// for the asynchronous kinds; pass all-true for synchronous protocols.

// M(k) = I - tau psi D(k) - tau psi B(k) + tau psi |A(k)|
Matrix build_first_order(const SignedDigraph& g, const std::vector<bool>& active,
                         const GainParameters& gp);

// C(k): 2n x 2n block matrix of the static-leader second-order error system
Matrix build_second_order_static(const SignedDigraph& g, const std::vector<bool>& active,
                                 const GainParameters& gp);

struct ActivePair {
    Matrix H;    // signed error-system matrix
    Matrix Psi;  // |H|, the super-stochastic companion
};

// H(k) and Psi(k) of the active-leader second-order error system
ActivePair build_second_order_active(const SignedDigraph& g, const std::vector<bool>& active,
                                     const GainParameters& gp);

// Q(k) = I - psi* D(k) - psi* B(k) + psi* |A(k)| (general linear; no tau)
Matrix build_general_linear(const SignedDigraph& g, const std::vector<bool>& active,
                            const GainParameters& gp);

// Lifted digraph of [[1, 0], [q(k), Psi(k)]] on 2n+1 vertices; edge (j -> i)
// iff entry (i, j) > tol. Vertex 0 is the augmented source.
EdgeSet build_lifted_digraph(const Matrix& Psi, double tol = kTol);

// E(k): (2 sigma* n) x (2 sigma* n) delay-augmented companion matrix
Matrix build_delay(const SignedDigraph& g, const DelayProcess& delays, int k,
                   const GainParameters& gp);

// Phi_k for the switching static-leader case (full activity on graph gk)
Matrix build_switch_static(const SignedDigraph& gk, const GainParameters& gp);
// N_k and Gamma_k for the switching active-leader case
ActivePair build_switch_active(const SignedDigraph& gk, const GainParameters& gp);

// H (synchronous active-leader matrix) and H* (open-loop step) for packet loss
struct LossMatrices {
    Matrix H;
    Matrix Psi;
    Matrix H_star;
};
LossMatrices build_loss(const SignedDigraph& g, const GainParameters& gp);

// E[H-bar] of the random-network expectation recursion
Matrix build_expected(const RandomSignedNetwork& net, const GainParameters& gp);

// Graph with entries a_ij + delta a_ij; throws on sign-pattern mismatch.
SignedDigraph disturbed_graph(const SignedDigraph& g, const DisturbanceSpec& d);

struct NoiseSystem {
    Matrix Omega1;  // [[I, tau I], [-tau Hm, I - beta tau Hm]]
    Matrix Omega2;  // [0; tau I]
};
NoiseSystem build_noise_system(const SignedDigraph& g, const GainParameters& gp);

struct EstimationSystem {
    Matrix Upsilon1;
    Matrix Upsilon2;  // [tau^2/2 1; tau 1]
};
EstimationSystem build_estimation_system(const SignedDigraph& g, const GainParameters& gp);

// ---------------------------------------------------------------------------
// Parameter gates.

struct GateCondition {
    std::string name;
    std::string detail;  // inequality rendered with numeric sides
    bool holds = false;
};

struct GateReport {
    ScenarioKind kind;
    std::vector<GateCondition> conditions;
    bool overall = false;
    std::string notes;
};

GateReport gate(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Agent-level stepping.

struct AgentState {
    int k = 0;
    Vector x0;  // leader position (p)
    Vector v0;  // leader velocity (p); constant except sec. 13
    Matrix x;   // follower positions, n x p
    Matrix v;   // follower velocities, n x p
    std::deque<Matrix> x_hist;  // positions back to k - sigma_max (delay kind)
};

// Everything derived from the spec that stepping and gating share.
struct ScenarioContext {
    AsyncSchedule schedule;
    DelayProcess delays;
    LossProcess losses;
    GaugePartition sigma;
    GraphConstants constants;
    SignedDigraph effective_graph;  // disturbed / expected / union graph where applicable
    Matrix K;                       // general-linear feedback matrix
    int gate_P = 0;                 // eccentricity used in window formulas
};

ScenarioContext prepare(const ScenarioSpec& spec);

AgentState initial_state(const ScenarioSpec& spec);

// One protocol step (leader + all followers) exactly per the scenario kind.
void step_agents(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& state);

struct ErrorState {
    Matrix e_x;  // n x p signed position errors
    Matrix e_v;  // n x p signed velocity errors (second-order kinds)
    Matrix stacked;  // the kind's error-system state: e_x, y, xi, e or Y
    double err_pos_inf = 0.0;
    double err_vel_inf = 0.0;
};

ErrorState error_coordinates(const ScenarioSpec& spec, const ScenarioContext& ctx,
                             const AgentState& state);

// Coefficient matrix of the kind's error recursion at step k (before the
// Kronecker lift; the recursion acts on stacked states with p columns).
Matrix transition_matrix(const ScenarioSpec& spec, const ScenarioContext& ctx, int k);

// Additive forcing of the error recursion at step k (Noise / UnmeasurableLeader;
// zero rows otherwise). Returns a (dim x p) matrix.
Matrix forcing_term(const ScenarioSpec& spec, const ScenarioContext& ctx, int k);

}  // namespace bitrack
