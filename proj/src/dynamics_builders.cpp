#include <cmath>

#include "bitrack/dynamics.hpp"
#include "bitrack/rng.hpp"

namespace bitrack {

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::FirstOrderAsync: return "first_order_async";
        case ScenarioKind::SecondOrderStaticAsync: return "second_order_static_async";
        case ScenarioKind::SecondOrderActiveAsync: return "second_order_active_async";
        case ScenarioKind::GeneralLinearAsync: return "general_linear_async";
        case ScenarioKind::SecondOrderDelay: return "second_order_delay";
        case ScenarioKind::SwitchStatic: return "switch_static";
        case ScenarioKind::SwitchActive: return "switch_active";
        case ScenarioKind::PacketLoss: return "packet_loss";
        case ScenarioKind::RandomNetwork: return "random_network";
        case ScenarioKind::DisturbStatic: return "disturb_static";
        case ScenarioKind::DisturbActive: return "disturb_active";
        case ScenarioKind::Noise: return "noise";
        case ScenarioKind::UnmeasurableLeader: return "unmeasurable_leader";
    }
    return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ScenarioKind::UnmeasurableLeader); ++i) {
        auto k = static_cast<ScenarioKind>(i);
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown scenario kind: " + s);
}

double NoiseSpec::sample(int agent, int k) const {
    double w = 0.0;
    switch (kind) {
        case Kind::None: return 0.0;
        case Kind::Sinusoid:
            w = amplitude * std::sin(freq * k);
            break;
        case Kind::RandomUniform: {
            Rng rng(seed, 0x01feu ^ static_cast<std::uint64_t>(k),
                    static_cast<std::uint64_t>(agent));
            w = rng.uniform(-bound, bound);
            break;
        }
    }
    if (bound > 0.0) w = std::clamp(w, -bound, bound);
    return w;
}

double LeaderSpec::accel_true(int k) const {
    return accel_base + accel_amp * std::sin(accel_freq * k);
}

const SignedDigraph& ScenarioSpec::base_graph() const {
    if (is_switching()) return switching.graphs.front();
    if (kind == ScenarioKind::RandomNetwork) return random_net.weights;
    return graph;
}

void ScenarioSpec::validate() const {
    if (horizon < 1) throw ConfigError("spec: horizon must be >= 1");
    if (p < 1) throw ConfigError("spec: p must be >= 1");
    if (gains.tau <= 0.0 && kind != ScenarioKind::GeneralLinearAsync)
        throw ConfigError("spec: tau must be positive");
    if (is_switching())
        switching.validate();
    else if (kind == ScenarioKind::RandomNetwork)
        random_net.validate();
    else
        graph.validate();
    const int n = base_graph().n;
    if (x_init.rows() != n || x_init.cols() != p)
        throw ConfigError("spec: x_init must be n x p");
    if (second_order() && kind != ScenarioKind::GeneralLinearAsync &&
        (v_init.rows() != n || v_init.cols() != p))
        throw ConfigError("spec: v_init must be n x p");
    if (leader.x0.size() != p) throw ConfigError("spec: leader x0 must have length p");
    if (kind == ScenarioKind::GeneralLinearAsync) {
        if (A.rows() != p || A.cols() != p) throw ConfigError("spec: A must be p x p");
        if (B.rows() != p || B.cols() < 1) throw ConfigError("spec: B must have p rows");
        if (gains.psi_star <= 0.0) throw ConfigError("spec: psi_star must be positive");
    }
    if (kind == ScenarioKind::SecondOrderDelay && sigma_max < 0)
        throw ConfigError("spec: sigma_max must be >= 0");
    if (kind == ScenarioKind::PacketLoss && (theta_bar < 0.0 || theta_bar > 1.0))
        throw ConfigError("spec: theta_bar must lie in [0,1]");
    if ((kind == ScenarioKind::DisturbStatic || kind == ScenarioKind::DisturbActive) &&
        !disturbance)
        throw ConfigError("spec: disturbance kinds need a disturbance block");
}

namespace {

// Activity-masked D(k), B(k), A(k): rows of inactive agents are zero.
struct MaskedGraph {
    Matrix adj;
    Vector leader;
    Vector deg;   // row sums of |adj|
    Vector bdiag; // |leader|
};

MaskedGraph masked(const SignedDigraph& g, const std::vector<bool>& active) {
    MaskedGraph m;
    m.adj = g.adj;
    m.leader = g.leader;
    for (int i = 0; i < g.n; ++i) {
        if (!active[i]) {
            m.adj.row(i).setZero();
            m.leader(i) = 0.0;
        }
    }
    m.deg = m.adj.cwiseAbs().rowwise().sum();
    m.bdiag = m.leader.cwiseAbs();
    return m;
}

Matrix masked_interaction(const MaskedGraph& m) {
    Matrix h = -m.adj.cwiseAbs();
    h.diagonal() += m.deg + m.bdiag;
    return h;
}

std::vector<bool> all_active(int n) { return std::vector<bool>(n, true); }

}  // namespace

Matrix build_first_order(const SignedDigraph& g, const std::vector<bool>& active,
                         const GainParameters& gp) {
    MaskedGraph m = masked(g, active);
    const double tp = gp.tau * gp.psi;
    Matrix out = tp * m.adj.cwiseAbs();
    out.diagonal() += Vector::Ones(g.n) - tp * (m.deg + m.bdiag);
    return out;
}

Matrix build_second_order_static(const SignedDigraph& g, const std::vector<bool>& active,
                                 const GainParameters& gp) {
    const int n = g.n;
    MaskedGraph m = masked(g, active);
    const double gt2 = gp.gamma * gp.tau / 2.0;
    Matrix C = Matrix::Zero(2 * n, 2 * n);
    C.topLeftCorner(n, n) = (1.0 - gt2) * Matrix::Identity(n, n);
    C.topRightCorner(n, n) = gt2 * Matrix::Identity(n, n);
    C.bottomLeftCorner(n, n) =
        gt2 * Matrix::Identity(n, n) - (2.0 * gp.tau / gp.gamma) * masked_interaction(m);
    C.bottomRightCorner(n, n) = (1.0 - gt2) * Matrix::Identity(n, n);
    return C;
}

ActivePair build_second_order_active(const SignedDigraph& g, const std::vector<bool>& active,
                                     const GainParameters& gp) {
    const int n = g.n;
    MaskedGraph m = masked(g, active);
    const double tb = gp.tau / gp.beta;
    const double tab = gp.tau / (gp.alpha * gp.beta);
    const double atb = gp.alpha * gp.tau / gp.beta;
    Matrix lower_right =
        (1.0 + tb) * Matrix::Identity(n, n) - gp.beta * gp.tau * masked_interaction(m);
    ActivePair out;
    out.H = Matrix::Zero(2 * n, 2 * n);
    out.H.topLeftCorner(n, n) = (1.0 - tb) * Matrix::Identity(n, n);
    out.H.topRightCorner(n, n) = tab * Matrix::Identity(n, n);
    out.H.bottomLeftCorner(n, n) = -atb * Matrix::Identity(n, n);
    out.H.bottomRightCorner(n, n) = lower_right;
    out.Psi = out.H;
    out.Psi.bottomLeftCorner(n, n) = atb * Matrix::Identity(n, n);
    return out;
}

Matrix build_general_linear(const SignedDigraph& g, const std::vector<bool>& active,
                            const GainParameters& gp) {
    MaskedGraph m = masked(g, active);
    Matrix out = gp.psi_star * m.adj.cwiseAbs();
    out.diagonal() += Vector::Ones(g.n) - gp.psi_star * (m.deg + m.bdiag);
    return out;
}

EdgeSet build_lifted_digraph(const Matrix& Psi, double tol) {
    const int dim = static_cast<int>(Psi.rows());
    EdgeSet e;
    e.vertex_count = dim + 1;
    e.insert(0, 0);
    Vector sums = row_sums(Psi);
    for (int i = 0; i < dim; ++i) {
        if (sums(i) < 1.0 - tol) e.insert(0, i + 1);  // q_i(k) = 1 - row sum > 0
        for (int j = 0; j < dim; ++j)
            if (Psi(i, j) > tol) e.insert(j + 1, i + 1);
    }
    return e;
}

Matrix build_delay(const SignedDigraph& g, const DelayProcess& delays, int k,
                   const GainParameters& gp) {
    const int n = g.n;
    const int sigma_star = delays.sigma_max + 1;
    const int dim = 2 * n * sigma_star;
    const double gt2 = gp.gamma * gp.tau / 2.0;
    const double c = 2.0 * gp.tau / gp.gamma;

    // Split A into A_s(k) by realized per-edge delays; sum_s A_s(k) = A.
    std::vector<Matrix> abs_parts(sigma_star, Matrix::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.adj(i, j) != 0.0) {
                int s = delays.delay(k, i, j);
                if (s > delays.sigma_max) throw ConfigError("delay exceeds sigma_max");
                abs_parts[s](i, j) = std::abs(g.adj(i, j));
            }

    Matrix E = Matrix::Zero(dim, dim);
    Matrix deg_b = g.degree_matrix() + g.leader_matrix();
    // D* + D_0(k)
    E.block(0, 0, n, n) = (1.0 - gt2) * Matrix::Identity(n, n);
    E.block(0, n, n, n) = gt2 * Matrix::Identity(n, n);
    E.block(n, 0, n, n) = gt2 * Matrix::Identity(n, n) - c * deg_b + c * abs_parts[0];
    E.block(n, n, n, n) = (1.0 - gt2) * Matrix::Identity(n, n);
    // D_s(k) blocks and the companion identity shift
    for (int s = 1; s < sigma_star; ++s)
        E.block(n, 2 * n * s, n, n) = c * abs_parts[s];
    for (int s = 1; s < sigma_star; ++s)
        E.block(2 * n * s, 2 * n * (s - 1), 2 * n, 2 * n) = Matrix::Identity(2 * n, 2 * n);
    return E;
}

Matrix build_switch_static(const SignedDigraph& gk, const GainParameters& gp) {
    return build_second_order_static(gk, all_active(gk.n), gp);
}

ActivePair build_switch_active(const SignedDigraph& gk, const GainParameters& gp) {
    return build_second_order_active(gk, all_active(gk.n), gp);
}

LossMatrices build_loss(const SignedDigraph& g, const GainParameters& gp) {
    const int n = g.n;
    LossMatrices out;
    ActivePair hp = build_second_order_active(g, all_active(n), gp);
    out.H = hp.H;
    out.Psi = hp.Psi;
    const double tb = gp.tau / gp.beta;
    const double tab = gp.tau / (gp.alpha * gp.beta);
    const double atb = gp.alpha * gp.tau / gp.beta;
    out.H_star = Matrix::Zero(2 * n, 2 * n);
    out.H_star.topLeftCorner(n, n) = (1.0 - tb) * Matrix::Identity(n, n);
    out.H_star.topRightCorner(n, n) = tab * Matrix::Identity(n, n);
    out.H_star.bottomLeftCorner(n, n) = -atb * Matrix::Identity(n, n);
    out.H_star.bottomRightCorner(n, n) = (1.0 + tb) * Matrix::Identity(n, n);
    return out;
}

Matrix build_expected(const RandomSignedNetwork& net, const GainParameters& gp) {
    SignedDigraph e = net.expected();
    return build_second_order_active(e, all_active(e.n), gp).H;
}

SignedDigraph disturbed_graph(const SignedDigraph& g, const DisturbanceSpec& d) {
    g.validate();
    if (d.delta_adj.rows() != g.n || d.delta_adj.cols() != g.n ||
        d.delta_leader.size() != g.n)
        throw ConfigError("disturbance: dimensions do not match the graph");
    auto same_type = [](double a, double da) {
        if (a == 0.0) return da == 0.0;
        return da == 0.0 || (a > 0.0) == (da > 0.0);
    };
    SignedDigraph out = g;
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (!same_type(g.adj(i, j), d.delta_adj(i, j)))
                throw ConfigError("disturbance: delta A is not the same type as A");
            out.adj(i, j) += d.delta_adj(i, j);
        }
        if (!same_type(g.leader(i), d.delta_leader(i)))
            throw ConfigError("disturbance: delta leader weights change the sign pattern");
        out.leader(i) += d.delta_leader(i);
    }
    return out;
}

NoiseSystem build_noise_system(const SignedDigraph& g, const GainParameters& gp) {
    const int n = g.n;
    Matrix Hm = g.interaction_matrix();
    NoiseSystem out;
    out.Omega1 = Matrix::Zero(2 * n, 2 * n);
    out.Omega1.topLeftCorner(n, n) = Matrix::Identity(n, n);
    out.Omega1.topRightCorner(n, n) = gp.tau * Matrix::Identity(n, n);
    out.Omega1.bottomLeftCorner(n, n) = -gp.tau * Hm;
    out.Omega1.bottomRightCorner(n, n) = Matrix::Identity(n, n) - gp.beta * gp.tau * Hm;
    out.Omega2 = Matrix::Zero(2 * n, n);
    out.Omega2.bottomRows(n) = gp.tau * Matrix::Identity(n, n);
    return out;
}

EstimationSystem build_estimation_system(const SignedDigraph& g, const GainParameters& gp) {
    const int n = g.n;
    Matrix Hm = g.interaction_matrix();
    const double pos_gain = gp.phi1 * gp.tau + 0.5 * gp.phi1 * gp.phi2 * gp.tau * gp.tau;
    EstimationSystem out;
    out.Upsilon1 = Matrix::Zero(2 * n, 2 * n);
    out.Upsilon1.topLeftCorner(n, n) = Matrix::Identity(n, n) - pos_gain * Hm;
    out.Upsilon1.topRightCorner(n, n) = gp.tau * Matrix::Identity(n, n);
    out.Upsilon1.bottomLeftCorner(n, n) = -gp.phi1 * gp.phi2 * gp.tau * Hm;
    out.Upsilon1.bottomRightCorner(n, n) = Matrix::Identity(n, n);
    out.Upsilon2 = Matrix::Zero(2 * n, 1);
    out.Upsilon2.topRows(n).setConstant(0.5 * gp.tau * gp.tau);
    out.Upsilon2.bottomRows(n).setConstant(gp.tau);
    return out;
}

}  // namespace bitrack
