#include <cmath>
#include <iostream>

#include "bitrack/dynamics.hpp"
#include "bitrack/rng.hpp"

namespace bitrack {

namespace {

// Sum_j |a_ij| [sgn(a_ij) z_j - z_i] + |a_i0| [sgn(a_i0) z0 - z_i], all rows at
// once: A z - (D + B) z + leader z0^T.
Matrix graph_sum(const SignedDigraph& g, const Matrix& z, const Vector& z0) {
    Vector deg = g.adj.cwiseAbs().rowwise().sum() + g.leader.cwiseAbs();
    return g.adj * z - deg.asDiagonal() * z + g.leader * z0.transpose();
}

SignedDigraph masked_graph(const SignedDigraph& g, const std::vector<bool>& active) {
    SignedDigraph m = g;
    for (int i = 0; i < g.n; ++i)
        if (!active[i]) {
            m.adj.row(i).setZero();
            m.leader(i) = 0.0;
        }
    return m;
}

// Edge realizations must differ across runs seeded differently (Monte Carlo
// replicates), so the run seed folds into the network stream.
RandomSignedNetwork seeded_net(const ScenarioSpec& spec) {
    RandomSignedNetwork rn = spec.random_net;
    rn.seed = mix_seed(spec.seed, 0x4e70u, spec.random_net.seed);
    return rn;
}

}  // namespace

ScenarioContext prepare(const ScenarioSpec& spec) {
    spec.validate();
    ScenarioContext ctx;
    const int n = spec.base_graph().n;

    if (spec.is_async()) {
        if (spec.explicit_schedule) {
            ctx.schedule = *spec.explicit_schedule;
            if (!validate_async(ctx.schedule))
                throw ConfigError("spec: explicit schedule violates the gap bound");
        } else {
            ctx.schedule = generate_async(n, spec.horizon, spec.h, spec.seed);
        }
    }

    switch (spec.kind) {
        case ScenarioKind::SwitchStatic:
        case ScenarioKind::SwitchActive: {
            // Union over one full period fixes the gauge and the constants.
            SwitchingSequence seq = spec.switching;
            SignedDigraph all = SignedDigraph::zero(n);
            for (int k = 0; k < seq.period(); ++k) {
                const SignedDigraph& g = seq.graph_at(k);
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j)
                        if (g.adj(i, j) != 0.0 && all.adj(i, j) == 0.0) all.adj(i, j) = g.adj(i, j);
                    if (g.leader(i) != 0.0 && all.leader(i) == 0.0) all.leader(i) = g.leader(i);
                }
            }
            ctx.effective_graph = all;
            break;
        }
        case ScenarioKind::RandomNetwork:
            ctx.effective_graph = spec.random_net.expected();
            break;
        case ScenarioKind::DisturbStatic:
        case ScenarioKind::DisturbActive:
            ctx.effective_graph = disturbed_graph(spec.graph, *spec.disturbance);
            break;
        default:
            ctx.effective_graph = spec.graph;
            break;
    }

    auto balance = gauge_partition(ctx.effective_graph);
    if (balance.balanced()) {
        ctx.sigma = *balance.partition;
    } else {
        ctx.sigma.sigma = Eigen::VectorXi::Ones(n);  // C1 fails; gate reports it
    }
    ctx.constants = graph_constants(ctx.effective_graph);
    ctx.gate_P = spec.P_override > 0 ? spec.P_override : ctx.constants.P;

    if (spec.kind == ScenarioKind::SecondOrderDelay) {
        ctx.delays = sample_delays(spec.graph, spec.sigma_max, spec.seed);
        if (spec.delay_table) {
            if (static_cast<int>(spec.delay_table->size()) < spec.horizon)
                throw ConfigError("spec: delay table shorter than the horizon");
            ctx.delays.table = spec.delay_table;
        }
    }
    if (spec.kind == ScenarioKind::PacketLoss) {
        ctx.losses = sample_losses(spec.theta_bar, spec.seed);
        if (spec.loss_table) {
            if (static_cast<int>(spec.loss_table->size()) < spec.horizon)
                throw ConfigError("spec: loss table shorter than the horizon");
            ctx.losses.table = spec.loss_table;
        }
    }
    if (spec.noise.kind == NoiseSpec::Kind::Sinusoid && spec.noise.bound > 0.0 &&
        spec.noise.amplitude > spec.noise.bound)
        std::cerr << "warning: noise amplitude " << spec.noise.amplitude
                  << " exceeds the bound " << spec.noise.bound << "; samples are clamped\n";

    if (spec.kind == ScenarioKind::GeneralLinearAsync) {
        Matrix BBt = spec.B * spec.B.transpose();
        Eigen::ColPivHouseholderQR<Matrix> qr(spec.B);
        qr.setThreshold(1e-10);
        if (qr.rank() < spec.B.rows())
            throw ConfigError("spec: B must have full row rank");
        ctx.K = spec.gains.psi_star * spec.B.transpose() * BBt.inverse() * spec.A;
    }
    return ctx;
}

AgentState initial_state(const ScenarioSpec& spec) {
    AgentState st;
    st.k = 0;
    st.x0 = spec.leader.x0;
    st.v0 = spec.leader.theta0.size() == spec.p ? spec.leader.theta0 : Vector::Zero(spec.p);
    st.x = spec.x_init;
    st.v = spec.v_init.rows() == spec.x_init.rows() ? spec.v_init
                                                    : Matrix::Zero(spec.x_init.rows(), spec.p);
    if (spec.kind == ScenarioKind::SecondOrderDelay) {
        // Constant prehistory: states before k = 0 equal the initial states.
        for (int s = 0; s <= spec.sigma_max; ++s) st.x_hist.push_back(st.x);
    }
    return st;
}

namespace {

void step_first_order(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& st) {
    SignedDigraph g = masked_graph(spec.graph, ctx.schedule.active_mask(st.k));
    Matrix u = spec.gains.psi * graph_sum(g, st.x, st.x0);
    st.x += spec.gains.tau * u;
}

// The asynchronous masking applies to the neighbor terms only: the velocity
// damping -gamma v_i stays on at every step. This is the control law whose
// error system is exactly y(k+1) = C(k) y(k).
void step_second_order_static(const SignedDigraph& g, const std::vector<bool>& active,
                              const GainParameters& gp, AgentState& st) {
    SignedDigraph m = masked_graph(g, active);
    Matrix u = graph_sum(m, st.x, st.x0) - gp.gamma * st.v;
    st.x += gp.tau * st.v;
    st.v += gp.tau * u;
}

void step_second_order_active(const SignedDigraph& g, const std::vector<bool>& active,
                              const GainParameters& gp, AgentState& st) {
    SignedDigraph m = masked_graph(g, active);
    Matrix u = graph_sum(m, st.x, st.x0) + gp.beta * graph_sum(m, st.v, st.v0);
    st.x += gp.tau * st.v;
    st.v += gp.tau * u;
    st.x0 += gp.tau * st.v0;
}

void step_general_linear(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& st) {
    SignedDigraph m = masked_graph(spec.graph, ctx.schedule.active_mask(st.k));
    Matrix gs = graph_sum(m, st.x, st.x0);
    Matrix u = gs * ctx.K.transpose();           // u_i = K gs_i
    st.x = st.x * spec.A.transpose() + u * spec.B.transpose();
    st.x0 = spec.A * st.x0;
}

void step_delay(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& st) {
    const SignedDigraph& g = spec.graph;
    const GainParameters& gp = spec.gains;
    const int n = g.n;
    Matrix u = Matrix::Zero(n, spec.p);
    for (int i = 0; i < n; ++i) {
        Eigen::RowVectorXd acc = -gp.gamma * st.v.row(i);
        for (int j = 0; j < n; ++j) {
            double a = g.adj(i, j);
            if (a == 0.0) continue;
            int d = ctx.delays.delay(st.k, i, j);
            const Matrix& past = st.x_hist[d];  // x(k - d), constant prehistory for k < d
            acc += std::abs(a) * ((a > 0 ? 1.0 : -1.0) * past.row(j) - st.x.row(i));
        }
        double b = g.leader(i);
        if (b != 0.0)  // x0 is constant, so the leader-edge delay is immaterial
            acc += std::abs(b) * ((b > 0 ? 1.0 : -1.0) * st.x0.transpose() - st.x.row(i));
        u.row(i) = acc;
    }
    st.x += gp.tau * st.v;
    st.v += gp.tau * u;
    st.x_hist.push_front(st.x);
    st.x_hist.pop_back();
}

void step_packet_loss(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& st) {
    const GainParameters& gp = spec.gains;
    Matrix u = Matrix::Zero(spec.graph.n, spec.p);
    if (ctx.losses.delivered(st.k))
        u = graph_sum(spec.graph, st.x, st.x0) + gp.beta * graph_sum(spec.graph, st.v, st.v0);
    st.x += gp.tau * st.v;
    st.v += gp.tau * u;
    st.x0 += gp.tau * st.v0;
}

void step_random_network(const ScenarioSpec& spec, AgentState& st) {
    const GainParameters& gp = spec.gains;
    SignedDigraph g = realize_network(seeded_net(spec), st.k);
    Matrix u = graph_sum(g, st.x, st.x0) + gp.beta * graph_sum(g, st.v, st.v0);
    st.x += gp.tau * st.v;
    st.v += gp.tau * u;
    st.x0 += gp.tau * st.v0;
}

void step_noise(const ScenarioSpec& spec, AgentState& st) {
    const GainParameters& gp = spec.gains;
    Matrix u = graph_sum(spec.graph, st.x, st.x0) + gp.beta * graph_sum(spec.graph, st.v, st.v0);
    for (int i = 0; i < spec.graph.n; ++i)
        u.row(i).array() += spec.noise.sample(i, st.k);
    st.x += gp.tau * st.v;
    st.v += gp.tau * u;
    st.x0 += gp.tau * st.v0;
}

void step_unmeasurable(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& st) {
    const GainParameters& gp = spec.gains;
    const int n = spec.graph.n;
    const double a0 = spec.leader.accel_estimate(st.k);
    const double a_true = spec.leader.accel_true(st.k);

    Matrix gs = graph_sum(spec.graph, st.x, st.x0);
    Matrix a_est(n, spec.p);  // follower acceleration estimates
    for (int i = 0; i < n; ++i)
        a_est.row(i) = Eigen::RowVectorXd::Constant(spec.p, ctx.sigma.sigma(i) * a0) +
                       gp.phi2 * gp.phi1 * gs.row(i);
    Matrix u = st.v + 0.5 * gp.tau * a_est + gp.phi1 * gs;

    st.x += gp.tau * u;
    st.v += gp.tau * a_est;
    st.x0 += gp.tau * st.v0 + Vector::Constant(spec.p, 0.5 * gp.tau * gp.tau * a_true);
    st.v0 += Vector::Constant(spec.p, gp.tau * a_true);
}

}  // namespace

void step_agents(const ScenarioSpec& spec, const ScenarioContext& ctx, AgentState& st) {
    const int n = spec.base_graph().n;
    std::vector<bool> all(n, true);
    switch (spec.kind) {
        case ScenarioKind::FirstOrderAsync:
            step_first_order(spec, ctx, st);
            break;
        case ScenarioKind::SecondOrderStaticAsync:
            step_second_order_static(spec.graph, ctx.schedule.active_mask(st.k), spec.gains, st);
            break;
        case ScenarioKind::SecondOrderActiveAsync:
            step_second_order_active(spec.graph, ctx.schedule.active_mask(st.k), spec.gains, st);
            break;
        case ScenarioKind::GeneralLinearAsync:
            step_general_linear(spec, ctx, st);
            break;
        case ScenarioKind::SecondOrderDelay:
            step_delay(spec, ctx, st);
            break;
        case ScenarioKind::SwitchStatic:
            step_second_order_static(spec.switching.graph_at(st.k), all, spec.gains, st);
            break;
        case ScenarioKind::SwitchActive:
            step_second_order_active(spec.switching.graph_at(st.k), all, spec.gains, st);
            break;
        case ScenarioKind::PacketLoss:
            step_packet_loss(spec, ctx, st);
            break;
        case ScenarioKind::RandomNetwork:
            step_random_network(spec, st);
            break;
        case ScenarioKind::DisturbStatic:
            step_second_order_static(ctx.effective_graph, all, spec.gains, st);
            break;
        case ScenarioKind::DisturbActive:
            step_second_order_active(ctx.effective_graph, all, spec.gains, st);
            break;
        case ScenarioKind::Noise:
            step_noise(spec, st);
            break;
        case ScenarioKind::UnmeasurableLeader:
            step_unmeasurable(spec, ctx, st);
            break;
    }
    ++st.k;
}

ErrorState error_coordinates(const ScenarioSpec& spec, const ScenarioContext& ctx,
                             const AgentState& st) {
    const int n = spec.base_graph().n;
    ErrorState e;
    Matrix sig = ctx.sigma.sigma.cast<double>().asDiagonal();
    e.e_x = sig * st.x - Vector::Ones(n) * st.x0.transpose();
    e.err_pos_inf = e.e_x.cwiseAbs().maxCoeff();
    if (spec.second_order() && spec.kind != ScenarioKind::GeneralLinearAsync) {
        e.e_v = sig * st.v - Vector::Ones(n) * st.v0.transpose();
        e.err_vel_inf = e.e_v.cwiseAbs().maxCoeff();
    }

    const GainParameters& gp = spec.gains;
    switch (spec.kind) {
        case ScenarioKind::FirstOrderAsync:
        case ScenarioKind::GeneralLinearAsync:
            e.stacked = e.e_x;
            break;
        case ScenarioKind::SecondOrderStaticAsync:
        case ScenarioKind::SwitchStatic:
        case ScenarioKind::DisturbStatic: {
            // Static leader: v0 = 0, so e_v equals the signed velocities.
            e.stacked = Matrix::Zero(2 * n, spec.p);
            e.stacked.topRows(n) = e.e_x;
            e.stacked.bottomRows(n) = e.e_x + (2.0 / gp.gamma) * e.e_v;
            break;
        }
        case ScenarioKind::SecondOrderDelay: {
            const int sigma_star = spec.sigma_max + 1;
            e.stacked = Matrix::Zero(2 * n * sigma_star, spec.p);
            Matrix sigd = ctx.sigma.sigma.cast<double>().asDiagonal();
            for (int s = 0; s < sigma_star; ++s) {
                Matrix ex = sigd * st.x_hist[s] - Vector::Ones(n) * st.x0.transpose();
                e.stacked.block(2 * n * s, 0, n, spec.p) = ex;
                // Velocity history is recoverable from consecutive positions:
                // x(k-s) = x(k-s-1) + tau v(k-s-1); the current v block is exact.
                if (s == 0)
                    e.stacked.block(n, 0, n, spec.p) = ex + (2.0 / gp.gamma) * e.e_v;
                else {
                    Matrix prev = sigd * st.x_hist[s - 1] - Vector::Ones(n) * st.x0.transpose();
                    Matrix vel = (prev - ex) / gp.tau;
                    e.stacked.block(2 * n * s + n, 0, n, spec.p) = ex + (2.0 / gp.gamma) * vel;
                }
            }
            break;
        }
        case ScenarioKind::SecondOrderActiveAsync:
        case ScenarioKind::SwitchActive:
        case ScenarioKind::PacketLoss:
        case ScenarioKind::RandomNetwork:
        case ScenarioKind::DisturbActive: {
            e.stacked = Matrix::Zero(2 * n, spec.p);
            e.stacked.topRows(n) = e.e_x;
            e.stacked.bottomRows(n) = gp.alpha * e.e_x + gp.alpha * gp.beta * e.e_v;
            break;
        }
        case ScenarioKind::Noise:
        case ScenarioKind::UnmeasurableLeader: {
            e.stacked = Matrix::Zero(2 * n, spec.p);
            e.stacked.topRows(n) = e.e_x;
            e.stacked.bottomRows(n) = e.e_v;
            break;
        }
    }
    return e;
}

Matrix transition_matrix(const ScenarioSpec& spec, const ScenarioContext& ctx, int k) {
    switch (spec.kind) {
        case ScenarioKind::FirstOrderAsync:
            return build_first_order(spec.graph, ctx.schedule.active_mask(k), spec.gains);
        case ScenarioKind::SecondOrderStaticAsync:
            return build_second_order_static(spec.graph, ctx.schedule.active_mask(k), spec.gains);
        case ScenarioKind::SecondOrderActiveAsync:
            return build_second_order_active(spec.graph, ctx.schedule.active_mask(k), spec.gains).H;
        case ScenarioKind::GeneralLinearAsync:
            return build_general_linear(spec.graph, ctx.schedule.active_mask(k), spec.gains);
        case ScenarioKind::SecondOrderDelay:
            return build_delay(spec.graph, ctx.delays, k, spec.gains);
        case ScenarioKind::SwitchStatic:
            return build_switch_static(spec.switching.graph_at(k), spec.gains);
        case ScenarioKind::SwitchActive:
            return build_switch_active(spec.switching.graph_at(k), spec.gains).H;
        case ScenarioKind::PacketLoss: {
            LossMatrices lm = build_loss(spec.graph, spec.gains);
            return ctx.losses.delivered(k) ? lm.H : lm.H_star;
        }
        case ScenarioKind::RandomNetwork: {
            SignedDigraph g = realize_network(seeded_net(spec), k);
            return build_second_order_active(g, std::vector<bool>(g.n, true), spec.gains).H;
        }
        case ScenarioKind::DisturbStatic:
            return build_second_order_static(ctx.effective_graph,
                                             std::vector<bool>(ctx.effective_graph.n, true),
                                             spec.gains);
        case ScenarioKind::DisturbActive:
            return build_second_order_active(ctx.effective_graph,
                                             std::vector<bool>(ctx.effective_graph.n, true),
                                             spec.gains).H;
        case ScenarioKind::Noise:
            return build_noise_system(spec.graph, spec.gains).Omega1;
        case ScenarioKind::UnmeasurableLeader:
            return build_estimation_system(spec.graph, spec.gains).Upsilon1;
    }
    throw ConfigError("transition_matrix: unhandled kind");
}

Matrix forcing_term(const ScenarioSpec& spec, const ScenarioContext& ctx, int k) {
    const int n = spec.base_graph().n;
    if (spec.kind == ScenarioKind::Noise) {
        Matrix w = Matrix::Zero(n, spec.p);
        for (int i = 0; i < n; ++i)
            w.row(i).setConstant(ctx.sigma.sigma(i) * spec.noise.sample(i, k));
        Matrix f = Matrix::Zero(2 * n, spec.p);
        f.bottomRows(n) = spec.gains.tau * w;  // Omega2 * signed noise
        return f;
    }
    if (spec.kind == ScenarioKind::UnmeasurableLeader) {
        // e(k+1) = Upsilon1 e(k) - Upsilon2 zeta(k); zeta enters through the
        // leader's true acceleration, hence the sign.
        double z = spec.leader.zeta(k);
        Matrix f = Matrix::Zero(2 * n, spec.p);
        f.topRows(n).setConstant(-0.5 * spec.gains.tau * spec.gains.tau * z);
        f.bottomRows(n).setConstant(-spec.gains.tau * z);
        return f;
    }
    int dim = 2 * n;
    if (spec.kind == ScenarioKind::FirstOrderAsync || spec.kind == ScenarioKind::GeneralLinearAsync)
        dim = n;
    if (spec.kind == ScenarioKind::SecondOrderDelay) dim = 2 * n * (spec.sigma_max + 1);
    return Matrix::Zero(dim, spec.p);
}

}  // namespace bitrack
