#include "bitrack/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>

#include "bitrack/rng.hpp"

namespace bitrack {

namespace {

// FNV-1a over the numeric content of the spec; enough to detect trace/spec
// mismatches on replay.
struct Fnv {
    std::uint64_t h = 1469598103934665603ULL;
    void add_bytes(const void* p, size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    }
    void add(double v) { add_bytes(&v, sizeof v); }
    void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
    void add(int v) { add(static_cast<std::uint64_t>(v)); }
    void add(const Matrix& m) {
        for (Eigen::Index i = 0; i < m.size(); ++i) add(*(m.data() + i));
    }
    void add(const Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) add(v(i));
    }
};

std::string digest(const ScenarioSpec& spec) {
    Fnv f;
    f.add(static_cast<int>(spec.kind));
    f.add(spec.horizon);
    f.add(spec.p);
    f.add(spec.h);
    f.add(spec.seed);
    f.add(spec.gains.tau);
    f.add(spec.gains.psi);
    f.add(spec.gains.gamma);
    f.add(spec.gains.beta);
    f.add(spec.gains.alpha);
    f.add(spec.gains.psi_star);
    f.add(spec.gains.phi1);
    f.add(spec.gains.phi2);
    if (!spec.is_switching() && spec.kind != ScenarioKind::RandomNetwork) {
        f.add(spec.graph.adj);
        f.add(spec.graph.leader);
    }
    f.add(spec.x_init);
    f.add(spec.v_init.size() ? spec.v_init : Matrix{});
    f.add(spec.leader.x0);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
    return buf;
}

// The error recursion advances stacked (dim x p) states; the general-linear
// kind additionally right-multiplies by A^T (the Q(k) (x) A structure).
Matrix advance_recursion(const ScenarioSpec& spec, const ScenarioContext& ctx, int k,
                         const Matrix& state) {
    Matrix next = transition_matrix(spec, ctx, k) * state;
    if (spec.kind == ScenarioKind::GeneralLinearAsync) next = next * spec.A.transpose();
    if (spec.bounded_tracking_kind()) next += forcing_term(spec, ctx, k);
    return next;
}

}  // namespace

SimulationTrace run(const ScenarioSpec& spec, const RunOptions& opts) {
    ScenarioContext ctx = prepare(spec);
    AgentState st = initial_state(spec);

    SimulationTrace trace;
    trace.seed = spec.seed;
    trace.spec_digest = digest(spec);
    trace.rows.reserve(spec.horizon + 1);

    Matrix recursion_state;
    if (opts.dual_check) {
        recursion_state = error_coordinates(spec, ctx, st).stacked;
        trace.max_dual_divergence = 0.0;
    }

    for (int k = 0; k <= spec.horizon; ++k) {
        ErrorState err = error_coordinates(spec, ctx, st);
        TraceRow row;
        row.k = k;
        row.t = spec.gains.tau > 0.0 ? k * spec.gains.tau : k;
        row.x0 = st.x0;
        row.v0 = st.v0;
        row.x = st.x;
        row.v = st.v;
        row.err_pos = err.err_pos_inf;
        row.err_vel = err.err_vel_inf;
        trace.rows.push_back(std::move(row));

        if (opts.dual_check) {
            double div = (err.stacked - recursion_state).cwiseAbs().maxCoeff();
            trace.max_dual_divergence = std::max(trace.max_dual_divergence, div);
        }
        if (k == spec.horizon) break;
        step_agents(spec, ctx, st);
        if (opts.dual_check)
            recursion_state = advance_recursion(spec, ctx, k, recursion_state);
    }
    return trace;
}

ResidualBound residual_bound(const ScenarioSpec& spec) {
    ResidualBound out;
    Matrix T;
    double disturbance_bound = 0.0;
    if (spec.kind == ScenarioKind::Noise) {
        T = build_noise_system(spec.graph, spec.gains).Omega1;
        disturbance_bound = spec.noise.bound > 0.0 ? spec.noise.bound : spec.noise.amplitude;
    } else if (spec.kind == ScenarioKind::UnmeasurableLeader) {
        T = build_estimation_system(spec.graph, spec.gains).Upsilon1;
        disturbance_bound = spec.zeta_bar > 0.0 ? spec.zeta_bar : std::abs(spec.leader.accel_amp);
    } else {
        return out;
    }
    Eigen::EigenSolver<Matrix> solver(T, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("residual_bound: eigensolver did not converge");
    out.rho = solver.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::MatrixXcd V = solver.eigenvectors();
    double normV = V.cwiseAbs().rowwise().sum().maxCoeff();
    double normVinv = V.inverse().cwiseAbs().rowwise().sum().maxCoeff();
    out.cond_J = normV * normVinv;
    if (out.rho < 1.0)
        out.bound = disturbance_bound * spec.gains.tau * out.cond_J / (1.0 - out.rho);
    else
        out.bound = std::numeric_limits<double>::infinity();
    return out;
}

ConvergenceVerdict verdict(const SimulationTrace& trace, const ScenarioSpec& spec,
                           double tail_fraction, double threshold) {
    ConvergenceVerdict v;
    v.bounded_kind = spec.bounded_tracking_kind();
    const auto& rows = trace.rows;
    const int n_rows = static_cast<int>(rows.size());
    const int tail_len = std::max(1, static_cast<int>(std::ceil(tail_fraction * n_rows)));
    const int tail_start = n_rows - tail_len;

    auto combined = [&](const TraceRow& r) { return std::max(r.err_pos, r.err_vel); };

    double tail_max = 0.0;
    for (int i = tail_start; i < n_rows; ++i) tail_max = std::max(tail_max, combined(rows[i]));
    v.tail_error = tail_max;

    if (v.bounded_kind) {
        ResidualBound rb = residual_bound(spec);
        v.residual_bound = rb.bound;
        v.rho = rb.rho;
        v.cond_J = rb.cond_J;
        v.threshold = rb.bound;
        v.tracked = tail_max <= rb.bound;
    } else {
        v.threshold = threshold;
        v.tracked = tail_max < threshold;
    }

    if (v.tracked) {
        int kc = n_rows - 1;
        while (kc > 0 && combined(rows[kc - 1]) < v.threshold) --kc;
        // walk back to the first index after the last excursion
        v.k_converged = rows[kc].k;
    }
    return v;
}

std::vector<Matrix> expectation_trajectory(const ScenarioSpec& spec,
                                           const std::vector<int>& checkpoints) {
    ScenarioContext ctx = prepare(spec);
    AgentState st = initial_state(spec);
    Matrix state = error_coordinates(spec, ctx, st).stacked;

    Matrix T_bar;
    bool constant_T = false;
    if (spec.kind == ScenarioKind::PacketLoss) {
        LossMatrices lm = build_loss(spec.graph, spec.gains);
        T_bar = spec.theta_bar * lm.H + (1.0 - spec.theta_bar) * lm.H_star;
        constant_T = true;
    } else if (spec.kind == ScenarioKind::RandomNetwork) {
        T_bar = build_expected(spec.random_net, spec.gains);
        constant_T = true;
    }

    std::vector<Matrix> out;
    size_t next_cp = 0;
    for (int k = 0; k <= spec.horizon; ++k) {
        if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
            out.push_back(state);
            ++next_cp;
        }
        if (k == spec.horizon) break;
        if (constant_T)
            state = T_bar * state;
        else
            state = advance_recursion(spec, ctx, k, state);
    }
    return out;
}

namespace {

struct ReplicateStats {
    std::vector<double> err;          // combined error norm per step
    std::vector<Matrix> cp_state;     // stacked error at the checkpoints
    bool tracked = false;
};

ReplicateStats run_replicate(const ScenarioSpec& spec, const std::vector<int>& checkpoints) {
    ReplicateStats out;
    const int n_rows = spec.horizon + 1;
    out.err.resize(n_rows);
    ScenarioContext ctx = prepare(spec);
    AgentState st = initial_state(spec);
    size_t next_cp = 0;
    double tail_max = 0.0;
    const int tail_start =
        n_rows - std::max(1, static_cast<int>(std::ceil(spec.tail_fraction * n_rows)));
    for (int k = 0; k <= spec.horizon; ++k) {
        ErrorState err = error_coordinates(spec, ctx, st);
        double combined = std::max(err.err_pos_inf, err.err_vel_inf);
        out.err[k] = combined;
        if (k >= tail_start) tail_max = std::max(tail_max, combined);
        if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
            out.cp_state.push_back(err.stacked);
            ++next_cp;
        }
        if (k == spec.horizon) break;
        step_agents(spec, ctx, st);
    }
    out.tracked = spec.bounded_tracking_kind() ? true : tail_max < spec.threshold;
    return out;
}

}  // namespace

MonteCarloResult monte_carlo(const ScenarioSpec& spec, int replicates, std::uint64_t seed0) {
    if (replicates < 1) throw ConfigError("monte_carlo: replicates must be >= 1");
    MonteCarloResult res;
    res.replicates = replicates;

    const int n_rows = spec.horizon + 1;
    std::vector<double> sum_err(n_rows, 0.0), sum_err2(n_rows, 0.0);

    const int cp_stride = std::max(1, spec.horizon / 40);
    for (int k = 0; k <= spec.horizon; k += cp_stride) res.checkpoints.push_back(k);
    if (res.checkpoints.back() != spec.horizon) res.checkpoints.push_back(spec.horizon);

    // Replicates fan out across workers keyed by seed; results land in a
    // per-replicate slot and are reduced in index order, so the outcome does
    // not depend on scheduling.
    std::vector<ReplicateStats> stats(replicates);
    const int workers = std::max(1, std::min<int>(std::thread::hardware_concurrency(),
                                                  std::min(replicates, 16)));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int r = next.fetch_add(1); r < replicates; r = next.fetch_add(1)) {
            ScenarioSpec rep = spec;
            rep.seed = mix_seed(seed0, 0xacc0u, static_cast<std::uint64_t>(r));
            stats[r] = run_replicate(rep, res.checkpoints);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<Matrix> sum_state, sum_state2;
    bool have_state_stats = false;
    for (int r = 0; r < replicates; ++r) {
        const auto& st = stats[r];
        for (int k = 0; k < n_rows; ++k) {
            sum_err[k] += st.err[k];
            sum_err2[k] += st.err[k] * st.err[k];
        }
        if (!have_state_stats) {
            sum_state.assign(res.checkpoints.size(),
                             Matrix::Zero(st.cp_state[0].rows(), st.cp_state[0].cols()));
            sum_state2 = sum_state;
            have_state_stats = true;
        }
        for (size_t c = 0; c < res.checkpoints.size(); ++c) {
            sum_state[c] += st.cp_state[c];
            sum_state2[c] += st.cp_state[c].cwiseProduct(st.cp_state[c]);
        }
        res.tracked.push_back(st.tracked ? 1 : 0);
    }

    res.mean_err.resize(n_rows);
    res.se_err.resize(n_rows);
    for (int k = 0; k < n_rows; ++k) {
        double mean = sum_err[k] / replicates;
        res.mean_err[k] = mean;
        double var = replicates > 1
                         ? std::max(0.0, (sum_err2[k] - replicates * mean * mean) / (replicates - 1))
                         : 0.0;
        res.se_err[k] = std::sqrt(var / replicates);
    }
    int tracked_count = 0;
    for (char t : res.tracked) tracked_count += t;
    res.fraction_tracked = static_cast<double>(tracked_count) / replicates;

    const int tail_start = n_rows - std::max(1, static_cast<int>(std::ceil(
                                        spec.tail_fraction * n_rows)));
    double tail_sum = 0.0;
    for (int k = tail_start; k < n_rows; ++k) tail_sum += res.mean_err[k];
    res.tail_mean_err = tail_sum / (n_rows - tail_start);

    for (size_t c = 0; c < res.checkpoints.size(); ++c) {
        Matrix mean = sum_state[c] / replicates;
        res.mc_mean_state.push_back(mean);
        Matrix var = (sum_state2[c] - replicates * mean.cwiseProduct(mean)) /
                     std::max(1, replicates - 1);
        res.mc_se_state.push_back((var.cwiseMax(0.0) / replicates).cwiseSqrt());
    }
    res.expected_state = expectation_trajectory(spec, res.checkpoints);

    double max_dev = 0.0;
    for (size_t c = 0; c < res.checkpoints.size(); ++c) {
        const Matrix& mean = res.mc_mean_state[c];
        const Matrix& se = res.mc_se_state[c];
        const Matrix& exp = res.expected_state[c];
        for (Eigen::Index i = 0; i < mean.rows(); ++i)
            for (Eigen::Index j = 0; j < mean.cols(); ++j) {
                double diff = std::abs(mean(i, j) - exp(i, j));
                // absolute floor: converged components carry rounding noise
                // only, and their standard error collapses with them
                if (diff <= 1e-9) continue;
                double s = se(i, j);
                if (s < 1e-15)
                    max_dev = std::numeric_limits<double>::infinity();
                else
                    max_dev = std::max(max_dev, diff / s);
            }
    }
    res.max_sigma_deviation = max_dev;
    return res;
}

std::vector<double> window_contraction_scan(const ScenarioSpec& spec, int window_len,
                                            int num_windows, int stride) {
    if (window_len < 1) throw ConfigError("window_contraction_scan: window_len must be >= 1");
    if (stride < 1) stride = window_len;
    ScenarioContext ctx = prepare(spec);
    std::vector<double> norms;
    for (int w = 0; w < num_windows; ++w) {
        int start = w * stride;
        Matrix prod;
        for (int k = start; k < start + window_len; ++k) {
            Matrix T = transition_matrix(spec, ctx, k);
            prod = (k == start) ? T : Matrix(T * prod);
        }
        norms.push_back(infinity_norm(prod));
    }
    return norms;
}

}  // namespace bitrack
