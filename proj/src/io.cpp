#include "bitrack/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace bitrack {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

double num_at(const Json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

Matrix rows_to_matrix(const Json& j, int cols_hint, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array");
    if (!j.front().is_array()) {
        // flat list: one column
        Matrix m(j.size(), 1);
        for (size_t i = 0; i < j.size(); ++i) m(i, 0) = j.at(i).get<double>();
        return m;
    }
    size_t cols = j.front().size();
    if (cols_hint > 0 && cols != static_cast<size_t>(cols_hint))
        throw ConfigError(where + ": expected " + std::to_string(cols_hint) + " columns");
    Matrix m(j.size(), cols);
    for (size_t i = 0; i < j.size(); ++i) {
        if (j.at(i).size() != cols) throw ConfigError(where + ": ragged rows");
        for (size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    }
    return m;
}

}  // namespace

SignedDigraph graph_from_json(const Json& j) {
    check_keys(j, {"n", "edges", "leader"}, "graph");
    if (!j.contains("n")) throw ConfigError("graph: missing n");
    SignedDigraph g = SignedDigraph::zero(j.at("n").get<int>());
    for (const auto& e : j.value("edges", Json::array())) {
        if (!e.is_array() || e.size() != 3) throw ConfigError("graph: edge entries are [i, j, w]");
        int i = e.at(0).get<int>(), jj = e.at(1).get<int>();
        if (i < 1 || i > g.n || jj < 1 || jj > g.n)
            throw ConfigError("graph: edge index out of range (indices are 1-based)");
        g.adj(i - 1, jj - 1) = e.at(2).get<double>();
    }
    for (const auto& e : j.value("leader", Json::array())) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("graph: leader entries are [i, w]");
        int i = e.at(0).get<int>();
        if (i < 1 || i > g.n) throw ConfigError("graph: leader index out of range");
        g.leader(i - 1) = e.at(1).get<double>();
    }
    g.validate();
    return g;
}

Json graph_to_json(const SignedDigraph& g) {
    Json j;
    j["n"] = g.n;
    Json edges = Json::array(), leader = Json::array();
    for (int i = 0; i < g.n; ++i) {
        for (int jj = 0; jj < g.n; ++jj)
            if (g.adj(i, jj) != 0.0) edges.push_back({i + 1, jj + 1, g.adj(i, jj)});
        if (g.leader(i) != 0.0) leader.push_back({i + 1, g.leader(i)});
    }
    j["edges"] = edges;
    j["leader"] = leader;
    return j;
}

Matrix matrix_from_json(const Json& j) {
    const Json& body = j.is_object() ? j.at("matrix") : j;
    Matrix m = rows_to_matrix(body, -1, "matrix");
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j2 = 0; j2 < m.cols(); ++j2) row.push_back(m(i, j2));
        rows.push_back(row);
    }
    return rows;
}

Json schedule_to_json(const AsyncSchedule& s) {
    Json j;
    j["n"] = s.n;
    j["h"] = s.h;
    j["instants"] = s.instants;
    return j;
}

AsyncSchedule schedule_from_json(const Json& j) {
    check_keys(j, {"n", "h", "instants"}, "schedule");
    AsyncSchedule s;
    s.n = j.at("n").get<int>();
    s.h = j.at("h").get<int>();
    s.instants = j.at("instants").get<std::vector<std::vector<int>>>();
    if (!validate_async(s)) throw ConfigError("schedule: violates s^i_0 = 0 or the gap bound");
    return s;
}

ScenarioSpec spec_from_json(const Json& j) {
    static const std::set<std::string> allowed = {
        "kind", "name", "note", "horizon", "p", "h", "seed", "gains", "graph", "graphs",
        "signal", "interval_bounds", "x_init", "v_init", "leader", "A", "B", "sigma_max",
        "theta_bar", "random_network", "disturbance", "noise", "zeta_bar", "schedule", "P",
        "threshold", "tail_fraction", "assert_constants", "delay_table", "loss_table"};
    check_keys(j, allowed, "config");

    ScenarioSpec s;
    s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    s.name = j.value("name", std::string{});
    s.horizon = j.at("horizon").get<int>();
    s.p = j.value("p", 1);
    s.h = j.value("h", 1);
    s.seed = j.value("seed", 0ULL);
    s.threshold = num_at(j, "threshold", 1e-3);
    s.tail_fraction = num_at(j, "tail_fraction", 0.2);
    s.P_override = j.value("P", -1);

    const Json& gj = j.at("gains");
    check_keys(gj, {"tau", "psi", "gamma", "beta", "alpha", "psi_star", "phi1", "phi2"}, "gains");
    s.gains.tau = num_at(gj, "tau", 0.0);
    s.gains.psi = num_at(gj, "psi", 0.0);
    s.gains.gamma = num_at(gj, "gamma", 0.0);
    s.gains.beta = num_at(gj, "beta", 0.0);
    s.gains.alpha = num_at(gj, "alpha", 0.0);
    s.gains.psi_star = num_at(gj, "psi_star", 0.0);
    s.gains.phi1 = num_at(gj, "phi1", 0.0);
    s.gains.phi2 = num_at(gj, "phi2", 0.0);

    if (s.is_switching()) {
        if (!j.contains("graphs") || !j.contains("signal") || !j.contains("interval_bounds"))
            throw ConfigError("config: switching kinds need graphs, signal, interval_bounds");
        for (const auto& gjson : j.at("graphs")) s.switching.graphs.push_back(graph_from_json(gjson));
        s.switching.signal = j.at("signal").get<std::vector<int>>();
        s.switching.bounds = j.at("interval_bounds").get<std::vector<int>>();
        s.switching.validate();
    } else if (s.kind == ScenarioKind::RandomNetwork) {
        const Json& rj = j.at("random_network");
        check_keys(rj, {"graph", "edge_prob", "probs", "leader_probs", "seed"}, "random_network");
        s.random_net.weights = graph_from_json(rj.at("graph"));
        const int n = s.random_net.weights.n;
        if (rj.contains("edge_prob")) {
            double p = rj.at("edge_prob").get<double>();
            s.random_net.probs = Matrix::Constant(n, n, p);
            s.random_net.leader_probs = Vector::Constant(n, p);
        } else {
            s.random_net.probs = rows_to_matrix(rj.at("probs"), n, "random_network.probs");
            s.random_net.leader_probs = rows_to_matrix(rj.at("leader_probs"), 1,
                                                       "random_network.leader_probs");
        }
        s.random_net.seed = rj.value("seed", 0ULL);
        s.random_net.validate();
    } else {
        s.graph = graph_from_json(j.at("graph"));
    }

    const int n = s.base_graph().n;
    s.x_init = rows_to_matrix(j.at("x_init"), s.p, "x_init");
    if (s.x_init.rows() != n) throw ConfigError("x_init: expected n rows");
    if (j.contains("v_init")) {
        s.v_init = rows_to_matrix(j.at("v_init"), s.p, "v_init");
        if (s.v_init.rows() != n) throw ConfigError("v_init: expected n rows");
    } else {
        s.v_init = Matrix::Zero(n, s.p);
    }

    const Json& lj = j.at("leader");
    check_keys(lj, {"x0", "theta0", "accel_base", "accel_amp", "accel_freq"}, "leader");
    s.leader.x0 = rows_to_matrix(lj.at("x0"), 1, "leader.x0");
    if (lj.contains("theta0")) s.leader.theta0 = rows_to_matrix(lj.at("theta0"), 1, "leader.theta0");
    s.leader.accel_base = num_at(lj, "accel_base", 0.0);
    s.leader.accel_amp = num_at(lj, "accel_amp", 0.0);
    s.leader.accel_freq = num_at(lj, "accel_freq", 0.0);

    if (j.contains("A")) s.A = rows_to_matrix(j.at("A"), -1, "A");
    if (j.contains("B")) s.B = rows_to_matrix(j.at("B"), -1, "B");
    s.sigma_max = j.value("sigma_max", 0);
    s.theta_bar = num_at(j, "theta_bar", 1.0);
    if (j.contains("delay_table")) {
        std::vector<Eigen::MatrixXi> table;
        for (const auto& step : j.at("delay_table")) {
            Eigen::MatrixXi m(n, n + 1);
            if (static_cast<int>(step.size()) != n) throw ConfigError("delay_table: need n rows per step");
            for (int i = 0; i < n; ++i) {
                if (static_cast<int>(step.at(i).size()) != n + 1)
                    throw ConfigError("delay_table: need n+1 delays per row (leader edge last)");
                for (int c = 0; c <= n; ++c) m(i, c) = step.at(i).at(c).get<int>();
            }
            table.push_back(m);
        }
        s.delay_table = std::move(table);
    }
    if (j.contains("loss_table"))
        s.loss_table = j.at("loss_table").get<std::vector<std::uint8_t>>();
    s.zeta_bar = num_at(j, "zeta_bar", 0.0);

    if (j.contains("disturbance")) {
        const Json& dj = j.at("disturbance");
        check_keys(dj, {"delta_edges", "delta_leader"}, "disturbance");
        DisturbanceSpec d;
        d.delta_adj = Matrix::Zero(n, n);
        d.delta_leader = Vector::Zero(n);
        for (const auto& e : dj.value("delta_edges", Json::array())) {
            int i = e.at(0).get<int>(), jj = e.at(1).get<int>();
            d.delta_adj(i - 1, jj - 1) = e.at(2).get<double>();
        }
        for (const auto& e : dj.value("delta_leader", Json::array()))
            d.delta_leader(e.at(0).get<int>() - 1) = e.at(1).get<double>();
        s.disturbance = d;
    }

    if (j.contains("noise")) {
        const Json& nj = j.at("noise");
        check_keys(nj, {"kind", "amplitude", "freq", "bound", "seed"}, "noise");
        std::string kind = nj.value("kind", "none");
        if (kind == "sinusoid")
            s.noise.kind = NoiseSpec::Kind::Sinusoid;
        else if (kind == "random_uniform")
            s.noise.kind = NoiseSpec::Kind::RandomUniform;
        else if (kind == "none")
            s.noise.kind = NoiseSpec::Kind::None;
        else
            throw ConfigError("noise: unknown kind " + kind);
        s.noise.amplitude = num_at(nj, "amplitude", 0.0);
        s.noise.freq = num_at(nj, "freq", 0.0);
        s.noise.bound = num_at(nj, "bound", 0.0);
        s.noise.seed = nj.value("seed", 0ULL);
    }

    if (j.contains("schedule")) s.explicit_schedule = schedule_from_json(j.at("schedule"));

    if (j.contains("assert_constants")) {
        const Json& aj = j.at("assert_constants");
        check_keys(aj, {"d_M", "b_m", "P"}, "assert_constants");
        SignedDigraph base = s.base_graph();
        auto c = graph_constants(base);
        auto mismatch = [&](const std::string& what, double got, double want) {
            throw ConfigError("config: transcribed graph violates the stated constant " + what +
                              " (got " + std::to_string(got) + ", stated " +
                              std::to_string(want) + ")");
        };
        if (aj.contains("d_M") && std::abs(c.d_M - aj.at("d_M").get<double>()) > 1e-12)
            mismatch("d_M", c.d_M, aj.at("d_M").get<double>());
        if (aj.contains("b_m")) {
            if (!c.b_m) throw ConfigError("config: stated b_m but the graph has no leader edge");
            if (std::abs(*c.b_m - aj.at("b_m").get<double>()) > 1e-12)
                mismatch("b_m", *c.b_m, aj.at("b_m").get<double>());
        }
        if (aj.contains("P") && c.P != aj.at("P").get<int>())
            mismatch("P", c.P, aj.at("P").get<int>());
    }

    s.validate();
    return s;
}

Json spec_to_json(const ScenarioSpec& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    if (!s.name.empty()) j["name"] = s.name;
    j["horizon"] = s.horizon;
    j["p"] = s.p;
    j["h"] = s.h;
    j["seed"] = s.seed;
    j["threshold"] = s.threshold;
    j["tail_fraction"] = s.tail_fraction;
    if (s.P_override > 0) j["P"] = s.P_override;
    Json gj;
    if (s.gains.tau != 0.0) gj["tau"] = s.gains.tau;
    if (s.gains.psi != 0.0) gj["psi"] = s.gains.psi;
    if (s.gains.gamma != 0.0) gj["gamma"] = s.gains.gamma;
    if (s.gains.beta != 0.0) gj["beta"] = s.gains.beta;
    if (s.gains.alpha != 0.0) gj["alpha"] = s.gains.alpha;
    if (s.gains.psi_star != 0.0) gj["psi_star"] = s.gains.psi_star;
    if (s.gains.phi1 != 0.0) gj["phi1"] = s.gains.phi1;
    if (s.gains.phi2 != 0.0) gj["phi2"] = s.gains.phi2;
    j["gains"] = gj;
    if (s.is_switching()) {
        Json graphs = Json::array();
        for (const auto& g : s.switching.graphs) graphs.push_back(graph_to_json(g));
        j["graphs"] = graphs;
        j["signal"] = s.switching.signal;
        j["interval_bounds"] = s.switching.bounds;
    } else if (s.kind == ScenarioKind::RandomNetwork) {
        Json rj;
        rj["graph"] = graph_to_json(s.random_net.weights);
        rj["probs"] = matrix_to_json(s.random_net.probs);
        rj["leader_probs"] = matrix_to_json(s.random_net.leader_probs);
        rj["seed"] = s.random_net.seed;
        j["random_network"] = rj;
    } else {
        j["graph"] = graph_to_json(s.graph);
    }
    j["x_init"] = matrix_to_json(s.x_init);
    if (s.v_init.size()) j["v_init"] = matrix_to_json(s.v_init);
    Json lj;
    lj["x0"] = matrix_to_json(s.leader.x0);
    if (s.leader.theta0.size()) lj["theta0"] = matrix_to_json(s.leader.theta0);
    if (s.leader.accel_base != 0.0) lj["accel_base"] = s.leader.accel_base;
    if (s.leader.accel_amp != 0.0) lj["accel_amp"] = s.leader.accel_amp;
    if (s.leader.accel_freq != 0.0) lj["accel_freq"] = s.leader.accel_freq;
    j["leader"] = lj;
    if (s.A.size()) j["A"] = matrix_to_json(s.A);
    if (s.B.size()) j["B"] = matrix_to_json(s.B);
    if (s.kind == ScenarioKind::SecondOrderDelay) j["sigma_max"] = s.sigma_max;
    if (s.kind == ScenarioKind::PacketLoss) j["theta_bar"] = s.theta_bar;
    if (s.delay_table) {
        Json table = Json::array();
        for (const auto& m : *s.delay_table) {
            Json step = Json::array();
            for (int i = 0; i < m.rows(); ++i) {
                Json row = Json::array();
                for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
                step.push_back(row);
            }
            table.push_back(step);
        }
        j["delay_table"] = table;
    }
    if (s.loss_table) j["loss_table"] = *s.loss_table;
    if (s.zeta_bar != 0.0) j["zeta_bar"] = s.zeta_bar;
    if (s.disturbance) {
        Json dj;
        Json de = Json::array(), dl = Json::array();
        for (int i = 0; i < s.graph.n; ++i) {
            for (int jj = 0; jj < s.graph.n; ++jj)
                if (s.disturbance->delta_adj(i, jj) != 0.0)
                    de.push_back({i + 1, jj + 1, s.disturbance->delta_adj(i, jj)});
            if (s.disturbance->delta_leader(i) != 0.0)
                dl.push_back({i + 1, s.disturbance->delta_leader(i)});
        }
        dj["delta_edges"] = de;
        dj["delta_leader"] = dl;
        j["disturbance"] = dj;
    }
    if (s.noise.kind != NoiseSpec::Kind::None) {
        Json nj;
        nj["kind"] = s.noise.kind == NoiseSpec::Kind::Sinusoid ? "sinusoid" : "random_uniform";
        nj["amplitude"] = s.noise.amplitude;
        nj["freq"] = s.noise.freq;
        nj["bound"] = s.noise.bound;
        nj["seed"] = s.noise.seed;
        j["noise"] = nj;
    }
    if (s.explicit_schedule) j["schedule"] = schedule_to_json(*s.explicit_schedule);
    return j;
}

namespace {

Json indices_1based(const std::vector<int>& idx) {
    Json a = Json::array();
    for (int i : idx) a.push_back(i + 1);
    return a;
}

}  // namespace

Json classification_to_json(const Classification& c) {
    Json j;
    j["class"] = to_string(c.cls);
    if (!c.reason.empty()) j["reason"] = c.reason;
    Json sums = Json::array();
    for (Eigen::Index i = 0; i < c.rows.sums.size(); ++i) sums.push_back(c.rows.sums(i));
    j["row_sums"] = sums;
    j["below"] = indices_1based(c.rows.below);
    j["at_one"] = indices_1based(c.rows.at_one);
    j["above"] = indices_1based(c.rows.above);
    j["tol"] = c.rows.tol;
    return j;
}

Json bound_report_to_json(const SpectralBoundReport& r) {
    Json j;
    j["theorem"] = r.theorem;
    j["applicable"] = r.applicable;
    if (!r.reason.empty()) j["reason"] = r.reason;
    if (std::isfinite(r.bound)) j["bound"] = r.bound;
    j["certifies_stability"] = r.certifies_stability;
    if (std::isfinite(r.inequality_value)) j["inequality_value"] = r.inequality_value;
    if (std::isfinite(r.alpha1)) j["alpha1"] = r.alpha1;
    if (std::isfinite(r.alpha2)) j["alpha2"] = r.alpha2;
    if (std::isfinite(r.alpha3)) j["alpha3"] = r.alpha3;
    if (r.chain_len_max > 0) j["chain_len_max"] = r.chain_len_max;
    if (!r.chains.empty()) {
        Json chains = Json::array();
        for (const auto& c : r.chains) {
            Json cj;
            cj["target"] = c.target + 1;
            cj["vertices"] = indices_1based(c.vertices);
            chains.push_back(cj);
        }
        j["chains"] = chains;
    }
    j["numeric_rho"] = r.numeric_rho;
    return j;
}

Json product_report_to_json(const ProductContractionReport& r) {
    Json j;
    j["q"] = r.q;
    j["window_norm"] = r.window_norm;
    j["certified"] = r.certified;
    if (!r.reason.empty()) j["reason"] = r.reason;
    if (std::isfinite(r.g)) j["g"] = r.g;
    if (std::isfinite(r.c)) j["c"] = r.c;
    if (std::isfinite(r.varphi)) j["varphi"] = r.varphi;
    Json w = Json::array();
    for (const auto& it : r.witnesses)
        w.push_back({{"row", it.target_row + 1},
                     {"s1", it.s1 + 1},
                     {"i1", it.i1 + 1},
                     {"s2", it.s2 + 1}});
    j["witnesses"] = w;
    return j;
}

Json gate_report_to_json(const GateReport& r) {
    Json j;
    j["kind"] = to_string(r.kind);
    j["overall"] = r.overall;
    j["notes"] = r.notes;
    Json conds = Json::array();
    for (const auto& c : r.conditions)
        conds.push_back({{"name", c.name}, {"detail", c.detail}, {"holds", c.holds}});
    j["conditions"] = conds;
    return j;
}

Json verdict_to_json(const ConvergenceVerdict& v) {
    Json j;
    j["tracked"] = v.tracked;
    j["bounded_kind"] = v.bounded_kind;
    j["k_converged"] = v.k_converged;
    j["tail_error"] = v.tail_error;
    j["threshold"] = v.threshold;
    if (std::isfinite(v.residual_bound)) j["residual_bound"] = v.residual_bound;
    if (std::isfinite(v.rho)) j["rho"] = v.rho;
    if (std::isfinite(v.cond_J)) j["cond_J"] = v.cond_J;
    return j;
}

Json monte_carlo_to_json(const MonteCarloResult& m) {
    Json j;
    j["replicates"] = m.replicates;
    j["fraction_tracked"] = m.fraction_tracked;
    j["tail_mean_err"] = m.tail_mean_err;
    j["max_sigma_deviation"] = m.max_sigma_deviation;
    j["checkpoints"] = m.checkpoints;
    return j;
}

void trace_to_csv(const SimulationTrace& trace, const ScenarioSpec& spec, std::ostream& os,
                  int flush_every) {
    const int n = spec.base_graph().n;
    os << "k,t";
    for (int c = 0; c < spec.p; ++c) os << ",x0_" << c + 1;
    for (int c = 0; c < spec.p; ++c) os << ",v0_" << c + 1;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < spec.p; ++c) os << ",x" << i + 1 << "_" << c + 1;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < spec.p; ++c) os << ",v" << i + 1 << "_" << c + 1;
    os << ",err_pos_inf,err_vel_inf\n";
    int count = 0;
    for (const auto& r : trace.rows) {
        os << r.k << ',' << r.t;
        for (int c = 0; c < spec.p; ++c) os << ',' << r.x0(c);
        for (int c = 0; c < spec.p; ++c) os << ',' << (r.v0.size() ? r.v0(c) : 0.0);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < spec.p; ++c) os << ',' << r.x(i, c);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < spec.p; ++c) os << ',' << (r.v.size() ? r.v(i, c) : 0.0);
        os << ',' << r.err_pos << ',' << r.err_vel << '\n';
        if (++count % flush_every == 0) os.flush();
    }
    os.flush();
}

std::string trace_plot_data(const SimulationTrace& trace, const ScenarioSpec& spec) {
    const int n = spec.base_graph().n;
    std::ostringstream os;
    os << "# t x0 x1..xn err_pos err_vel (first state coordinate per agent)\n";
    for (const auto& r : trace.rows) {
        os << r.t << ' ' << r.x0(0);
        for (int i = 0; i < n; ++i) os << ' ' << r.x(i, 0);
        os << ' ' << r.err_pos << ' ' << r.err_vel << '\n';
    }
    return os.str();
}

std::string trace_plot_script(const ScenarioSpec& spec, const std::string& data_file) {
    const int n = spec.base_graph().n;
    std::ostringstream os;
    os << "set terminal pngcairo size 900,600\n";
    os << "set output 'trajectories.png'\n";
    os << "set xlabel 't'\nset ylabel 'position'\n";
    os << "plot '" << data_file << "' using 1:2 with lines lw 2 title 'leader'";
    for (int i = 0; i < n; ++i)
        os << ", \\\n  '' using 1:" << i + 3 << " with lines title 'follower " << i + 1 << "'";
    os << "\n";
    return os.str();
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace bitrack
