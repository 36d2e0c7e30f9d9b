#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "bitrack/rng.hpp"
#include "bitrack/stochastic_matrix.hpp"
#include "spec_helpers.hpp"

using namespace bitrack;
using namespace bitrack::testspec;

namespace {

std::vector<bool> none(int n) { return std::vector<bool>(n, false); }
std::vector<bool> all(int n) { return std::vector<bool>(n, true); }

SignedDigraph random_balanced(Rng& rng, int n, bool ensure_leader = true) {
    SignedDigraph g = SignedDigraph::zero(n);
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = rng.bernoulli(0.5) ? 1 : -1;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j && rng.bernoulli(0.3))
                g.adj(i, j) = rng.uniform(0.2, 1.0) * sigma[i] * sigma[j];
        if (rng.bernoulli(0.5)) g.leader(i) = rng.uniform(0.2, 1.0) * sigma[i];
    }
    if (ensure_leader && g.leader.cwiseAbs().maxCoeff() == 0.0) g.leader(0) = sigma[0];
    return g;
}

}  // namespace

TEST_CASE("M(k): inactive step is the identity, scalar case, example gains") {
    auto spec = load_preset("example-3.4");
    const auto& g = spec.graph;

    Matrix m_idle = build_first_order(g, none(6), spec.gains);
    CHECK((m_idle - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

    Matrix m = build_first_order(g, all(6), spec.gains);
    auto cls = classify(m);
    CHECK(cls.cls == StochClass::SubStochastic);
    CHECK(m.diagonal().minCoeff() > 0.0);
    // active row sums: 1 - tau psi |a_i0|
    Vector sums = row_sums(m);
    for (int i = 0; i < 6; ++i)
        CHECK(sums(i) == doctest::Approx(1.0 - 0.2 * 2.0 * std::abs(g.leader(i))).epsilon(1e-12));

    SignedDigraph lone = SignedDigraph::zero(1);
    lone.leader(0) = 1.0;
    GainParameters gp;
    gp.tau = 0.2;
    gp.psi = 2.0;
    Matrix scalar = build_first_order(lone, all(1), gp);
    CHECK(scalar(0, 0) == doctest::Approx(1.0 - 0.4).epsilon(1e-12));
}

TEST_CASE("C(k): block structure, row-sum identity and classification") {
    GainParameters gp;
    gp.tau = 0.25;
    gp.gamma = 4.0;  // gamma tau = 1
    SignedDigraph g = SignedDigraph::zero(2);
    g.leader(0) = 1.0;
    g.adj(1, 0) = 1.0;
    Matrix c_idle = build_second_order_static(g, none(2), gp);
    Matrix expect(4, 4);
    expect << 0.5, 0.0, 0.5, 0.0,
              0.0, 0.5, 0.0, 0.5,
              0.5, 0.0, 0.5, 0.0,
              0.0, 0.5, 0.0, 0.5;
    CHECK((c_idle - expect).cwiseAbs().maxCoeff() < 1e-15);

    auto spec = load_preset("example-4.5");
    ScenarioContext ctx = prepare(spec);
    Rng rng(3);
    for (int k = 0; k < 30; ++k) {
        Matrix c = build_second_order_static(spec.graph, ctx.schedule.active_mask(k), spec.gains);
        auto cls = classify(c);
        CHECK(cls.cls == StochClass::SubStochastic);
        CHECK(c.diagonal().minCoeff() > 0.0);
        Vector sums = row_sums(c);
        for (int i = 0; i < 6; ++i) {
            CHECK(sums(i) == doctest::Approx(1.0).epsilon(1e-12));
            bool active_leader = ctx.schedule.active(i, k) && spec.graph.leader(i) != 0.0;
            if (active_leader)
                CHECK(sums(6 + i) < 1.0 - kTol);
            else
                CHECK(sums(6 + i) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("H(k)/Psi(k): Lemma 5.2 row sums and |H| = Psi") {
    auto spec = load_preset("example-5.7");
    ScenarioContext ctx = prepare(spec);
    const double tb = spec.gains.tau / spec.gains.beta;
    const double tab = spec.gains.tau / (spec.gains.alpha * spec.gains.beta);
    const double atb = spec.gains.alpha * spec.gains.tau / spec.gains.beta;

    for (int k = 0; k < 40; ++k) {
        auto mask = ctx.schedule.active_mask(k);
        auto hp = build_second_order_active(spec.graph, mask, spec.gains);
        CHECK((hp.H.cwiseAbs() - hp.Psi).cwiseAbs().maxCoeff() < 1e-15);
        auto cls = classify(hp.Psi);
        CHECK(cls.cls == StochClass::SuperStochastic);
        Vector sums = row_sums(hp.Psi);
        for (int i = 0; i < 6; ++i) {
            CHECK(sums(i) == doctest::Approx(1.0 - tb + tab).epsilon(1e-12));
            double expected = 1.0 + atb + tb;
            if (mask[i] && spec.graph.leader(i) != 0.0)
                expected -= spec.gains.beta * spec.gains.tau * std::abs(spec.graph.leader(i));
            CHECK(sums(6 + i) == doctest::Approx(expected).epsilon(1e-12));
        }
    }

    SUBCASE("fully inactive step: all lower rows exceed one") {
        auto hp = build_second_order_active(spec.graph, none(6), spec.gains);
        Vector sums = row_sums(hp.Psi);
        for (int i = 0; i < 6; ++i) CHECK(sums(6 + i) > 1.0);
    }

    SUBCASE("|H| = Psi on random balanced graphs") {
        Rng rng(21);
        for (int trial = 0; trial < 100; ++trial) {
            SignedDigraph g = random_balanced(rng, rng.uniform_int(2, 6));
            GainParameters gp;
            gp.tau = 0.01;
            gp.beta = 5.0;
            gp.alpha = 1.05;
            std::vector<bool> mask(g.n);
            for (int i = 0; i < g.n; ++i) mask[i] = rng.bernoulli(0.6);
            auto hp = build_second_order_active(g, mask, gp);
            CHECK((hp.H.cwiseAbs() - hp.Psi).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("lifted digraph satisfies B1, B2 and B4") {
    auto spec = load_preset("example-5.7");
    ScenarioContext ctx = prepare(spec);
    const int n = 6;
    for (int k = 0; k < 20; ++k) {
        auto mask = ctx.schedule.active_mask(k);
        auto hp = build_second_order_active(spec.graph, mask, spec.gains);
        EdgeSet e = build_lifted_digraph(hp.Psi);
        CHECK(e.vertex_count == 2 * n + 1);
        for (int u = 0; u < n; ++u) {
            bool leader_edge_active = mask[u] && spec.graph.leader(u) != 0.0;
            CHECK(e.contains(0, u + n + 1) == leader_edge_active);  // B1
            CHECK(e.contains(u + n + 1, u + 1));                    // B2
        }
        for (int v = 0; v < e.vertex_count; ++v) CHECK(e.contains(v, v));  // B4
    }
}

TEST_CASE("E(k): delay-free reduction, companion rows, adjacency split") {
    auto base = load_preset("example-4.5");

    SUBCASE("sigma_max = 0 reduces to the synchronous C matrix") {
        auto spec = delay_spec(0);
        ScenarioContext ctx = prepare(spec);
        Matrix e = build_delay(spec.graph, ctx.delays, 0, spec.gains);
        Matrix c = build_second_order_static(base.graph, all(6), base.gains);
        CHECK((e - c).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("row sums: top rows 1, control rows 1 - (2 tau/gamma) b_i, companion rows exactly 1") {
        auto spec = delay_spec(2);
        ScenarioContext ctx = prepare(spec);
        for (int k = 0; k < 25; ++k) {
            Matrix e = build_delay(spec.graph, ctx.delays, k, spec.gains);
            auto cls = classify(e);
            CHECK(cls.cls == StochClass::SubStochastic);
            Vector sums = row_sums(e);
            for (int i = 0; i < 6; ++i) {
                CHECK(sums(i) == doctest::Approx(1.0).epsilon(1e-12));
                double expect = 1.0 - 2.0 * spec.gains.tau / spec.gains.gamma *
                                          std::abs(spec.graph.leader(i));
                CHECK(sums(6 + i) == doctest::Approx(expect).epsilon(1e-12));
            }
            for (int r = 12; r < e.rows(); ++r)
                CHECK(sums(r) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("switching builders: Phi_k classification and |N_k| = Gamma_k") {
    auto spec = load_preset("example-8.2");
    for (const auto& gk : spec.switching.graphs) {
        Matrix phi = build_switch_static(gk, spec.gains);
        CHECK(classify(phi).cls == StochClass::SubStochastic);
        CHECK(phi.diagonal().minCoeff() > 0.0);
    }

    SUBCASE("constant one-graph sequence equals the fully active C") {
        Matrix phi = build_switch_static(spec.switching.graphs[0], spec.gains);
        Matrix c = build_second_order_static(spec.switching.graphs[0], all(6), spec.gains);
        CHECK((phi - c).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("active switching: Lemma 8.3 row-sum cases") {
        auto sa = switch_active_spec();
        const auto& gp = sa.gains;
        const double tb = gp.tau / gp.beta;
        const double atb = gp.alpha * gp.tau / gp.beta;
        for (const auto& gk : sa.switching.graphs) {
            auto pair = build_switch_active(gk, gp);
            CHECK((pair.H.cwiseAbs() - pair.Psi).cwiseAbs().maxCoeff() < 1e-15);
            auto cls = classify(pair.Psi);
            CHECK(cls.cls == StochClass::SuperStochastic);
            CHECK(pair.Psi.diagonal().minCoeff() > 0.0);
            Vector sums = row_sums(pair.Psi);
            const int n = gk.n;
            for (int i = 0; i < n; ++i) {
                CHECK(sums(i) == doctest::Approx(1.0 - tb + gp.tau / (gp.alpha * gp.beta)));
                if (gk.leader(i) != 0.0)
                    CHECK(sums(n + i) <= 1.0 + atb + tb - gp.beta * gp.tau * 1.0 + 1e-12);
                else
                    CHECK(sums(n + i) == doctest::Approx(1.0 + atb + tb));
            }
        }
    }
}

TEST_CASE("loss matrices: open-loop norm and the lossless reduction") {
    auto spec = packet_loss_spec(1.0);
    LossMatrices lm = build_loss(spec.graph, spec.gains);
    CHECK((lm.H.cwiseAbs() - lm.Psi).cwiseAbs().maxCoeff() < 1e-15);
    double expected_norm =
        1.0 + spec.gains.alpha * spec.gains.tau / spec.gains.beta + spec.gains.tau / spec.gains.beta;
    CHECK(infinity_norm(lm.H_star) == doctest::Approx(expected_norm).epsilon(1e-12));

    ScenarioContext ctx = prepare(spec);
    for (int k = 0; k < 10; ++k) {
        Matrix t = transition_matrix(spec, ctx, k);
        CHECK((t - lm.H).cwiseAbs().maxCoeff() == 0.0);  // theta_bar = 1: never open loop
    }
}

TEST_CASE("expected random-network matrix") {
    SUBCASE("p = 1 equals the deterministic H") {
        auto spec = random_network_spec(1.0);
        Matrix eh = build_expected(spec.random_net, spec.gains);
        Matrix h = build_second_order_active(spec.random_net.weights,
                                             all(spec.random_net.weights.n), spec.gains).H;
        CHECK((eh - h).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("p = 0 on leader edges: gate reports the missing b_m") {
        auto spec = random_network_spec(0.5);
        spec.random_net.leader_probs.setZero();
        auto rep = gate(spec);
        CHECK_FALSE(rep.overall);
        bool saw = false;
        for (const auto& c : rep.conditions)
            if (!c.holds && c.detail.find("b_m absent") != std::string::npos) saw = true;
        CHECK(saw);
    }

    SUBCASE("Monte Carlo mean of realized matrices approaches E[H] at 3 sigma") {
        auto spec = random_network_spec(0.5);
        const int n = spec.random_net.weights.n;
        Matrix eh = build_expected(spec.random_net, spec.gains);
        const int draws = 10000;
        Matrix sum = Matrix::Zero(2 * n, 2 * n), sum2 = Matrix::Zero(2 * n, 2 * n);
        for (int k = 0; k < draws; ++k) {
            SignedDigraph g = realize_network(spec.random_net, k);
            Matrix h = build_second_order_active(g, all(n), spec.gains).H;
            sum += h;
            sum2 += h.cwiseProduct(h);
        }
        Matrix mean = sum / draws;
        Matrix var = (sum2 - draws * mean.cwiseProduct(mean)) / (draws - 1);
        Matrix se = (var.cwiseMax(0.0) / draws).cwiseSqrt();
        for (int i = 0; i < 2 * n; ++i)
            for (int j = 0; j < 2 * n; ++j) {
                double diff = std::abs(mean(i, j) - eh(i, j));
                if (se(i, j) > 1e-15)
                    CHECK(diff <= 3.5 * se(i, j));
                else
                    CHECK(diff < 1e-12);
            }
    }
}

TEST_CASE("disturbed builders") {
    SUBCASE("zero disturbance reduces to the undisturbed matrices") {
        auto spec = disturb_static_spec();
        spec.disturbance->delta_adj.setZero();
        spec.disturbance->delta_leader.setZero();
        ScenarioContext ctx = prepare(spec);
        Matrix c = transition_matrix(spec, ctx, 0);
        Matrix c0 = build_second_order_static(spec.graph, all(6), spec.gains);
        CHECK((c - c0).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("sign-pattern mismatch is rejected") {
        auto spec = disturb_static_spec();
        spec.disturbance->delta_adj(1, 0) = -2.0;  // flips a positive edge
        CHECK_THROWS_AS(disturbed_graph(spec.graph, *spec.disturbance), ConfigError);
        spec.disturbance->delta_adj(1, 0) = 0.0;
        spec.disturbance->delta_adj(0, 1) = 0.5;  // creates a new edge
        CHECK_THROWS_AS(disturbed_graph(spec.graph, *spec.disturbance), ConfigError);
    }

    SUBCASE("C + dC stays sub-stochastic under the (11.3) gate, randomized") {
        Rng rng(41);
        int tested = 0;
        for (int trial = 0; trial < 100; ++trial) {
            SignedDigraph g = random_balanced(rng, rng.uniform_int(2, 6));
            DisturbanceSpec d;
            d.delta_adj = Matrix::Zero(g.n, g.n);
            d.delta_leader = Vector::Zero(g.n);
            // same type: nonzero deltas share the sign of the disturbed entry
            for (int i = 0; i < g.n; ++i) {
                for (int j = 0; j < g.n; ++j)
                    if (g.adj(i, j) != 0.0)
                        d.delta_adj(i, j) = g.adj(i, j) * rng.uniform(0.0, 0.2);
                if (g.leader(i) != 0.0)
                    d.delta_leader(i) = g.leader(i) * rng.uniform(0.0, 0.2);
            }
            SignedDigraph dist = disturbed_graph(g, d);
            auto c = graph_constants(dist);
            GainParameters gp;
            gp.tau = 0.05;
            gp.gamma = 2.0 * std::sqrt(c.d_M) + 0.1;
            if (gp.gamma >= 2.0 / gp.tau) continue;
            ++tested;
            Matrix cd = build_second_order_static(dist, all(g.n), gp);
            CHECK(classify(cd).cls == StochClass::SubStochastic);
        }
        CHECK(tested > 60);
    }

    SUBCASE("row sums of the disturbed active matrix match the three cases") {
        auto spec = disturb_active_spec();
        ScenarioContext ctx = prepare(spec);
        Matrix psi = build_second_order_active(ctx.effective_graph, all(6), spec.gains).Psi;
        Vector sums = row_sums(psi);
        const auto& gp = spec.gains;
        const double tb = gp.tau / gp.beta;
        const double atb = gp.alpha * gp.tau / gp.beta;
        for (int i = 0; i < 6; ++i) {
            CHECK(sums(i) == doctest::Approx(1.0 - tb + gp.tau / (gp.alpha * gp.beta)).epsilon(1e-12));
            double b = std::abs(ctx.effective_graph.leader(i));
            CHECK(sums(6 + i) ==
                  doctest::Approx(1.0 + atb + tb - gp.beta * gp.tau * b).epsilon(1e-12));
        }
    }
}

TEST_CASE("noise and estimation systems: stability of the example gains") {
    auto noise = load_preset("example-12.7");
    NoiseSystem ns = build_noise_system(noise.graph, noise.gains);
    CHECK(spectral_radius(ns.Omega1) < 1.0);
    // exact value is 0.9 (double root of lambda^2 - 1.8 lambda + 0.81), but the
    // chain topology makes Omega1 defective, so computed eigenvalues scatter
    // by O(eps^(1/m)) around it
    CHECK(spectral_radius(ns.Omega1) == doctest::Approx(0.9).epsilon(5e-3));
    CHECK(ns.Omega2.rows() == 12);
    CHECK(ns.Omega2.cols() == 6);

    auto est = load_preset("example-13.3");
    EstimationSystem es = build_estimation_system(est.graph, est.gains);
    CHECK(spectral_radius(es.Upsilon1) < 1.0);
    CHECK(es.Upsilon2.rows() == 12);

    SUBCASE("interaction matrix of C1+C2 graphs has eigenvalues with positive real part") {
        Rng rng(51);
        int tested = 0;
        for (int trial = 0; trial < 100; ++trial) {
            SignedDigraph g = random_balanced(rng, rng.uniform_int(2, 6));
            if (!leader_reaches_all(g).holds) continue;
            ++tested;
            Eigen::EigenSolver<Matrix> solver(g.interaction_matrix(), false);
            for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
                CHECK(solver.eigenvalues()(i).real() > 0.0);
        }
        CHECK(tested > 30);
    }
}

TEST_CASE("gates of the worked examples") {
    SUBCASE("example-3.4 holds; psi = 3 breaks (3.7)") {
        auto spec = load_preset("example-3.4");
        auto rep = gate(spec);
        CHECK(rep.overall);
        spec.gains.psi = 3.0;
        auto rep2 = gate(spec);
        CHECK_FALSE(rep2.overall);
    }

    SUBCASE("example-4.5 holds") { CHECK(gate(load_preset("example-4.5")).overall); }

    SUBCASE("example-5.7: (5.7) holds but (5.17) fails; note says sufficient-only") {
        auto rep = gate(load_preset("example-5.7"));
        CHECK_FALSE(rep.overall);
        bool eq57_lower = false, eq57_upper = false, eq517 = false;
        for (const auto& c : rep.conditions) {
            if (c.name == "eq-5.7-lower") eq57_lower = c.holds;
            if (c.name == "eq-5.7-upper") eq57_upper = c.holds;
            if (c.name == "eq-5.17") eq517 = c.holds;
        }
        CHECK(eq57_lower);
        CHECK(eq57_upper);
        CHECK_FALSE(eq517);
        CHECK(rep.notes.find("sufficient") != std::string::npos);
    }

    SUBCASE("example-6.4: rho(A) = 1.0001 < 1.0002 with Ph = 6") {
        auto spec = load_preset("example-6.4");
        auto rep = gate(spec);
        CHECK(rep.overall);
        double threshold = 1.0 / std::pow(1.0 - (1.0 / 3.0) * std::pow(1.0 / 3.0, 5), 1.0 / 6.0);
        CHECK(threshold == doctest::Approx(1.0002).epsilon(1e-4));
        CHECK(spectral_radius(spec.A) == doctest::Approx(1.0001).epsilon(1e-4));
        CHECK(spectral_radius(spec.A) < threshold);
    }

    SUBCASE("example-8.2 and the synthetic switching-active spec hold") {
        CHECK(gate(load_preset("example-8.2")).overall);
        CHECK(gate(switch_active_spec()).overall);
    }

    SUBCASE("packet loss: gate holds for theta_bar > 0 and fails at 0") {
        CHECK(gate(packet_loss_spec(0.3)).overall);
        CHECK_FALSE(gate(packet_loss_spec(0.0)).overall);
    }

    SUBCASE("random network gate holds at p = 0.5") {
        CHECK(gate(random_network_spec(0.5)).overall);
    }

    SUBCASE("disturbance gates hold for the synthetic specs") {
        CHECK(gate(disturb_static_spec()).overall);
        CHECK(gate(disturb_active_spec()).overall);
    }

    SUBCASE("noise and estimation gates hold for the example presets") {
        CHECK(gate(load_preset("example-12.7")).overall);
        CHECK(gate(load_preset("example-13.3")).overall);
    }

    SUBCASE("gamma above 2/tau breaks (4.7)") {
        auto spec = load_preset("example-4.5");
        spec.gains.gamma = 12.0;  // 2/tau = 10
        CHECK_FALSE(gate(spec).overall);
    }
}

TEST_CASE("step_agents: fixed points and leader behavior") {
    SUBCASE("static leader never moves") {
        auto spec = load_preset("example-3.4");
        ScenarioContext ctx = prepare(spec);
        AgentState st = initial_state(spec);
        for (int k = 0; k < 50; ++k) step_agents(spec, ctx, st);
        CHECK(st.x0(0) == 2.0);
    }

    SUBCASE("zero initial error stays zero") {
        auto spec = load_preset("example-4.5");
        ScenarioContext ctx = prepare(spec);
        for (int i = 0; i < 6; ++i)
            spec.x_init(i, 0) = ctx.sigma.sigma(i) * spec.leader.x0(0);
        spec.v_init.setZero();
        AgentState st = initial_state(spec);
        for (int k = 0; k < 100; ++k) {
            auto err = error_coordinates(spec, ctx, st);
            CHECK(err.err_pos_inf == doctest::Approx(0.0).epsilon(1e-15));
            CHECK(err.err_vel_inf == doctest::Approx(0.0).epsilon(1e-15));
            step_agents(spec, ctx, st);
        }
    }
}

TEST_CASE("error coordinates: direct substitution and round trip") {
    SUBCASE("n = 1 static-leader stack is [delta, delta + 2 v / gamma]") {
        ScenarioSpec spec;
        spec.kind = ScenarioKind::SecondOrderStaticAsync;
        spec.graph = SignedDigraph::zero(1);
        spec.graph.leader(0) = 1.0;
        spec.gains.tau = 0.1;
        spec.gains.gamma = 4.0;
        spec.horizon = 10;
        spec.h = 1;
        spec.x_init = Matrix::Constant(1, 1, 3.0);
        spec.v_init = Matrix::Constant(1, 1, 0.7);
        spec.leader.x0 = Vector::Constant(1, 1.0);
        ScenarioContext ctx = prepare(spec);
        AgentState st = initial_state(spec);
        auto err = error_coordinates(spec, ctx, st);
        double delta = 3.0 - 1.0;
        CHECK(err.stacked(0, 0) == doctest::Approx(delta));
        CHECK(err.stacked(1, 0) == doctest::Approx(delta + 2.0 * 0.7 / 4.0));
    }

    SUBCASE("positions reconstruct from e_x and the leader state") {
        auto spec = load_preset("example-5.7");
        ScenarioContext ctx = prepare(spec);
        AgentState st = initial_state(spec);
        for (int k = 0; k < 20; ++k) step_agents(spec, ctx, st);
        auto err = error_coordinates(spec, ctx, st);
        for (int i = 0; i < 6; ++i) {
            double sigma = ctx.sigma.sigma(i);
            double reconstructed = sigma * (err.e_x(i, 0) + st.x0(0));
            CHECK(reconstructed == doctest::Approx(st.x(i, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gauge invariance: flipping a camp and its cut edges leaves errors unchanged") {
    auto spec = load_preset("example-3.4");
    ScenarioContext ctx = prepare(spec);

    // flip followers {1, 2} (0-based): negate their rows/cols and leader edges
    ScenarioSpec flipped = spec;
    std::vector<double> flip(6, 1.0);
    flip[1] = flip[2] = -1.0;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) flipped.graph.adj(i, j) = spec.graph.adj(i, j) * flip[i] * flip[j];
        flipped.graph.leader(i) = spec.graph.leader(i) * flip[i];
        flipped.x_init(i, 0) = spec.x_init(i, 0) * flip[i];
    }
    ScenarioContext fctx = prepare(flipped);
    AgentState a = initial_state(spec), b = initial_state(flipped);
    for (int k = 0; k <= 60; ++k) {
        auto ea = error_coordinates(spec, ctx, a);
        auto eb = error_coordinates(flipped, fctx, b);
        CHECK((ea.e_x - eb.e_x).cwiseAbs().maxCoeff() < 1e-12);
        step_agents(spec, ctx, a);
        step_agents(flipped, fctx, b);
    }
}
