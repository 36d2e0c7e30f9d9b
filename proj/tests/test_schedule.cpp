#include <doctest.h>

#include "bitrack/schedule.hpp"
#include "bitrack/signed_graph.hpp"

using namespace bitrack;

TEST_CASE("h = 1 degenerates to the synchronous schedule") {
    auto s = generate_async(3, 50, 1, 42);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k <= 50; ++k) CHECK(s.active(i, k));
}

TEST_CASE("generated schedules respect the gap bound for many seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = generate_async(6, 200, 3, seed);
        CHECK(validate_async(s));
        // every window of h consecutive steps contains an instant
        for (int i = 0; i < 6; ++i)
            for (size_t k = 1; k < s.instants[i].size(); ++k)
                CHECK(s.instants[i][k] - s.instants[i][k - 1] <= 3);
    }
}

TEST_CASE("validation rejects a gap of h + 1 and a nonzero start") {
    AsyncSchedule s;
    s.n = 1;
    s.h = 3;
    s.instants = {{0, 2, 6}};  // gap 4
    CHECK_FALSE(validate_async(s));
    s.instants = {{1, 2, 3}};
    CHECK_FALSE(validate_async(s));
    s.instants = {{0, 2, 5}};
    CHECK(validate_async(s));
    CHECK_THROWS_AS(generate_async(2, 10, 0, 1), ConfigError);
}

TEST_CASE("seed determinism of schedules") {
    auto a = generate_async(4, 500, 5, 77);
    auto b = generate_async(4, 500, 5, 77);
    CHECK(a.instants == b.instants);
    auto c = generate_async(4, 500, 5, 78);
    CHECK(a.instants != c.instants);
}

TEST_CASE("delay process: range, zero reduction and determinism") {
    SignedDigraph g = SignedDigraph::zero(3);
    g.adj(1, 0) = 1.0;
    g.leader(0) = 1.0;

    auto zero = sample_delays(g, 0, 5);
    for (int k = 0; k < 20; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(zero.delay(k, i, j) == 0);

    auto d = sample_delays(g, 3, 5);
    auto d2 = sample_delays(g, 3, 5);
    bool nonzero_seen = false;
    for (int k = 0; k < 50; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= 3; ++j) {
                int v = d.delay(k, i, j == 3 ? d.n : j);
                CHECK(v >= 0);
                CHECK(v <= 3);
                CHECK(v == d2.delay(k, i, j == 3 ? d.n : j));
                nonzero_seen = nonzero_seen || v > 0;
            }
    CHECK(nonzero_seen);
}

TEST_CASE("loss process: lossless reduction and empirical mean at 3 sigma") {
    auto lossless = sample_losses(1.0, 3);
    for (int k = 0; k < 100; ++k) CHECK(lossless.delivered(k));

    const int horizon = 20000;
    const double theta = 0.7;
    auto p = sample_losses(theta, 12345);
    int delivered = 0;
    for (int k = 0; k < horizon; ++k) delivered += p.delivered(k);
    double mean = static_cast<double>(delivered) / horizon;
    double sigma = std::sqrt(theta * (1.0 - theta) / horizon);
    CHECK(std::abs(mean - theta) <= 3.0 * sigma);

    CHECK_THROWS_AS(sample_losses(1.2, 0), ConfigError);
}

TEST_CASE("random network: certain edges, expectation and frequency") {
    RandomSignedNetwork net;
    net.weights = SignedDigraph::zero(2);
    net.weights.adj(1, 0) = -2.0;
    net.weights.leader = Vector::Zero(2);
    net.weights.leader(0) = 1.0;
    net.probs = Matrix::Constant(2, 2, 1.0);
    net.leader_probs = Vector::Constant(2, 1.0);
    net.seed = 9;

    for (int k = 0; k < 20; ++k) {
        SignedDigraph r = realize_network(net, k);
        CHECK(r.adj(1, 0) == -2.0);
        CHECK(r.leader(0) == 1.0);
    }

    net.probs = Matrix::Constant(2, 2, 0.25);
    net.leader_probs = Vector::Constant(2, 0.25);
    SignedDigraph e = net.expected();
    CHECK(e.adj(1, 0) == doctest::Approx(-0.5));
    CHECK(e.leader(0) == doctest::Approx(0.25));

    const int draws = 20000;
    int hits = 0;
    for (int k = 0; k < draws; ++k) hits += realize_network(net, k).adj(1, 0) != 0.0;
    double freq = static_cast<double>(hits) / draws;
    double sigma = std::sqrt(0.25 * 0.75 / draws);
    CHECK(std::abs(freq - 0.25) <= 3.0 * sigma);

    net.probs(0, 1) = 1.5;
    CHECK_THROWS_AS(net.validate(), ConfigError);
}
