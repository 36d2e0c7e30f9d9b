#include "bitrack/schedule.hpp"

#include <algorithm>

#include "bitrack/rng.hpp"

namespace bitrack {

bool AsyncSchedule::active(int agent, int k) const {
    const auto& v = instants[agent];
    return std::binary_search(v.begin(), v.end(), k);
}

std::vector<bool> AsyncSchedule::active_mask(int k) const {
    std::vector<bool> mask(n);
    for (int i = 0; i < n; ++i) mask[i] = active(i, k);
    return mask;
}

AsyncSchedule generate_async(int n, int horizon, int h, std::uint64_t seed) {
    if (h < 1) throw ConfigError("generate_async: h must be >= 1");
    if (n < 1) throw ConfigError("generate_async: n must be >= 1");
    AsyncSchedule s;
    s.n = n;
    s.h = h;
    s.instants.resize(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, 0x5c4edu, static_cast<std::uint64_t>(i));
        int t = 0;
        s.instants[i].push_back(0);
        while (t <= horizon) {
            t += rng.uniform_int(1, h);
            s.instants[i].push_back(t);
        }
    }
    return s;
}

bool validate_async(const AsyncSchedule& s) {
    if (static_cast<int>(s.instants.size()) != s.n || s.h < 1) return false;
    for (const auto& v : s.instants) {
        if (v.empty() || v.front() != 0) return false;
        for (size_t k = 1; k < v.size(); ++k) {
            int gap = v[k] - v[k - 1];
            if (gap < 1 || gap > s.h) return false;
        }
    }
    return true;
}

AsyncSchedule synchronous_schedule(int n, int horizon) {
    AsyncSchedule s;
    s.n = n;
    s.h = 1;
    s.instants.assign(n, {});
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= horizon + 1; ++k) s.instants[i].push_back(k);
    return s;
}

int DelayProcess::delay(int k, int i, int j) const {
    if (sigma_max == 0) return 0;
    if (table) return (*table)[k](i, j);
    Rng rng(seed, 0xde1a9u ^ static_cast<std::uint64_t>(k),
            static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    return rng.uniform_int(0, sigma_max);
}

int DelayProcess::leader_delay(int k, int i) const { return delay(k, i, n); }

DelayProcess sample_delays(const SignedDigraph& g, int sigma_max, std::uint64_t seed) {
    if (sigma_max < 0) throw ConfigError("sample_delays: sigma_max must be >= 0");
    DelayProcess d;
    d.n = g.n;
    d.sigma_max = sigma_max;
    d.seed = seed;
    return d;
}

bool LossProcess::delivered(int k) const {
    if (table) return (*table)[k] != 0;
    Rng rng(seed, 0x105eu, static_cast<std::uint64_t>(k));
    return rng.bernoulli(theta_bar);
}

LossProcess sample_losses(double theta_bar, std::uint64_t seed) {
    if (theta_bar < 0.0 || theta_bar > 1.0)
        throw ConfigError("sample_losses: theta_bar must lie in [0,1]");
    LossProcess p;
    p.theta_bar = theta_bar;
    p.seed = seed;
    return p;
}

void RandomSignedNetwork::validate() const {
    weights.validate();
    if (probs.rows() != weights.n || probs.cols() != weights.n ||
        leader_probs.size() != weights.n)
        throw ConfigError("random network: probability dimensions do not match n");
    if (probs.minCoeff() < 0.0 || probs.maxCoeff() > 1.0 ||
        leader_probs.minCoeff() < 0.0 || leader_probs.maxCoeff() > 1.0)
        throw ConfigError("random network: probabilities must lie in [0,1]");
}

SignedDigraph RandomSignedNetwork::expected() const {
    validate();
    SignedDigraph e = SignedDigraph::zero(weights.n);
    e.adj = probs.cwiseProduct(weights.adj);
    e.leader = leader_probs.cwiseProduct(weights.leader);
    return e;
}

SignedDigraph realize_network(const RandomSignedNetwork& r, int k) {
    r.validate();
    SignedDigraph g = SignedDigraph::zero(r.weights.n);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (r.weights.adj(i, j) == 0.0) continue;
            Rng rng(r.seed, 0xed6e5u ^ static_cast<std::uint64_t>(k),
                    static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
            if (rng.bernoulli(r.probs(i, j))) g.adj(i, j) = r.weights.adj(i, j);
        }
        if (r.weights.leader(i) != 0.0) {
            Rng rng(r.seed, 0xed6e5u ^ static_cast<std::uint64_t>(k),
                    static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(g.n));
            if (rng.bernoulli(r.leader_probs(i))) g.leader(i) = r.weights.leader(i);
        }
    }
    return g;
}

}  // namespace bitrack
