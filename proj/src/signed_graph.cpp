#include "bitrack/signed_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

namespace bitrack {

SignedDigraph SignedDigraph::zero(int n) {
    SignedDigraph g;
    g.n = n;
    g.adj = Matrix::Zero(n, n);
    g.leader = Vector::Zero(n);
    return g;
}

void SignedDigraph::validate() const {
    if (n < 1) throw ConfigError("graph: n must be >= 1");
    if (adj.rows() != n || adj.cols() != n || leader.size() != n)
        throw ConfigError("graph: adjacency/leader dimensions do not match n");
    if (!adj.allFinite() || !leader.allFinite())
        throw ConfigError("graph: weights must be finite");
    for (int i = 0; i < n; ++i)
        if (adj(i, i) != 0.0) throw ConfigError("graph: self-loop on follower " + std::to_string(i + 1));
}

Matrix SignedDigraph::degree_matrix() const {
    return adj.cwiseAbs().rowwise().sum().asDiagonal();
}

Matrix SignedDigraph::leader_matrix() const {
    return leader.cwiseAbs().asDiagonal();
}

Matrix SignedDigraph::interaction_matrix() const {
    return degree_matrix() + leader_matrix() - adj.cwiseAbs();
}

bool GaugePartition::consistent_with(const SignedDigraph& g) const {
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            double w = g.adj(i, j);
            if (w != 0.0 && (w > 0.0) != (sigma(i) == sigma(j))) return false;
        }
        double b = g.leader(i);
        if (b != 0.0 && (b > 0.0) != (sigma(i) == 1)) return false;
    }
    return true;
}

namespace {

struct SignedLink {
    int to;       // follower index, or -1 for the leader
    int sign;     // +1 same camp, -1 opposite camps
};

// Undirected signed support including the leader (vertex id n).
std::vector<std::vector<SignedLink>> signed_support(const SignedDigraph& g) {
    std::vector<std::vector<SignedLink>> nbr(g.n + 1);
    auto link = [&](int a, int b, double w) {
        int s = w > 0.0 ? 1 : -1;
        nbr[a].push_back({b, s});
        nbr[b].push_back({a, s});
    };
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (g.adj(i, j) != 0.0) link(i, j, g.adj(i, j));
    for (int i = 0; i < g.n; ++i)
        if (g.leader(i) != 0.0) link(i, g.n, g.leader(i));
    return nbr;
}

}  // namespace

BalanceResult gauge_partition(const SignedDigraph& g) {
    g.validate();
    const int n = g.n;
    const int leader_id = n;
    auto nbr = signed_support(g);

    std::vector<int> sigma(n + 1, 0);
    std::vector<int> parent(n + 1, -2);

    // Signed BFS, anchored at the leader first so its component is pinned to +1.
    // Followers in components with no sign constraint at all stay at the +1 default.
    std::vector<int> order;
    order.push_back(leader_id);
    for (int i = 0; i < n; ++i) order.push_back(i);

    for (int start : order) {
        if (sigma[start] != 0) continue;
        sigma[start] = 1;
        parent[start] = -2;
        std::deque<int> queue{start};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const auto& l : nbr[u]) {
                int want = sigma[u] * l.sign;
                if (sigma[l.to] == 0) {
                    sigma[l.to] = want;
                    parent[l.to] = u;
                    queue.push_back(l.to);
                } else if (sigma[l.to] != want) {
                    // Conflict: walk both BFS-tree branches up to the common root.
                    BalanceResult res;
                    std::vector<int> pu, pv;
                    for (int x = u; x != -2; x = parent[x]) pu.push_back(x);
                    for (int x = l.to; x != -2; x = parent[x]) pv.push_back(x);
                    std::vector<char> in_pu(n + 1, 0);
                    for (int x : pu) in_pu[x] = 1;
                    int meet = -1;
                    for (int x : pv)
                        if (in_pu[x]) { meet = x; break; }
                    std::vector<int> cycle;
                    for (int x : pu) { cycle.push_back(x); if (x == meet) break; }
                    std::vector<int> tail;
                    for (int x : pv) { if (x == meet) break; tail.push_back(x); }
                    std::reverse(tail.begin(), tail.end());
                    cycle.insert(cycle.end(), tail.begin(), tail.end());
                    for (int& x : cycle)
                        if (x == leader_id) x = -1;
                    res.witness_cycle = cycle;
                    return res;
                }
            }
        }
    }

    GaugePartition part;
    part.sigma = Eigen::VectorXi(n);
    for (int i = 0; i < n; ++i) part.sigma(i) = sigma[i];
    BalanceResult res;
    res.partition = part;
    return res;
}

Reachability leader_reaches_all(const SignedDigraph& g) {
    g.validate();
    Reachability r;
    r.distance.assign(g.n, -1);
    std::queue<int> queue;
    for (int i = 0; i < g.n; ++i) {
        if (g.leader(i) != 0.0) {
            r.distance[i] = 1;
            queue.push(i);
        }
    }
    while (!queue.empty()) {
        int j = queue.front();
        queue.pop();
        for (int i = 0; i < g.n; ++i) {
            // a_ij != 0 is the edge (v_j, v_i): j -> i
            if (g.adj(i, j) != 0.0 && r.distance[i] < 0) {
                r.distance[i] = r.distance[j] + 1;
                queue.push(i);
            }
        }
    }
    r.holds = true;
    for (int i = 0; i < g.n; ++i) {
        if (r.distance[i] < 0) {
            r.holds = false;
            r.unreachable.push_back(i);
        } else {
            r.eccentricity = std::max(r.eccentricity, r.distance[i]);
        }
    }
    if (!r.holds) r.eccentricity = 0;
    return r;
}

GraphConstants graph_constants(const SignedDigraph& g) {
    g.validate();
    GraphConstants c;
    Vector deg = g.adj.cwiseAbs().rowwise().sum() + g.leader.cwiseAbs();
    c.d_M = g.n > 0 ? deg.maxCoeff() : 0.0;

    double bm = std::numeric_limits<double>::infinity();
    bool any_leader = false;
    for (int i = 0; i < g.n; ++i) {
        if (g.leader(i) != 0.0) {
            any_leader = true;
            bm = std::min(bm, std::abs(g.leader(i)));
        }
    }
    if (any_leader) c.b_m = bm;

    auto reach = leader_reaches_all(g);
    c.reaches_all = reach.holds;
    c.P = reach.eccentricity;

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    auto scan = [&](double w) {
        if (w != 0.0) {
            lo = std::min(lo, std::abs(w));
            hi = std::max(hi, std::abs(w));
        }
    };
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) scan(g.adj(i, j));
        scan(g.leader(i));
    }
    c.rho_lower = std::isfinite(lo) ? lo : 0.0;
    c.rho_upper = hi;
    return c;
}

void SwitchingSequence::validate() const {
    if (graphs.empty()) throw ConfigError("switching: needs at least one graph");
    int n = graphs.front().n;
    for (const auto& g : graphs) {
        g.validate();
        if (g.n != n) throw ConfigError("switching: graphs must share n");
    }
    if (signal.empty()) throw ConfigError("switching: empty signal");
    for (int s : signal)
        if (s < 0 || s >= static_cast<int>(graphs.size()))
            throw ConfigError("switching: signal index out of range");
    if (bounds.size() < 2 || bounds.front() != 0 || bounds.back() != period())
        throw ConfigError("switching: interval bounds must run 0..period");
    for (size_t i = 1; i < bounds.size(); ++i)
        if (bounds[i] <= bounds[i - 1])
            throw ConfigError("switching: interval bounds must be strictly increasing");
}

int SwitchingSequence::interval_start(int j) const {
    int m = intervals_per_period();
    int q = j / m, r = j % m;
    return q * period() + bounds[r];
}

int SwitchingSequence::varsigma() const {
    int v = 0;
    for (size_t i = 1; i < bounds.size(); ++i)
        v = std::max(v, bounds[i] - bounds[i - 1]);
    return v;
}

SignedDigraph union_graph(const SwitchingSequence& seq, int interval_index) {
    seq.validate();
    if (interval_index < 0) throw ConfigError("union_graph: interval index out of range");
    int lo = seq.interval_start(interval_index);
    int hi = seq.interval_start(interval_index + 1);
    SignedDigraph u = SignedDigraph::zero(seq.graphs.front().n);
    for (int k = lo; k < hi; ++k) {
        const SignedDigraph& g = seq.graph_at(k);
        for (int i = 0; i < u.n; ++i) {
            for (int j = 0; j < u.n; ++j)
                if (g.adj(i, j) != 0.0 && u.adj(i, j) == 0.0) u.adj(i, j) = g.adj(i, j);
            if (g.leader(i) != 0.0 && u.leader(i) == 0.0) u.leader(i) = g.leader(i);
        }
    }
    return u;
}

}  // namespace bitrack
