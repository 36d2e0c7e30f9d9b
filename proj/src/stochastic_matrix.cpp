#include "bitrack/stochastic_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>

namespace bitrack {

std::string to_string(StochClass c) {
    switch (c) {
        case StochClass::SubStochastic: return "sub-stochastic";
        case StochClass::SuperStochastic: return "super-stochastic";
        default: return "neither";
    }
}

Classification classify(const Matrix& F, double tol) {
    if (F.rows() != F.cols()) throw ConfigError("classify: matrix must be square");
    Classification out;
    out.rows.tol = tol;
    out.rows.sums = row_sums(F);
    if (!is_nonnegative(F, tol)) {
        out.cls = StochClass::Neither;
        out.reason = "matrix has a negative entry";
        return out;
    }
    const int n = static_cast<int>(F.rows());
    for (int i = 0; i < n; ++i) {
        double s = out.rows.sums(i);
        if (s < 1.0 - tol)
            out.rows.below.push_back(i);
        else if (s > 1.0 + tol)
            out.rows.above.push_back(i);
        else
            out.rows.at_one.push_back(i);
    }
    out.cls = out.rows.above.empty() ? StochClass::SubStochastic : StochClass::SuperStochastic;
    return out;
}

namespace {

// Shortest chains from any deficient source to each target, over the digraph
// with an edge u -> v iff [F]_{vu} > tol. Multi-source BFS; ties break toward
// the smaller source / predecessor index by visit order.
struct ChainSearch {
    std::vector<Chain> chains;  // one per target, in target order
    bool complete = true;
    int max_len = 0;
};

ChainSearch shortest_chains(const Matrix& F, const std::vector<int>& sources,
                            const std::vector<int>& targets, double tol) {
    const int n = static_cast<int>(F.rows());
    std::vector<int> dist(n, -1), pred(n, -1);
    std::deque<int> queue;
    for (int s : sources) {
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < n; ++v) {
            if (v == u) continue;
            if (F(v, u) > tol && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                pred[v] = u;
                queue.push_back(v);
            }
        }
    }
    ChainSearch out;
    for (int t : targets) {
        if (dist[t] < 1) {  // unreachable (sources and targets are disjoint row classes)
            out.complete = false;
            continue;
        }
        Chain c;
        c.target = t;
        for (int x = t; x != -1; x = pred[x]) c.vertices.push_back(x);
        std::reverse(c.vertices.begin(), c.vertices.end());
        out.chains.push_back(c);
        out.max_len = std::max(out.max_len, c.length());
    }
    return out;
}

double max_of(const Vector& sums, const std::vector<int>& idx) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i : idx) m = std::max(m, sums(i));
    return m;
}

}  // namespace

SpectralBoundReport bound_sub_chain(const Matrix& F, const Classification& cls) {
    SpectralBoundReport r;
    r.theorem = "2.2";
    r.numeric_rho = spectral_radius(F);
    if (cls.cls != StochClass::SubStochastic) {
        r.reason = "matrix is not sub-stochastic";
        return r;
    }
    if (cls.rows.below.empty() || cls.rows.at_one.empty()) {
        r.reason = "S1 or S2 empty";
        return r;
    }
    auto search = shortest_chains(F, cls.rows.below, cls.rows.at_one, cls.rows.tol);
    r.chains = search.chains;
    if (!search.complete) {
        r.reason = "no non-zero element chain reaches some row of S2";
        return r;
    }
    r.alpha1 = max_of(cls.rows.sums, cls.rows.below);
    r.alpha2 = min_positive_entry(F, cls.rows.tol);
    r.chain_len_max = search.max_len;
    r.bound = std::pow(1.0 - (1.0 - r.alpha1) * std::pow(r.alpha2, r.chain_len_max),
                       1.0 / (r.chain_len_max + 1));
    r.applicable = true;
    r.certifies_stability = r.bound < 1.0;
    return r;
}

SpectralBoundReport bound_sub_zero_diag(const Matrix& F, const Classification& cls) {
    SpectralBoundReport r;
    r.theorem = "2.3";
    r.numeric_rho = spectral_radius(F);
    if (cls.cls != StochClass::SubStochastic) {
        r.reason = "matrix is not sub-stochastic";
        return r;
    }
    if (F.diagonal().cwiseAbs().maxCoeff() > cls.rows.tol) {
        r.reason = "diagonal is not zero";
        return r;
    }
    if (cls.rows.at_one.size() != 1) {
        r.reason = "|S2| != 1";
        return r;
    }
    if (cls.rows.below.empty()) {
        r.reason = "S1 empty";
        return r;
    }
    r.alpha1 = max_of(cls.rows.sums, cls.rows.below);
    r.bound = std::sqrt(r.alpha1);
    r.applicable = true;
    r.certifies_stability = r.bound < 1.0;
    return r;
}

SpectralBoundReport bound_super_chain(const Matrix& F, const Classification& cls) {
    SpectralBoundReport r;
    r.theorem = "2.6";
    r.numeric_rho = spectral_radius(F);
    if (cls.cls != StochClass::SuperStochastic) {
        r.reason = "matrix is not super-stochastic";
        return r;
    }
    // R1 = rows < 1, R2 = rows >= 1
    std::vector<int> r2 = cls.rows.at_one;
    r2.insert(r2.end(), cls.rows.above.begin(), cls.rows.above.end());
    std::sort(r2.begin(), r2.end());
    if (cls.rows.below.empty() || r2.empty()) {
        r.reason = "R1 or R2 empty";
        return r;
    }
    auto search = shortest_chains(F, cls.rows.below, r2, cls.rows.tol);
    r.chains = search.chains;
    if (!search.complete) {
        r.reason = "no non-zero element chain reaches some row of R2";
        return r;
    }
    r.alpha1 = max_of(cls.rows.sums, cls.rows.below);
    r.alpha2 = min_positive_entry(F, cls.rows.tol);
    r.alpha3 = max_of(cls.rows.sums, r2);
    r.chain_len_max = search.max_len;
    double inner = std::pow(r.alpha3, r.chain_len_max + 1) -
                   (r.alpha3 - r.alpha1) * std::pow(r.alpha2, r.chain_len_max);
    // The chain argument gives ||F^(|C*|+1)|| <= inner, so the spectral bound
    // carries exponent 1/(|C*|+1). The inequality check itself is evaluated
    // with the 1/|C*| root as stated.
    r.inequality_value = std::pow(inner, 1.0 / r.chain_len_max);
    r.bound = std::pow(inner, 1.0 / (r.chain_len_max + 1));
    r.certifies_stability = r.inequality_value < 1.0;
    r.applicable = r.certifies_stability;
    if (!r.applicable) r.reason = "inequality (2.5) does not hold";
    return r;
}

SpectralBoundReport bound_super_zero_diag(const Matrix& F, const Classification& cls) {
    SpectralBoundReport r;
    r.theorem = "2.7";
    r.numeric_rho = spectral_radius(F);
    if (cls.cls != StochClass::SuperStochastic) {
        r.reason = "matrix is not super-stochastic";
        return r;
    }
    if (F.diagonal().cwiseAbs().maxCoeff() > cls.rows.tol) {
        r.reason = "diagonal is not zero";
        return r;
    }
    std::vector<int> r2 = cls.rows.at_one;
    r2.insert(r2.end(), cls.rows.above.begin(), cls.rows.above.end());
    if (r2.size() != 1) {
        r.reason = "|R2| != 1";
        return r;
    }
    if (cls.rows.below.empty()) {
        r.reason = "R1 empty";
        return r;
    }
    r.alpha1 = max_of(cls.rows.sums, cls.rows.below);
    r.alpha3 = cls.rows.sums(r2.front());
    r.bound = std::sqrt(r.alpha1 * r.alpha3);
    r.applicable = true;  // the bound holds even when >= 1
    r.certifies_stability = r.bound < 1.0;
    return r;
}

namespace {

Matrix temporal_product(const std::vector<Matrix>& factors) {
    Matrix p = Matrix::Identity(factors.front().rows(), factors.front().cols());
    for (const auto& f : factors) p = f * p;  // earliest factor applied first
    return p;
}

// For every row i2, look for s1 < s2 with a deficient row i1 of factor s1 and
// [F_{s2}]_{i2,i1} > 0. Exhaustive, smallest indices first.
bool find_witnesses(const std::vector<Matrix>& factors, const std::vector<Classification>& cls,
                    double tol, std::vector<ProductWitness>* out) {
    const int q = static_cast<int>(factors.size());
    const int n = static_cast<int>(factors.front().rows());
    bool all = true;
    for (int i2 = 0; i2 < n; ++i2) {
        bool found = false;
        for (int s1 = 0; s1 < q && !found; ++s1) {
            for (int i1 : cls[s1].rows.below) {
                for (int s2 = s1 + 1; s2 < q; ++s2) {
                    if (factors[s2](i2, i1) > tol) {
                        out->push_back({i2, s1, i1, s2});
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
        }
        if (!found) all = false;
    }
    return all;
}

bool positive_diagonals(const std::vector<Matrix>& factors, double tol) {
    for (const auto& f : factors)
        if (f.diagonal().minCoeff() <= tol) return false;
    return true;
}

}  // namespace

ProductResult product_sub(const std::vector<Matrix>& factors, double tol) {
    if (factors.empty()) throw ConfigError("product_sub: empty factor list");
    std::vector<Classification> cls;
    for (size_t s = 0; s < factors.size(); ++s) {
        cls.push_back(classify(factors[s], tol));
        if (cls.back().cls != StochClass::SubStochastic)
            throw ConfigError("product_sub: factor " + std::to_string(s) + " is not sub-stochastic");
    }
    ProductResult out;
    out.product = temporal_product(factors);
    out.report.q = static_cast<int>(factors.size());
    out.report.window_norm = infinity_norm(out.product);
    if (!positive_diagonals(factors, tol)) {
        out.report.reason = "some factor lacks a positive diagonal";
        return out;
    }
    if (!find_witnesses(factors, cls, tol, &out.report.witnesses)) {
        out.report.reason = "no (s1, i1, s2) witness for some row";
        return out;
    }
    out.report.certified = true;
    return out;
}

ProductResult product_super(const std::vector<Matrix>& factors,
                            std::optional<SuperProductConstants> constants, double tol) {
    if (factors.empty()) throw ConfigError("product_super: empty factor list");
    std::vector<Classification> cls;
    for (size_t s = 0; s < factors.size(); ++s) {
        cls.push_back(classify(factors[s], tol));
        if (cls.back().cls == StochClass::Neither)
            throw ConfigError("product_super: factor " + std::to_string(s) + " has a negative entry");
    }
    ProductResult out;
    out.product = temporal_product(factors);
    out.report.q = static_cast<int>(factors.size());
    out.report.window_norm = infinity_norm(out.product);

    if (constants) {
        out.report.g = constants->g;
        out.report.c = constants->c;
        out.report.varphi = constants->varphi;
    } else {
        double g = -std::numeric_limits<double>::infinity();
        double c = -std::numeric_limits<double>::infinity();
        double phi = std::numeric_limits<double>::infinity();
        for (const auto& k : cls) {
            for (int i : k.rows.above) g = std::max(g, k.rows.sums(i));
            for (int i : k.rows.below) c = std::max(c, k.rows.sums(i));
        }
        for (const auto& f : factors) {
            double p = min_positive_entry(f, tol);
            if (p == p) phi = std::min(phi, p);
        }
        // Degenerate lists (no exceeding / no deficient row) keep the report
        // well-defined; certification below will fail on the missing pieces.
        out.report.g = std::isfinite(g) ? g : infinity_norm(factors.front());
        out.report.c = std::isfinite(c) ? c : std::numeric_limits<double>::quiet_NaN();
        out.report.varphi = std::isfinite(phi) ? phi : 0.0;
    }

    if (!positive_diagonals(factors, tol)) {
        out.report.reason = "some factor lacks a positive diagonal";
        return out;
    }
    if (!find_witnesses(factors, cls, tol, &out.report.witnesses)) {
        out.report.reason = "no (s1, i1, s2) witness for some row";
        return out;
    }
    double lhs = std::pow(out.report.g, out.report.q) -
                 (out.report.g - out.report.c) * std::pow(out.report.varphi, out.report.q - 1);
    if (!(lhs < 1.0)) {
        out.report.reason = "inequality (2.7) does not hold";
        return out;
    }
    out.report.certified = true;
    return out;
}

void EdgeSet::insert(int from, int to) {
    if (from < 0 || from >= vertex_count || to < 0 || to >= vertex_count)
        throw ConfigError("edge set: endpoint out of range");
    pairs.insert({from, to});
}

EdgeSet compose(const EdgeSet& e1, const EdgeSet& e2) {
    if (e1.vertex_count != e2.vertex_count)
        throw ConfigError("compose: vertex counts differ");
    // (i,j) in e1 o e2 iff (i,k) in e1 and (k,j) in e2 for some k
    std::vector<std::vector<int>> out_of(e2.vertex_count);
    for (const auto& [k, j] : e2.pairs) out_of[k].push_back(j);
    EdgeSet r;
    r.vertex_count = e1.vertex_count;
    for (const auto& [i, k] : e1.pairs)
        for (int j : out_of[k]) r.pairs.insert({i, j});
    return r;
}

RootednessResult rooted_composition(const std::vector<EdgeSet>& sets, int root,
                                    const std::vector<int>& targets) {
    if (sets.empty()) throw ConfigError("rooted_composition: empty set list");
    const int n = sets.front().vertex_count;
    for (const auto& s : sets)
        if (s.vertex_count != n) throw ConfigError("rooted_composition: vertex counts differ");

    std::vector<int> frontier{root};
    std::vector<char> in_frontier(n, 0);
    in_frontier[root] = 1;
    // pred[s][v]: predecessor of v in the frontier after applying sets[s]
    std::vector<std::vector<int>> pred(sets.size(), std::vector<int>(n, -1));

    for (size_t s = 0; s < sets.size(); ++s) {
        std::vector<std::vector<int>> out_of(n);
        for (const auto& [a, b] : sets[s].pairs) out_of[a].push_back(b);
        std::vector<char> next(n, 0);
        for (int u : frontier) {
            for (int v : out_of[u]) {
                if (!next[v]) {
                    next[v] = 1;
                    pred[s][v] = u;
                }
            }
        }
        frontier.clear();
        for (int v = 0; v < n; ++v)
            if (next[v]) frontier.push_back(v);
        in_frontier = next;
    }

    RootednessResult res;
    res.rooted = true;
    for (int t : targets) {
        if (!in_frontier[t]) {
            res.rooted = false;
            res.missing.push_back(t);
            continue;
        }
        std::vector<int> path(sets.size() + 1);
        int v = t;
        for (int s = static_cast<int>(sets.size()) - 1; s >= 0; --s) {
            path[s + 1] = v;
            v = pred[s][v];
        }
        path[0] = v;
        res.witness_paths[t] = path;
    }
    return res;
}

double spectral_radius(const Matrix& F) {
    if (F.rows() != F.cols()) throw ConfigError("spectral_radius: matrix must be square");
    if (F.rows() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> solver(F, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_radius: eigensolver did not converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace bitrack
