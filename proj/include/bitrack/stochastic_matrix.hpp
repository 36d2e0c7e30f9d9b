#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bitrack/core.hpp"

namespace bitrack {

enum class StochClass { SubStochastic, SuperStochastic, Neither };

std::string to_string(StochClass c);

// Row-sum classes with the shared tolerance band: below (< 1-tol),
// at_one (|sum-1| <= tol), above (> 1+tol). The three sets partition 0..n-1.
struct RowClassification {
    Vector sums;
    std::vector<int> below;
    std::vector<int> at_one;
    std::vector<int> above;
    double tol = kTol;
};

struct Classification {
    StochClass cls = StochClass::Neither;
    RowClassification rows;
    std::string reason;  // set when Neither
};

Classification classify(const Matrix& F, double tol = kTol);

// A non-zero element chain from a deficient row to a saturated/excess row:
// vertices = [i, i1, ..., k] with [F]_{i1,i} > 0, [F]_{i2,i1} > 0, ...
struct Chain {
    int target = -1;
    std::vector<int> vertices;
    int length() const { return static_cast<int>(vertices.size()) - 1; }
};

struct SpectralBoundReport {
    std::string theorem;            // "2.2", "2.3", "2.6" or "2.7"
    bool applicable = false;
    std::string reason;             // why not applicable
    double bound = std::numeric_limits<double>::quiet_NaN();
    bool certifies_stability = false;  // the rho(F) < 1 claim
    // Theorem 2.6 only: the inequality (2.5) value, root 1/|C*| as stated;
    // `bound` carries the proof-backed 1/(|C*|+1) root.
    double inequality_value = std::numeric_limits<double>::quiet_NaN();
    double alpha1 = std::numeric_limits<double>::quiet_NaN();
    double alpha2 = std::numeric_limits<double>::quiet_NaN();
    double alpha3 = std::numeric_limits<double>::quiet_NaN();
    int chain_len_max = 0;          // |C*|
    std::vector<Chain> chains;      // one shortest chain per target row
    double numeric_rho = std::numeric_limits<double>::quiet_NaN();
};

SpectralBoundReport bound_sub_chain(const Matrix& F, const Classification& cls);
SpectralBoundReport bound_sub_zero_diag(const Matrix& F, const Classification& cls);
SpectralBoundReport bound_super_chain(const Matrix& F, const Classification& cls);
SpectralBoundReport bound_super_zero_diag(const Matrix& F, const Classification& cls);

// Per-target witness (s1 < s2, deficient row i1 of factor s1, positive entry
// [F_{s2}]_{target,i1}); factor indices are positions in the input list.
struct ProductWitness {
    int target_row = -1;
    int s1 = -1;
    int i1 = -1;
    int s2 = -1;
};

struct ProductContractionReport {
    double g = std::numeric_limits<double>::quiet_NaN();
    double c = std::numeric_limits<double>::quiet_NaN();
    double varphi = std::numeric_limits<double>::quiet_NaN();
    int q = 0;
    double window_norm = std::numeric_limits<double>::quiet_NaN();
    bool certified = false;
    std::string reason;  // why not certified
    std::vector<ProductWitness> witnesses;
};

struct ProductResult {
    Matrix product;  // temporal order: factors[q-1] * ... * factors[0]
    ProductContractionReport report;
};

// Theorem 2.4: factors must each classify SubStochastic (throws ConfigError
// otherwise). certified requires positive diagonals plus a witness per row.
ProductResult product_sub(const std::vector<Matrix>& factors, double tol = kTol);

struct SuperProductConstants {
    double g, c, varphi;
};

// Theorem 2.8. Constants computed from the factors when not supplied.
ProductResult product_super(const std::vector<Matrix>& factors,
                            std::optional<SuperProductConstants> constants = std::nullopt,
                            double tol = kTol);

// Directed edge set over a fixed vertex count; pairs are (from, to).
struct EdgeSet {
    int vertex_count = 0;
    std::set<std::pair<int, int>> pairs;

    bool contains(int from, int to) const { return pairs.count({from, to}) > 0; }
    void insert(int from, int to);
};

EdgeSet compose(const EdgeSet& e1, const EdgeSet& e2);

struct RootednessResult {
    bool rooted = false;
    std::vector<int> missing;                       // unreached targets
    std::map<int, std::vector<int>> witness_paths;  // target -> [root, ..., target]
};

// Forward frontier reachability through the sets in order (never materializes
// the full composition).
RootednessResult rooted_composition(const std::vector<EdgeSet>& sets, int root,
                                    const std::vector<int>& targets);

// Dense eigensolver; throws std::runtime_error on non-convergence.
double spectral_radius(const Matrix& F);

}  // namespace bitrack
