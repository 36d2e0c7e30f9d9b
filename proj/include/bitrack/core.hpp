#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace bitrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Single tolerance used for all row-sum / entry-sign classification bands.
inline constexpr double kTol = 1e-9;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline Vector row_sums(const Matrix& m) { return m.rowwise().sum(); }

// ||F||_inf = max absolute row sum.
inline double infinity_norm(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline bool is_nonnegative(const Matrix& m, double tol = kTol) {
    return m.minCoeff() >= -tol;
}

// Smallest entry strictly above tol; NaN when the matrix has no positive entry.
double min_positive_entry(const Matrix& m, double tol = kTol);

}  // namespace bitrack
