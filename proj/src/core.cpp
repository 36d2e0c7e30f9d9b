#include "bitrack/core.hpp"

#include <limits>

namespace bitrack {

double min_positive_entry(const Matrix& m, double tol) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            if (v > tol && (!(best == best) || v < best)) best = v;
        }
    return best;
}

}  // namespace bitrack
