#pragma once

#include <vector>

#include "bitrack/core.hpp"

namespace bitrack::fixtures {

// The worked 3x3 matrices and switched-system triples used across the docs,
// CLI demos and tests.

inline Matrix f_prime() {
    Matrix m(3, 3);
    m << 0.5, 0.5, 0.0,
         0.3, 0.2, 0.4,
         0.4, 0.0, 0.6;
    return m;
}

inline Matrix f_star() {
    Matrix m(3, 3);
    m << 0.0, 0.2, 0.8,
         0.5, 0.0, 0.4,
         0.3, 0.6, 0.0;
    return m;
}

inline Matrix f_tilde() {
    Matrix m(3, 3);
    m << 0.60, 0.00, 0.00,
         0.55, 0.00, 0.50,
         0.50, 0.55, 0.00;
    return m;
}

inline Matrix f_bar() {
    Matrix m(3, 3);
    m << 0.0, 0.5, 0.7,
         0.4, 0.0, 0.4,
         0.4, 0.4, 0.0;
    return m;
}

// Marginally stable sub-stochastic triple (rho = 1 each, ||F3 F2 F1|| < 1).
inline std::vector<Matrix> sub_triple() {
    Matrix f1(3, 3), f2(3, 3), f3(3, 3);
    f1 << 0.3, 0.6, 0.0,
          0.0, 1.0, 0.0,
          0.0, 0.0, 1.0;
    f2 << 1.0, 0.0, 0.0,
          0.0, 1.0, 0.0,
          0.4, 0.0, 0.5;
    f3 << 1.0, 0.0, 0.0,
          0.5, 0.5, 0.0,
          0.0, 0.0, 1.0;
    return {f1, f2, f3};
}

// Strictly unstable super-stochastic triple (rho = 1.02 each).
inline std::vector<Matrix> super_triple() {
    Matrix f1(3, 3), f2(3, 3), f3(3, 3);
    f1 << 0.0, 0.5,  0.0,
          0.0, 1.02, 0.0,
          0.5, 0.0,  0.5;
    f2 << 0.5, 0.52, 0.0,
          0.5, 0.0,  0.5,
          0.0, 0.0,  1.02;
    f3 << 1.02, 0.0, 0.0,
          0.5,  0.5, 0.0,
          0.0,  0.5, 0.5;
    return {f1, f2, f3};
}

}  // namespace bitrack::fixtures
