#ifndef AAPP_TESTS_TESTUTIL_HPP
#define AAPP_TESTS_TESTUTIL_HPP

#include <cstddef>
#include <vector>

#include "aapp/matrix.hpp"
#include "aapp/rng.hpp"

namespace testutil {

inline double uniform_in(aapp::RngStream& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform_real01();
}

inline aapp::Matrix random_matrix(aapp::RngStream& rng, std::size_t rows,
                                  std::size_t cols, double lo = -1.0, double hi = 1.0) {
    aapp::Matrix m(rows, cols);
    for (double& v : m.values()) v = uniform_in(rng, lo, hi);
    return m;
}

inline std::vector<double> random_vector(aapp::RngStream& rng, std::size_t n,
                                         double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& e : v) e = uniform_in(rng, lo, hi);
    return v;
}

/// Row-stochastic matrix with positive entries (simplex rows).
inline aapp::Matrix random_stochastic(aapp::RngStream& rng, std::size_t rows,
                                      std::size_t cols) {
    aapp::Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            m(i, j) = 0.05 + rng.uniform_real01();
            total += m(i, j);
        }
        for (std::size_t j = 0; j < cols; ++j) m(i, j) /= total;
    }
    return m;
}

}  // namespace testutil

#endif  // AAPP_TESTS_TESTUTIL_HPP
