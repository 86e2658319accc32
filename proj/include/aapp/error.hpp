#ifndef AAPP_ERROR_HPP
#define AAPP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aapp {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched shapes or lengths.
struct dimension_error : error {
    using error::error;
};

// Non-finite or otherwise invalid numeric input.
struct input_error : error {
    using error::error;
};

// Requested more archetypes than data points, and similar count violations.
struct cardinality_error : error {
    using error::error;
};

// All-zero weights, constant data under standardization, etc.
struct degenerate_error : error {
    using error::error;
};

// Malformed configuration (unknown shape name, missing method coverage).
struct config_error : error {
    using error::error;
};

// CSV/file parsing failure; row/col are 1-based, 0 when not applicable.
struct parse_error : error {
    std::size_t row = 0;
    std::size_t col = 0;
    parse_error(const std::string& msg, std::size_t r = 0, std::size_t c = 0)
        : error(msg), row(r), col(c) {}
};

// Iteration cap exceeded; carries the best iterate found so far.
struct convergence_error : error {
    std::vector<double> best;
    int iterations = 0;
    convergence_error(const std::string& msg, std::vector<double> best_iterate = {},
                      int iters = 0)
        : error(msg), best(std::move(best_iterate)), iterations(iters) {}
};

}  // namespace aapp

#endif  // AAPP_ERROR_HPP
