#ifndef AAPP_DATAIO_HPP
#define AAPP_DATAIO_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aapp/error.hpp"
#include "aapp/matrix.hpp"
#include "aapp/rng.hpp"

namespace aapp {

enum class PreprocessScheme { none, center_max_scale, standardize };

struct PreprocessSpec {
    PreprocessScheme scheme = PreprocessScheme::none;
    // Strict-replication switch: scale by the signed maximum of the centered
    // matrix instead of the maximum absolute value.
    bool signed_max_scale = false;
};

inline PreprocessScheme parse_preprocess(std::string_view name) {
    if (name == "none") return PreprocessScheme::none;
    if (name == "cms") return PreprocessScheme::center_max_scale;
    if (name == "std") return PreprocessScheme::standardize;
    throw config_error("unknown preprocess scheme '" + std::string(name) +
                       "' (expected none, cms, or std)");
}

/// Strict CSV reader: UTF-8, '.' decimal separator, no quoting, every row
/// the same width, every cell a finite real. Errors carry 1-based
/// coordinates.
inline Matrix load_csv(const std::string& path, char delimiter = ',',
                       bool has_header = false) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");

    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;

        std::size_t col = 0;
        std::size_t pos = 0;
        while (true) {
            ++col;
            const std::size_t next = line.find(delimiter, pos);
            const std::string_view cell =
                std::string_view(line).substr(pos, next == std::string::npos
                                                       ? std::string::npos
                                                       : next - pos);
            double v = 0.0;
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() ||
                !std::isfinite(v)) {
                throw parse_error("'" + path + "': cell '" + std::string(cell) +
                                      "' at row " + std::to_string(line_no) + ", col " +
                                      std::to_string(col) + " is not a finite number",
                                  line_no, col);
            }
            values.push_back(v);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (rows == 0) {
            cols = col;
        } else if (col != cols) {
            throw parse_error("'" + path + "': row " + std::to_string(line_no) + " has " +
                                  std::to_string(col) + " columns, expected " +
                                  std::to_string(cols),
                              line_no, col);
        }
        ++rows;
    }
    if (rows == 0 || cols == 0) {
        throw parse_error("'" + path + "' contains no data rows");
    }
    return Matrix(rows, cols, std::move(values));
}

/// The two supported preprocessing schemes. center_max_scale subtracts the
/// column means and divides the whole matrix by its largest absolute entry
/// (a similarity transform: pairwise distance ratios are preserved).
/// standardize divides each centered column by its population standard
/// deviation instead.
inline Matrix preprocess(const Matrix& x, const PreprocessSpec& spec) {
    if (spec.scheme == PreprocessScheme::none) return x;
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n == 0 || d == 0) throw input_error("preprocess: empty matrix");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = x.row(i);
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    Matrix out(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = x.row(i);
        for (std::size_t j = 0; j < d; ++j) out(i, j) = r[j] - mean[j];
    }

    if (spec.scheme == PreprocessScheme::center_max_scale) {
        double scale = 0.0;
        if (spec.signed_max_scale) {
            scale = out.values()[0];
            for (double v : out.values()) scale = std::max(scale, v);
        } else {
            for (double v : out.values()) scale = std::max(scale, std::abs(v));
        }
        if (scale == 0.0) {
            throw degenerate_error("preprocess: centered matrix is identically zero");
        }
        for (double& v : out.values()) v /= scale;
        return out;
    }

    // standardize
    std::vector<double> sd(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = out.row(i);
        for (std::size_t j = 0; j < d; ++j) sd[j] += r[j] * r[j];
    }
    for (std::size_t j = 0; j < d; ++j) {
        sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
        if (!(sd[j] > 0.0)) {
            throw degenerate_error("preprocess: column " + std::to_string(j + 1) +
                                   " is constant; standardization undefined");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) out(i, j) /= sd[j];
    }
    return out;
}

enum class SyntheticShape { ring, polygon_hull, gaussian_blob };

inline SyntheticShape parse_shape(std::string_view name) {
    if (name == "ring") return SyntheticShape::ring;
    if (name == "polygon-hull") return SyntheticShape::polygon_hull;
    if (name == "gaussian-blob") return SyntheticShape::gaussian_blob;
    throw config_error("unknown synthetic shape '" + std::string(name) +
                       "' (expected ring, polygon-hull, or gaussian-blob)");
}

namespace detail {

/// (cos, sin) of 2*pi*turns, exact on the four axis directions.
inline std::pair<double, double> unit_direction(double turns) {
    turns -= std::floor(turns);
    const double quarter = 4.0 * turns;
    if (quarter == 0.0) return {1.0, 0.0};
    if (quarter == 1.0) return {0.0, 1.0};
    if (quarter == 2.0) return {-1.0, 0.0};
    if (quarter == 3.0) return {0.0, -1.0};
    const double angle = 2.0 * std::numbers::pi * turns;
    return {std::cos(angle), std::sin(angle)};
}

/// Standard normal pair via Box-Muller; consumes two uniform draws.
inline std::pair<double, double> normal_pair(RngStream& rng) {
    const double u1 = rng.uniform_real01();
    const double u2 = rng.uniform_real01();
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Fills a row with independent standard normals, pairing draws.
inline void fill_normal_row(Matrix& m, std::size_t i, RngStream& rng) {
    const std::size_t d = m.cols();
    for (std::size_t j = 0; j + 1 < d; j += 2) {
        const auto [g1, g2] = normal_pair(rng);
        m(i, j) = g1;
        m(i, j + 1) = g2;
    }
    if (d % 2) m(i, d - 1) = normal_pair(rng).first;
}

}  // namespace detail

/// The 2 d vertices spanning a polygon-hull data set. Exposed so callers can
/// regenerate the hull from the same stream state gen_synthetic saw.
inline Matrix polygon_hull_vertices(std::size_t d, RngStream& rng) {
    if (d < 2) throw input_error("polygon_hull_vertices: need d >= 2");
    Matrix vertices(2 * d, d);
    for (std::size_t v = 0; v < vertices.rows(); ++v) {
        detail::fill_normal_row(vertices, v, rng);
    }
    return vertices;
}

/// Deterministic synthetic data sets for demos and desk-scale benchmarks.
///   ring          n points at equally spaced angles on the unit circle in
///                 the first two dims, radius jittered by +-noise, remaining
///                 dims jittered in [-noise, noise]
///   polygon-hull  convex combinations (unit-rate exponential weights) of
///                 2 d random normal vertices, so every point lies inside
///                 the vertex hull; `noise` is unused
///   gaussian-blob standard normal entries; `noise` is unused
inline Matrix gen_synthetic(SyntheticShape shape, std::size_t n, std::size_t d,
                            RngStream& rng, double noise = 0.05) {
    if (n < 1 || d < 1) throw input_error("gen_synthetic: need n >= 1 and d >= 1");
    Matrix x(n, d);

    switch (shape) {
        case SyntheticShape::ring: {
            if (d < 2) throw input_error("gen_synthetic: ring needs d >= 2");
            for (std::size_t i = 0; i < n; ++i) {
                const auto [c, s] =
                    detail::unit_direction(static_cast<double>(i) / static_cast<double>(n));
                const double r =
                    noise > 0.0 ? 1.0 + noise * (2.0 * rng.uniform_real01() - 1.0) : 1.0;
                x(i, 0) = r * c;
                x(i, 1) = r * s;
                for (std::size_t j = 2; j < d; ++j) {
                    x(i, j) =
                        noise > 0.0 ? noise * (2.0 * rng.uniform_real01() - 1.0) : 0.0;
                }
            }
            return x;
        }
        case SyntheticShape::polygon_hull: {
            if (d < 2) throw input_error("gen_synthetic: polygon-hull needs d >= 2");
            const Matrix vertices = polygon_hull_vertices(d, rng);
            const std::size_t nv = vertices.rows();
            std::vector<double> w(nv);
            for (std::size_t i = 0; i < n; ++i) {
                double total = 0.0;
                for (std::size_t v = 0; v < nv; ++v) {
                    w[v] = -std::log(1.0 - rng.uniform_real01());
                    total += w[v];
                }
                for (std::size_t v = 0; v < nv; ++v) {
                    const double wv = w[v] / total;
                    for (std::size_t j = 0; j < d; ++j) x(i, j) += wv * vertices(v, j);
                }
            }
            return x;
        }
        case SyntheticShape::gaussian_blob: {
            for (std::size_t i = 0; i < n; ++i) detail::fill_normal_row(x, i, rng);
            return x;
        }
    }
    throw config_error("gen_synthetic: unreachable shape");
}

}  // namespace aapp

#endif  // AAPP_DATAIO_HPP
