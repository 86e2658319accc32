#ifndef AAPP_MATRIX_HPP
#define AAPP_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aapp/error.hpp"

namespace aapp {

/// Dense real matrix, row-major. Points live in rows.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (data_.size() != rows_ * cols_) {
            throw dimension_error("Matrix: value count " + std::to_string(data_.size()) +
                                  " does not match " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
        }
    }

    /// Build from nested braces; all rows must have equal length.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m;
        m.rows_ = rows.size();
        m.cols_ = rows.size() ? rows.begin()->size() : 0;
        m.data_.reserve(m.rows_ * m.cols_);
        for (const auto& r : rows) {
            if (r.size() != m.cols_) {
                throw dimension_error("Matrix::from_rows: ragged rows");
            }
            m.data_.insert(m.data_.end(), r.begin(), r.end());
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& values() const { return data_; }
    std::vector<double>& values() { return data_; }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Squared Euclidean distance between two vectors of equal length.
inline double sq_euclidean(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw dimension_error("sq_euclidean: length mismatch " + std::to_string(x.size()) +
                              " vs " + std::to_string(y.size()));
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = x[j] - y[j];
        acc += diff * diff;
    }
    return acc;
}

inline double euclidean(std::span<const double> x, std::span<const double> y) {
    return std::sqrt(sq_euclidean(x, y));
}

/// C = A * B.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw dimension_error("matmul: inner dimensions disagree");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const double ail = a(i, l);
            if (ail == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += ail * b(l, j);
            }
        }
    }
    return c;
}

/// Gather the given rows of X into a new matrix, preserving order.
inline Matrix gather_rows(const Matrix& x, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), x.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = x.row(indices[i]);
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = src[j];
    }
    return out;
}

namespace detail {

/// Cholesky factorization of a symmetric positive definite matrix, in place.
/// Returns false on a non-positive pivot instead of throwing.
inline bool cholesky(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t l = 0; l < j; ++l) diag -= a[j * n + l] * a[j * n + l];
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double root = std::sqrt(diag);
        a[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t l = 0; l < j; ++l) v -= a[i * n + l] * a[j * n + l];
            a[i * n + j] = v / root;
        }
    }
    return true;
}

/// Solve L L^T x = b given the lower factor from cholesky(); x overwrites b.
inline void cholesky_solve(const std::vector<double>& l, std::size_t n,
                           std::vector<double>& b) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t j = 0; j < i; ++j) v -= l[i * n + j] * b[j];
        b[i] = v / l[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) v -= l[j * n + ii] * b[j];
        b[ii] = v / l[ii * n + ii];
    }
}

}  // namespace detail

/// Solve the SPD system A x = b via Cholesky. When the plain factorization
/// hits a non-positive pivot, jitter_lambda is added to the diagonal and the
/// factorization retried once.
inline std::vector<double> spd_solve(const Matrix& a, std::span<const double> b,
                                     double jitter_lambda) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw dimension_error("spd_solve: shape mismatch");
    }
    std::vector<double> fact(a.values());
    std::vector<double> x(b.begin(), b.end());
    if (!detail::cholesky(fact, n)) {
        fact = a.values();
        for (std::size_t i = 0; i < n; ++i) fact[i * n + i] += jitter_lambda;
        if (!detail::cholesky(fact, n)) {
            throw degenerate_error("spd_solve: matrix not positive definite after jitter");
        }
    }
    detail::cholesky_solve(fact, n, x);
    return x;
}

}  // namespace aapp

#endif  // AAPP_MATRIX_HPP
