#ifndef AAPP_AA_HPP
#define AAPP_AA_HPP

#include <chrono>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "aapp/error.hpp"
#include "aapp/init.hpp"
#include "aapp/matrix.hpp"
#include "aapp/simplex.hpp"

namespace aapp {

/// Row-stochastic factor pair: X ~ A * B * X.
struct SimplexWeights {
    Matrix a;  // n x k
    Matrix b;  // k x n
};

/// Objective values per optimization stage plus wall-clock timings.
/// stage_mse starts at "init" and then holds one entry per full cycle.
struct FitTrace {
    std::vector<std::pair<std::string, double>> stage_mse;
    double init_time = 0.0;  // seconds; filled by whoever ran the initializer
    double iter_time = 0.0;  // seconds spent inside fit()
};

struct FitResult {
    SimplexWeights weights;
    Matrix z;  // realized archetypes B * X
    FitTrace trace;
};

/// (1/n) * ||X - A Z||_F^2.
inline double mse(const Matrix& x, const Matrix& a, const Matrix& z) {
    const std::size_t n = x.rows();
    const std::size_t k = z.rows();
    if (a.rows() != n || a.cols() != k || z.cols() != x.cols()) {
        throw dimension_error("mse: shapes disagree");
    }
    double acc = 0.0;
    std::vector<double> approx(x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(approx.begin(), approx.end(), 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            const auto zr = z.row(j);
            for (std::size_t r = 0; r < x.cols(); ++r) approx[r] += aij * zr[r];
        }
        const auto xr = x.row(i);
        for (std::size_t r = 0; r < x.cols(); ++r) {
            const double diff = xr[r] - approx[r];
            acc += diff * diff;
        }
    }
    return acc / static_cast<double>(n);
}

/// Optimal simplex weights of every data point against fixed archetypes:
/// row i of A solves min ||Z^T a - x_i||^2 over the simplex.
inline Matrix update_A(const Matrix& x, const Matrix& z) {
    if (z.rows() < 1) throw dimension_error("update_A: no archetypes");
    Matrix a(x.rows(), z.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        try {
            const SimplexSolution sol = solve_simplex_ls(z, x.row(i));
            for (std::size_t j = 0; j < z.rows(); ++j) a(i, j) = sol.weights[j];
        } catch (const error& e) {
            throw error("update_A: row " + std::to_string(i) + ": " + e.what());
        }
    }
    return a;
}

/// Least-squares optimal archetypes for fixed A: solves A^T A Z = A^T X by
/// Cholesky, with a jitter of 1e-10 * trace(A^T A) / k on singularity
/// (redundant archetypes make A rank deficient).
inline Matrix update_Z_unconstrained(const Matrix& a, const Matrix& x) {
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    if (x.rows() != n) throw dimension_error("update_Z_unconstrained: row mismatch");
    if (!a.all_finite() || !x.all_finite()) {
        throw input_error("update_Z_unconstrained: non-finite input");
    }

    Matrix gram(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a(i, p);
            if (aip == 0.0) continue;
            for (std::size_t q = p; q < k; ++q) gram(p, q) += aip * a(i, q);
        }
    }
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < p; ++q) gram(p, q) = gram(q, p);
    }
    double trace = 0.0;
    for (std::size_t p = 0; p < k; ++p) trace += gram(p, p);
    const double jitter = 1e-10 * trace / static_cast<double>(k);

    Matrix atx(k, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const auto xr = x.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a(i, p);
            if (aip == 0.0) continue;
            for (std::size_t r = 0; r < x.cols(); ++r) atx(p, r) += aip * xr[r];
        }
    }

    // one factorization, d right-hand sides
    std::vector<double> fact(gram.values());
    if (!detail::cholesky(fact, k)) {
        fact = gram.values();
        for (std::size_t p = 0; p < k; ++p) fact[p * k + p] += jitter;
        if (!detail::cholesky(fact, k)) {
            throw degenerate_error(
                "update_Z_unconstrained: gram matrix not positive definite");
        }
    }
    Matrix z(k, x.cols());
    std::vector<double> rhs(k);
    for (std::size_t r = 0; r < x.cols(); ++r) {
        for (std::size_t p = 0; p < k; ++p) rhs[p] = atx(p, r);
        detail::cholesky_solve(fact, k, rhs);
        for (std::size_t p = 0; p < k; ++p) z(p, r) = rhs[p];
    }
    return z;
}

/// Projection of target archetypes onto convex combinations of the data:
/// row j of B solves min ||X^T b - z_j||^2 over the simplex, so the realized
/// archetypes are B * X.
inline Matrix update_B(const Matrix& x, const Matrix& z_target) {
    if (x.rows() < 1) throw dimension_error("update_B: empty data");
    Matrix b(z_target.rows(), x.rows());
    for (std::size_t j = 0; j < z_target.rows(); ++j) {
        try {
            const SimplexSolution sol = solve_simplex_ls(x, z_target.row(j));
            for (std::size_t i = 0; i < x.rows(); ++i) b(j, i) = sol.weights[i];
        } catch (const error& e) {
            throw error("update_B: archetype " + std::to_string(j) + ": " + e.what());
        }
    }
    return b;
}

/// Alternating optimization from an initial archetype set. Runs exactly
/// `iters` full cycles (A-step, unconstrained Z, B-step, Z = B X). The trace
/// records the MSE of a fresh A-solve against the initial archetypes and
/// again after every cycle; that A-solve doubles as the next cycle's A-step,
/// so each stage value is the true hull objective at that stage.
inline FitResult fit(const Matrix& x, const ArchetypeSet& z0, std::size_t iters) {
    const auto t_start = std::chrono::steady_clock::now();

    FitResult res;
    res.z = z0.z;
    res.weights.a = update_A(x, res.z);
    res.trace.stage_mse.emplace_back("init", mse(x, res.weights.a, res.z));

    for (std::size_t t = 1; t <= iters; ++t) {
        try {
            const Matrix z_free = update_Z_unconstrained(res.weights.a, x);
            res.weights.b = update_B(x, z_free);
            res.z = matmul(res.weights.b, x);
            res.weights.a = update_A(x, res.z);
        } catch (const error& e) {
            throw error("fit: iteration " + std::to_string(t) + ": " + e.what());
        }
        res.trace.stage_mse.emplace_back("iter-" + std::to_string(t),
                                         mse(x, res.weights.a, res.z));
    }

    if (iters == 0) {
        // still return a valid B so the factorization X ~ A B X is complete
        res.weights.b = Matrix(res.z.rows(), x.rows());
        for (std::size_t j = 0; j < z0.indices.size(); ++j) {
            res.weights.b(j, z0.indices[j]) = 1.0;
        }
    }

    res.trace.iter_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

}  // namespace aapp

#endif  // AAPP_AA_HPP
