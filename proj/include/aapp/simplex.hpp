#ifndef AAPP_SIMPLEX_HPP
#define AAPP_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aapp/error.hpp"
#include "aapp/matrix.hpp"
#include "aapp/nnls.hpp"

namespace aapp {

/// Weights of a simplex-constrained least-squares solve.
struct SimplexSolution {
    std::vector<double> weights;  // >= 0, summing to 1
    double sq_residual = 0.0;     // ||G^T w - x||^2, augmentation row excluded
    int iterations = 0;
};

/// min_{a >= 0, sum a = 1} ||G^T a - x||^2 for candidate vertices stacked as
/// the rows of G (k x d). The summation constraint is enforced by one extra
/// equation M * sum(a) = M appended to the linear system, with
/// M = 4000 * (1 + max |G|); the residual reported back excludes that row.
/// The base multiplier balances two failure modes: the penalized optimum sits
/// at |sum w - 1| ~ |g_j^T r| / M^2 (too small an M trips the 1e-6 gate
/// below), while M^2 entries swamp the data part of the Gram matrix once the
/// multiplier reaches ~1e4 at unit data scale. Points far outside the hull
/// make the residual factor large enough to trip the gate anyway, so the
/// solve escalates M tenfold (twice at most) when that happens; each rung
/// costs two digits of Gram headroom and is only paid on the rare cells that
/// need it.
inline SimplexSolution solve_simplex_ls(const Matrix& g, std::span<const double> x) {
    const std::size_t k = g.rows();
    const std::size_t d = g.cols();
    if (k < 1) throw dimension_error("solve_simplex_ls: no candidate vertices");
    if (x.size() != d) throw dimension_error("solve_simplex_ls: point length mismatch");

    double max_abs = 0.0;
    for (double v : g.values()) max_abs = std::max(max_abs, std::abs(v));

    // The default nnls tolerance keys off ||C^T y||_inf, which the M^2 term
    // dominates here; that would stop the active-set loop while data-scale
    // descent remains. Reference the data part of C^T y instead, floored by
    // the fp noise the M-row injects into the duals: the augmentation-row
    // residual is a length-k cancellation of M-scale terms, so the noise
    // grows like eps * M^2 * k.
    double data_ref = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double v = 0.0;
        for (std::size_t r = 0; r < d; ++r) v += g(j, r) * x[r];
        data_ref = std::max(data_ref, std::abs(v));
    }
    const double eps = std::numeric_limits<double>::epsilon();

    SimplexSolution sol;
    double sum = 0.0;
    for (double mult : {4.0e3, 4.0e4, 4.0e5}) {
        const double m_weight = mult * (1.0 + max_abs);

        Matrix aug(d + 1, k);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t r = 0; r < d; ++r) aug(r, j) = g(j, r);
            aug(d, j) = m_weight;
        }
        std::vector<double> rhs(d + 1);
        std::copy(x.begin(), x.end(), rhs.begin());
        rhs[d] = m_weight;

        const double noise_floor =
            64.0 * eps * m_weight * m_weight * static_cast<double>(k);
        const double dual_tol = std::max(1e-10 * data_ref, noise_floor);

        NnlsResult res = nnls(aug, rhs, dual_tol);
        sol.weights = std::move(res.x);
        sol.iterations += res.iterations;
        sum = 0.0;
        for (double& w : sol.weights) {
            if (w < 0.0) w = 0.0;
            sum += w;
        }
        if (std::abs(sum - 1.0) <= 1e-6) break;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw convergence_error("solve_simplex_ls: weight sum " + std::to_string(sum) +
                                    " violates the simplex constraint",
                                std::move(sol.weights), sol.iterations);
    }
    for (double& w : sol.weights) w /= sum;

    double sq = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        double v = -x[r];
        for (std::size_t j = 0; j < k; ++j) v += g(j, r) * sol.weights[j];
        sq += v * v;
    }
    sol.sq_residual = sq;
    return sol;
}

/// Squared distance from x to the convex hull of the rows of Z.
inline double dist_to_hull(std::span<const double> x, const Matrix& z) {
    return solve_simplex_ls(z, x).sq_residual;
}

/// Hull distance of every row of X to conv(rows of Z). Entries are mutually
/// independent; evaluation order cannot change the result.
inline std::vector<double> batch_dist(const Matrix& x, const Matrix& z) {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        try {
            out[i] = dist_to_hull(x.row(i), z);
        } catch (const error& e) {
            throw error("batch_dist: row " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace aapp

#endif  // AAPP_SIMPLEX_HPP
