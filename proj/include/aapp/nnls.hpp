#ifndef AAPP_NNLS_HPP
#define AAPP_NNLS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aapp/error.hpp"
#include "aapp/matrix.hpp"

namespace aapp {

struct NnlsResult {
    std::vector<double> x;
    int iterations = 0;  // least-squares passes performed
};

namespace detail {

// Unconstrained least squares restricted to the passive columns of C:
// minimizes ||C_P z - y|| via normal equations. The Gram matrix is built on
// the passive set only, so C may have far more columns than rows.
inline std::vector<double> passive_ls(const Matrix& c, std::span<const double> y,
                                      std::span<const std::size_t> passive) {
    const std::size_t m = c.rows();
    const std::size_t np = passive.size();
    Matrix gram(np, np);
    std::vector<double> rhs(np, 0.0);
    for (std::size_t a = 0; a < np; ++a) {
        for (std::size_t b = a; b < np; ++b) {
            double g = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                g += c(r, passive[a]) * c(r, passive[b]);
            }
            gram(a, b) = g;
            gram(b, a) = g;
        }
        double v = 0.0;
        for (std::size_t r = 0; r < m; ++r) v += c(r, passive[a]) * y[r];
        rhs[a] = v;
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < np; ++a) trace += gram(a, a);
    return spd_solve(gram, rhs, 1e-12 * trace);
}

}  // namespace detail

/// Non-negative least squares: x >= 0 minimizing ||C x - y||^2, by the
/// Lawson-Hanson active-set method. Inner solves use normal equations on the
/// passive set with Cholesky; a jitter of 1e-12 * trace is added on
/// singularity. Dual feasibility is declared at dual_tol; a non-positive
/// dual_tol selects the default of 1e-10 relative to the largest component
/// of |C^T y|. Callers whose systems mix scales (e.g. a penalty row) should
/// pass a tolerance matched to the scale of the part they care about.
///
/// At the returned x, every clamped coordinate j (x_j = 0) satisfies the KKT
/// condition (C^T (C x - y))_j >= -tol, except when three consecutive outer
/// passes fail to reduce the objective: descent is strict in exact
/// arithmetic, so a run of flat passes means the remaining dual excess is
/// below what floating point can convert into progress, and the current
/// iterate is returned as converged.
///
/// Throws convergence_error carrying the best iterate when more than
/// max(100, 3 * cols) least-squares passes are needed.
inline NnlsResult nnls(const Matrix& c, std::span<const double> y,
                       double dual_tol = -1.0) {
    const std::size_t m = c.rows();
    const std::size_t p = c.cols();
    if (m < 1 || p < 1) throw dimension_error("nnls: empty system");
    if (y.size() != m) throw dimension_error("nnls: rhs length mismatch");
    if (!c.all_finite()) throw input_error("nnls: non-finite matrix entry");
    for (double v : y) {
        if (!std::isfinite(v)) throw input_error("nnls: non-finite rhs entry");
    }

    std::vector<double> x(p, 0.0);
    std::vector<char> in_passive(p, 0);
    std::vector<char> rejected(p, 0);  // additions that solved to <= 0 (fp noise)
    std::vector<std::size_t> passive;
    std::vector<double> residual(y.begin(), y.end());  // y - C x
    std::vector<double> grad(p, 0.0);                  // C^T residual

    double cty_max = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double v = 0.0;
        for (std::size_t r = 0; r < m; ++r) v += c(r, j) * y[r];
        grad[j] = v;
        cty_max = std::max(cty_max, std::abs(v));
    }
    if (cty_max == 0.0) return {std::move(x), 0};  // x = 0 is optimal
    const double tol = dual_tol > 0.0 ? dual_tol : 1e-10 * cty_max;

    const int max_passes = std::max(100, 3 * static_cast<int>(p));
    int passes = 0;
    double best_obj = std::numeric_limits<double>::infinity();
    int stalls = 0;

    auto refresh_gradient = [&] {
        for (std::size_t r = 0; r < m; ++r) {
            double v = y[r];
            for (std::size_t idx : passive) v -= c(r, idx) * x[idx];
            residual[r] = v;
        }
        for (std::size_t j = 0; j < p; ++j) {
            double v = 0.0;
            for (std::size_t r = 0; r < m; ++r) v += c(r, j) * residual[r];
            grad[j] = v;
        }
    };

    while (true) {
        // Monotone-descent watchdog. In exact arithmetic every outer pass
        // strictly shrinks the objective, so repeated passes without
        // measurable progress are rounding noise chasing duals that cannot
        // pay for themselves. Rank-deficient passive sets can cycle through
        // add/step/demote sequences that move the iterate and return it
        // unchanged — the entry rejection below never sees those — so this
        // is also what guarantees termination there.
        double obj = 0.0;
        for (double r : residual) obj += r * r;
        if (obj < best_obj * (1.0 - 1e-13)) {
            best_obj = obj;
            stalls = 0;
        } else if (++stalls >= 3) {
            break;
        }

        // most violated dual coordinate among the clamped set
        std::size_t best = p;
        double best_w = tol;
        for (std::size_t j = 0; j < p; ++j) {
            if (!in_passive[j] && !rejected[j] && grad[j] > best_w) {
                best_w = grad[j];
                best = j;
            }
        }
        if (best == p) break;  // KKT satisfied

        in_passive[best] = 1;
        passive.push_back(best);

        bool entered = false;
        while (true) {
            if (passes++ >= max_passes) {
                throw convergence_error(
                    "nnls: exceeded " + std::to_string(max_passes) + " passes",
                    std::move(x), passes - 1);
            }
            std::vector<double> z = detail::passive_ls(c, y, passive);

            // In exact arithmetic the just-added column always solves to a
            // positive coefficient; a non-positive one is rounding noise and
            // will oscillate in and out forever. Undo the addition and bar
            // the column until the iterate next moves.
            if (!entered && z.back() <= 0.0) {
                in_passive[best] = 0;
                rejected[best] = 1;
                passive.pop_back();
                break;
            }
            entered = true;

            bool feasible = true;
            for (double v : z) {
                if (v <= 0.0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                for (std::size_t a = 0; a < passive.size(); ++a) x[passive[a]] = z[a];
                break;
            }

            // step toward z until the first passive coordinate hits zero
            double alpha = 1.0;
            for (std::size_t a = 0; a < passive.size(); ++a) {
                if (z[a] <= 0.0) {
                    const double xa = x[passive[a]];
                    const double denom = xa - z[a];
                    const double step = denom > 0.0 ? xa / denom : 0.0;
                    alpha = std::min(alpha, step);
                }
            }
            for (std::size_t a = 0; a < passive.size(); ++a) {
                x[passive[a]] += alpha * (z[a] - x[passive[a]]);
            }
            // demote everything that reached the boundary
            std::vector<std::size_t> kept;
            kept.reserve(passive.size());
            for (std::size_t a = 0; a < passive.size(); ++a) {
                const std::size_t idx = passive[a];
                if (z[a] <= 0.0 && x[idx] <= 1e-14 * cty_max) {
                    x[idx] = 0.0;
                    in_passive[idx] = 0;
                } else {
                    kept.push_back(idx);
                }
            }
            if (kept.size() == passive.size()) {
                // numerical stall: nothing left the passive set; drop the
                // coordinate with the most negative target instead
                std::size_t drop = 0;
                double zmin = z[0];
                for (std::size_t a = 1; a < passive.size(); ++a) {
                    if (z[a] < zmin) {
                        zmin = z[a];
                        drop = a;
                    }
                }
                x[passive[drop]] = 0.0;
                in_passive[passive[drop]] = 0;
                kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(drop));
            }
            passive = std::move(kept);
            if (passive.empty()) break;
        }

        // any actual move invalidates the duals earlier rejections were
        // judged against
        if (entered) std::fill(rejected.begin(), rejected.end(), 0);
        refresh_gradient();
    }

    return {std::move(x), passes};
}

}  // namespace aapp

#endif  // AAPP_NNLS_HPP
