#ifndef AAPP_INIT_HPP
#define AAPP_INIT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "aapp/error.hpp"
#include "aapp/matrix.hpp"
#include "aapp/rng.hpp"
#include "aapp/simplex.hpp"

namespace aapp {

/// Distances at or below this are treated as "inside the hull": such points
/// carry zero selection mass in the weighted draws.
inline constexpr double kZeroDistTol = 1e-12;

/// An ordered selection of source rows together with the archetype matrix
/// built from them. `degenerate_fallback` is set when a weighted draw found
/// all residual distances zero and the remaining picks were made uniformly.
struct ArchetypeSet {
    std::vector<std::size_t> indices;
    Matrix z;  // |indices| x d, row t = X row indices[t]
    bool degenerate_fallback = false;
};

/// Markov-chain length for the Monte Carlo initializer: either explicit or a
/// fraction of the data set size, resolved as max(2, round(fraction * n)).
struct ChainConfig {
    std::size_t length = 0;   // used when > 0
    double fraction = 0.0;    // used when length == 0; must be in (0, 1]

    std::size_t resolve(std::size_t n) const {
        std::size_t m = length;
        if (m == 0) {
            if (!(fraction > 0.0) || fraction > 1.0) {
                throw config_error("ChainConfig: fraction must lie in (0, 1]");
            }
            m = static_cast<std::size_t>(
                std::llround(fraction * static_cast<double>(n)));
            m = std::max<std::size_t>(2, m);
        }
        if (m < 2) throw config_error("ChainConfig: chain length must be >= 2");
        return m;
    }
};

namespace detail {

inline void require_k(std::size_t k, std::size_t n) {
    if (k < 1 || k > n) {
        throw cardinality_error("initializer: k = " + std::to_string(k) +
                                " outside [1, n = " + std::to_string(n) + "]");
    }
}

inline ArchetypeSet gather_set(const Matrix& x, std::vector<std::size_t> indices) {
    ArchetypeSet set;
    set.z = gather_rows(x, indices);
    set.indices = std::move(indices);
    return set;
}

/// k distinct uniform indices via a partial Fisher-Yates shuffle;
/// consumes exactly k draws.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           RngStream& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t j = t + rng.uniform_index(n - t);
        std::swap(pool[t], pool[j]);
    }
    pool.resize(k);
    return pool;
}

/// Selection weights from residual distances: hull-interior points
/// (d <= kZeroDistTol) get exactly zero mass.
inline std::vector<double> selection_weights(const std::vector<double>& dists) {
    std::vector<double> w(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) {
        w[i] = dists[i] > kZeroDistTol ? dists[i] : 0.0;
    }
    return w;
}

/// Finish a D^2-style selection uniformly over the not-yet-chosen indices.
/// Invoked when every residual distance is zero; flags the result.
inline void uniform_fallback(const Matrix& x, std::size_t k, RngStream& rng,
                             ArchetypeSet& set) {
    const std::size_t n = x.rows();
    std::vector<char> taken(n, 0);
    for (std::size_t idx : set.indices) taken[idx] = 1;
    std::vector<std::size_t> pool;
    pool.reserve(n - set.indices.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) pool.push_back(i);
    }
    while (set.indices.size() < k) {
        const std::size_t pick = rng.uniform_index(pool.size());
        set.indices.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    set.z = gather_rows(x, set.indices);
    set.degenerate_fallback = true;
}

}  // namespace detail

/// k archetypes chosen uniformly at random, without replacement.
inline ArchetypeSet init_uniform(const Matrix& x, std::size_t k, RngStream& rng) {
    detail::require_k(k, x.rows());
    return detail::gather_set(x, detail::sample_without_replacement(x.rows(), k, rng));
}

/// Greedy max-min selection: the first index is uniform (one draw), each
/// following index maximizes the minimum Euclidean distance to the points
/// chosen so far. Ties break to the lowest index; already-chosen indices are
/// excluded. Deterministic given the first index.
inline ArchetypeSet init_furthest_first(const Matrix& x, std::size_t k, RngStream& rng) {
    const std::size_t n = x.rows();
    detail::require_k(k, n);

    std::vector<std::size_t> picks{rng.uniform_index(n)};
    std::vector<char> taken(n, 0);
    taken[picks[0]] = 1;

    // comparing squared distances picks the same argmax as Euclidean ones
    std::vector<double> min_sq(n);
    for (std::size_t i = 0; i < n; ++i) min_sq[i] = sq_euclidean(x.row(i), x.row(picks[0]));

    while (picks.size() < k) {
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && min_sq[i] > best_d) {
                best_d = min_sq[i];
                best = i;
            }
        }
        taken[best] = 1;
        picks.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            min_sq[i] = std::min(min_sq[i], sq_euclidean(x.row(i), x.row(best)));
        }
    }
    return detail::gather_set(x, std::move(picks));
}

/// Greedy max-sum selection: each pick maximizes the summed Euclidean
/// distance to the current selection. After k picks the random first point
/// is discarded and one further max-sum pick is appended; the discarded
/// index may be re-chosen at that point. k = 1 degenerates to a single
/// uniform draw.
inline ArchetypeSet init_furthest_sum(const Matrix& x, std::size_t k, RngStream& rng) {
    const std::size_t n = x.rows();
    detail::require_k(k, n);
    if (k == 1) return init_uniform(x, 1, rng);

    const std::size_t first = rng.uniform_index(n);
    std::vector<std::size_t> picks{first};
    std::vector<char> taken(n, 0);
    taken[first] = 1;

    std::vector<double> sum_dist(n);
    for (std::size_t i = 0; i < n; ++i) sum_dist[i] = euclidean(x.row(i), x.row(first));

    auto argmax_free = [&]() {
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && sum_dist[i] > best_d) {
                best_d = sum_dist[i];
                best = i;
            }
        }
        return best;
    };

    while (picks.size() < k) {
        const std::size_t best = argmax_free();
        taken[best] = 1;
        picks.push_back(best);
        for (std::size_t i = 0; i < n; ++i) sum_dist[i] += euclidean(x.row(i), x.row(best));
    }

    // discard the random seed point and replace it with one more greedy pick
    for (std::size_t i = 0; i < n; ++i) sum_dist[i] -= euclidean(x.row(i), x.row(first));
    taken[first] = 0;
    picks.erase(picks.begin());
    const std::size_t repl = argmax_free();
    picks.push_back(repl);

    return detail::gather_set(x, std::move(picks));
}

/// D^2-over-hull sampling: after a uniform first pick, every following
/// archetype is drawn with probability proportional to the squared distance
/// to the convex hull of the current selection. Points inside the hull have
/// exactly zero mass; when every point is inside, the remaining picks fall
/// back to uniform over unchosen indices and the result is flagged.
inline ArchetypeSet init_aapp(const Matrix& x, std::size_t k, RngStream& rng) {
    const std::size_t n = x.rows();
    detail::require_k(k, n);

    ArchetypeSet set = detail::gather_set(x, {rng.uniform_index(n)});
    while (set.indices.size() < k) {
        const std::vector<double> w = detail::selection_weights(batch_dist(x, set.z));
        if (std::find_if(w.begin(), w.end(), [](double v) { return v > 0.0; }) == w.end()) {
            detail::uniform_fallback(x, k, rng, set);
            break;
        }
        const std::size_t pick = rng.categorical(w);
        set.indices.push_back(pick);
        set.z = gather_rows(x, set.indices);
    }
    return set;
}

/// Nearest-archetype approximation of init_aapp: the sampling distances are
/// point-to-closest-selected-point instead of point-to-hull, which is the
/// classic D^2 seeding. O(n k d) total.
inline ArchetypeSet init_kmeanspp(const Matrix& x, std::size_t k, RngStream& rng) {
    const std::size_t n = x.rows();
    detail::require_k(k, n);

    ArchetypeSet set = detail::gather_set(x, {rng.uniform_index(n)});
    std::vector<double> min_sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        min_sq[i] = sq_euclidean(x.row(i), x.row(set.indices[0]));
    }
    while (set.indices.size() < k) {
        const std::vector<double> w = detail::selection_weights(min_sq);
        if (std::find_if(w.begin(), w.end(), [](double v) { return v > 0.0; }) == w.end()) {
            detail::uniform_fallback(x, k, rng, set);
            break;
        }
        const std::size_t pick = rng.categorical(w);
        set.indices.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) {
            min_sq[i] = std::min(min_sq[i], sq_euclidean(x.row(i), x.row(pick)));
        }
    }
    set.z = gather_rows(x, set.indices);
    return set;
}

namespace detail {

struct ChainEnd {
    std::size_t index;
    double dist;
};

inline ChainEnd run_chain(const Matrix& x, const Matrix& z, std::size_t m,
                          RngStream& rng) {
    const std::size_t n = x.rows();
    std::size_t state = rng.uniform_index(n);
    double state_d = dist_to_hull(x.row(state), z);
    for (std::size_t step = 1; step < m; ++step) {
        const std::size_t cand = rng.uniform_index(n);
        const double cand_d = dist_to_hull(x.row(cand), z);
        const double u = rng.uniform_real01();
        const bool accept = state_d <= 0.0 ? true : (cand_d / state_d > u);
        if (accept) {
            state = cand;
            state_d = cand_d;
        }
    }
    return {state, state_d};
}

}  // namespace detail

/// One Metropolis-Hastings chain over row indices: uniform proposals,
/// acceptance ratio d_j^2 / d_i^2 of hull distances, the current state's
/// distance cached across steps. A zero-distance current state accepts
/// unconditionally. Chain length m means the start draw plus m - 1 proposal
/// steps; each step consumes one index draw and one uniform real.
inline std::size_t aapp_mc_chain(const Matrix& x, const Matrix& z, std::size_t m,
                                 RngStream& rng) {
    return detail::run_chain(x, z, m, rng).index;
}

/// Monte Carlo approximation of init_aapp: each archetype after the first is
/// the end state of an m-step Metropolis-Hastings chain, so only O(m k)
/// hull projections are solved instead of O(n k). A chain whose end state
/// lies inside the current hull is re-run — the exact sampler gives such
/// points zero mass, and accepting one could select an archetype twice.
/// After kMaxChainRestarts consecutive interior end states the data is
/// treated as fully covered and the uniform fallback finishes the set.
inline constexpr std::size_t kMaxChainRestarts = 256;

inline ArchetypeSet init_aapp_mc(const Matrix& x, std::size_t k, const ChainConfig& chain,
                                 RngStream& rng) {
    const std::size_t n = x.rows();
    detail::require_k(k, n);
    const std::size_t m = chain.resolve(n);

    ArchetypeSet set = detail::gather_set(x, {rng.uniform_index(n)});
    while (set.indices.size() < k) {
        std::size_t end = n;
        for (std::size_t attempt = 0; attempt < kMaxChainRestarts; ++attempt) {
            const detail::ChainEnd tail = detail::run_chain(x, set.z, m, rng);
            if (tail.dist > kZeroDistTol) {
                end = tail.index;
                break;
            }
        }
        if (end == n) {
            detail::uniform_fallback(x, k, rng, set);
            break;
        }
        set.indices.push_back(end);
        set.z = gather_rows(x, set.indices);
    }
    return set;
}

/// n * max_i d_i^2 / sum_i d_i^2 over the hull distances of X to a fixed Z:
/// the data-dependent constant governing how long the Monte Carlo chains
/// must be. Errors when every distance is zero.
inline double gamma_prime_fixed(const Matrix& x, const Matrix& z) {
    const std::vector<double> d = detail::selection_weights(batch_dist(x, z));
    double sum = 0.0;
    double max_d = 0.0;
    for (double v : d) {
        sum += v;
        max_d = std::max(max_d, v);
    }
    if (!(sum > 0.0)) {
        throw degenerate_error("gamma_prime_fixed: all hull distances are zero");
    }
    return static_cast<double>(x.rows()) * max_d / sum;
}

/// Convenience overload: hull distance against an ArchetypeSet.
inline double dist_to_hull(std::span<const double> x, const ArchetypeSet& z) {
    return dist_to_hull(x, z.z);
}

}  // namespace aapp

#endif  // AAPP_INIT_HPP
