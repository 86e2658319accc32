#ifndef AAPP_RNG_HPP
#define AAPP_RNG_HPP

#include <cstdint>
#include <span>
#include <string>

#include "aapp/error.hpp"

namespace aapp {

/// Deterministic seedable random stream based on SplitMix64
/// (Steele, Lea & Flood 2014): the state advances by the 64-bit golden-ratio
/// constant on every draw and the output is a bijective finalizer of the
/// state. Identical seeds give bitwise-identical sequences on any platform
/// with 64-bit unsigned arithmetic; the algorithm is four lines and can be
/// re-typed in any language to replay a benchmark.
///
/// Single-owner: never share one stream across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t seed_state() const { return state_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform real in [0, 1) with 53 random mantissa bits. One draw.
    double uniform_real01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) via the multiply-shift map (Lemire 2019,
    /// without the rejection step: the bias is at most n/2^64). One draw.
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw input_error("uniform_index: empty range");
        using u128 = unsigned __int128;
        return static_cast<std::size_t>(
            (static_cast<u128>(next_u64()) * static_cast<u128>(n)) >> 64);
    }

    /// Weighted categorical draw by inverse CDF over the prefix sums of
    /// `weights`, left-closed intervals; an element with zero weight owns an
    /// empty interval and can never be returned. Consumes exactly one
    /// uniform draw.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw input_error("categorical: negative weight");
            total += w;
        }
        if (!(total > 0.0)) {
            throw degenerate_error("categorical: all weights are zero");
        }
        const double target = uniform_real01() * total;
        double acc = 0.0;
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last_positive = i;
            if (target < acc) return i;
        }
        // target landed on the rounding edge acc == total; the last
        // positive-weight element owns the closing interval.
        return last_positive;
    }

private:
    std::uint64_t state_;
};

/// FNV-1a over a byte string, for stable seed derivation from labels.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Mix one 64-bit word into a running hash (SplitMix64 finalizer step).
inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 27;
    h *= 0x94D049BB133111EBULL;
    h ^= h >> 31;
    return h;
}

}  // namespace aapp

#endif  // AAPP_RNG_HPP
