#pragma once

#include <cstdint>

namespace idmc {

// Splittable deterministic generator built on SplitMix64.
//
// Each (seed, stream) pair is hashed into an independent initial state, so a
// fixed pair reproduces the same sequence on every platform and distinct
// streams are statistically independent. The algorithm is fixed across
// versions; experiment reproducibility depends on it.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform in (0, 1]. The half-open side excludes zero so logarithms of
    // draws are always finite.
    double next_uniform() noexcept;

    // Standard normal via Box-Muller. Draws come in transform pairs; the
    // second value is cached.
    double next_normal() noexcept;

    // Uniform integer in [0, bound), bound > 0, rejection-sampled so the
    // distribution is exact.
    std::uint64_t next_below(std::uint64_t bound) noexcept;

private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace idmc
