#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace lrbench {

/// Seeded xoshiro256** stream.
///
/// The 256-bit state is expanded from the 64-bit seed with splitmix64, so the
/// draw sequence depends only on the seed and is identical on every platform.
/// Normals use the polar Box-Muller method and cache the second variate.
///
/// Sub-streams are derived from (seed, label, index) by hashing the label with
/// FNV-1a and mixing through splitmix64; data generation, weight init and
/// per-epoch shuffling each use their own label.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Independent stream for (seed, label, index).
    RngStream derive(std::string_view label, std::uint64_t index = 0) const;

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n). Unbiased (rejection sampling). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal variate.
    double normal();

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// n draws from N(mean, sigma^2). sigma == 0 yields n copies of mean.
std::vector<double> normal_draws(RngStream& rng, std::size_t n, double mean, double sigma);

}  // namespace lrbench
