#include "lrbench/rng.hpp"

#include <cmath>

#include "lrbench/errors.hpp"

namespace lrbench {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
}

RngStream RngStream::derive(std::string_view label, std::uint64_t index) const {
    std::uint64_t mix = seed_;
    std::uint64_t a = splitmix64(mix);
    mix ^= fnv1a(label);
    std::uint64_t b = splitmix64(mix);
    mix ^= index * 0xD1B54A32D192ED03ULL;
    std::uint64_t c = splitmix64(mix);
    return RngStream(a ^ rotl(b, 21) ^ rotl(c, 42));
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw ConfigError("uniform_index: n must be positive");
    // Largest multiple of n representable; draws at or above it are rejected.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u, v, s;
    do {
        u = uniform(-1.0, 1.0);
        v = uniform(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * factor;
    has_cached_normal_ = true;
    return u * factor;
}

std::vector<double> normal_draws(RngStream& rng, std::size_t n, double mean, double sigma) {
    if (sigma < 0.0) throw ConfigError("normal_draws: sigma must be non-negative");
    std::vector<double> out(n);
    for (auto& x : out) x = mean + sigma * rng.normal();
    return out;
}

}  // namespace lrbench
