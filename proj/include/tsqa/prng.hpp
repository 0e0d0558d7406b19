#pragma once

#include <cstdint>
#include <cmath>

namespace tsqa {

// Counter-based generator: every output is a pure function of (key, counter),
// so value streams are stable no matter how callers interleave draws.
// The mixer is the splitmix64 finalizer.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed) {}

    static std::uint64_t mix(std::uint64_t key, std::uint64_t counter) {
        std::uint64_t z = key + counter * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Derives an independent stream seed; documented split function for
    // parallel workers: seed_i = split(master, i).
    static std::uint64_t split(std::uint64_t master, std::uint64_t index) {
        return mix(master ^ 0xD6E8FEB86659FD93ULL, index);
    }

    std::uint64_t next_u64() { return mix(key_, counter_++); }

    // 53-bit mantissa uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Log-uniform over [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Inclusive integer range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Box-Muller; both uniforms drawn from the counter stream each call.
    double normal(double mean, double sigma) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Stateless draws addressed by index; used for per-sample noise so that a
    // value at index i never depends on how many draws preceded it.
    static double uniform01_at(std::uint64_t key, std::uint64_t index) {
        return static_cast<double>(mix(key, index) >> 11) * 0x1.0p-53;
    }

    static double normal_at(std::uint64_t key, std::uint64_t index) {
        double u1 = uniform01_at(key, 2 * index);
        double u2 = uniform01_at(key, 2 * index + 1);
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace tsqa
