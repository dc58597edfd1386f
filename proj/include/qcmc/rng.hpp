#pragma once

#include <cstdint>
#include <cmath>

namespace qcmc {

/// Counter-based pseudo-random generator (SplitMix64 in counter mode).
///
/// State is a (key, counter) pair; output i is mix(key + i * golden), so a
/// stream can be split deterministically: derive(id) produces an independent
/// stream for any 64-bit id, independent of how many numbers the parent has
/// consumed. Seeds are recorded in experiment manifests so every run is
/// reproducible regardless of thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kSalt)), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection keeps the distribution exact for any n
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Independent child stream identified by `id` (e.g. a sample or worker
    /// index). Child streams never collide with the parent sequence.
    Rng derive(std::uint64_t id) const {
        Rng child(0);
        child.key_ = mix(key_ ^ mix(id * kGolden + kSalt));
        child.counter_ = 0;
        return child;
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kSalt = 0x243F6A8885A308D3ull;  // pi digits

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace qcmc
