#pragma once

#include <cmath>
#include <cstdint>

namespace evogo {

// Purposes for derived sub-streams, so that (run, generation, purpose)
// triples map to independent streams regardless of call order.
enum class Stream : std::uint64_t {
    Shift = 1,
    Lhs = 2,
    MlpInit = 3,
    TrainShuffle = 4,
    Augment = 5,
    Baseline = 6,
    Test = 7,
};

// Splittable counter-style generator built on the SplitMix64 finalizer.
// Identical seed gives an identical stream; sub-streams are derived by
// hashing the root seed with caller-supplied labels, never by sharing
// mutable state across tasks.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed), state_(mix(seed)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return finalize(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (cosine branch only, so that the
    // consumption pattern stays a fixed two draws per call).
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        // guard against log(0)
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    std::uint64_t root_seed() const { return root_; }

    Rng substream(Stream purpose, std::uint64_t a = 0, std::uint64_t b = 0) const {
        std::uint64_t h = root_;
        h = finalize(h ^ (static_cast<std::uint64_t>(purpose) + 0x9e3779b97f4a7c15ull));
        h = finalize(h ^ (a + 0xbf58476d1ce4e5b9ull));
        h = finalize(h ^ (b + 0x94d049bb133111ebull));
        return Rng(h);
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    static std::uint64_t mix(std::uint64_t z) { return finalize(z + 0x9e3779b97f4a7c15ull); }

    std::uint64_t root_;
    std::uint64_t state_;
};

}  // namespace evogo
