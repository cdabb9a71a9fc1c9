#pragma once

#include <cstdint>

namespace netbound {

/// SplitMix64: tiny seedable generator with platform-independent output.
/// Used everywhere reproducibility across runs and machines matters
/// (weight init, dataset noise, sampling for bound checks).
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with full 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-bound, +bound].
    double uniform_symmetric(double bound) { return (2.0 * uniform() - 1.0) * bound; }
};

/// Derive an independent stream from a base seed and two stream tags.
/// Different (a, b) pairs give decorrelated SplitMix64 states.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    SplitMix64 mixer(seed);
    mixer.state ^= (a + 1) * 0xD1B54A32D192ED03ULL;
    mixer.next();
    mixer.state ^= (b + 1) * 0x8CB92BA72F3D8DD7ULL;
    mixer.next();
    return mixer;
}

}  // namespace netbound
