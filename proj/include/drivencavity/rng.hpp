#pragma once

// Counter-based SplitMix64. Chosen over std::mt19937_64 because the stream
// for (seed, trajectory index) must be bit-exact across platforms and
// standard library versions; the whole generator is eight lines and that
// guarantee is then ours to keep.

#include <cstdint>

namespace drivencavity::trajectories {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Stream for one trajectory. The avalanche finalizer decorrelates streams
// whose initial states differ in a single bit, so xor suffices here.
inline SplitMix64 trajectory_rng(std::uint64_t seed, std::uint64_t trajectory_index) {
    return SplitMix64(seed ^ trajectory_index);
}

} // namespace drivencavity::trajectories
