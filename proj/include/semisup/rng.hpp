#pragma once

#include <cstdint>

namespace semisup {

/*
Deterministic random generator used everywhere in the library.

The algorithm is SplitMix64 (Steele, Lea & Flood, "Fast splittable
pseudorandom number generators", OOPSLA 2014; the java.util.SplittableRandom
mixer). The state is a 64-bit counter advanced by the golden-ratio increment;
each output is the avalanche mix of the counter, so the stream is effectively
a keyed hash of (initial state, step index).

Substreams: generator(seed, stream) re-keys the counter by hashing the pair
through the same mixer. Monte Carlo code derives one substream per trial
index, which makes results independent of the worker count.
*/
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    /// The SplitMix64 finalizer (avalanche mix).
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Derive the substream key for (seed, stream index).
    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
        return mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    }

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
        return SplitMix64(substream_seed(seed, stream));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace semisup
