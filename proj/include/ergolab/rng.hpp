#pragma once

#include <cstdint>

namespace ergolab {

/// SplitMix64 step: the standard 64-bit finalizer-based generator.
/// Used both as a stream splitter and as a hash mixer.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stateless mix of a single 64-bit value (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derive an independent stream seed from a master seed and a replica index.
/// Counter-mode: mixes master and replica through two SplitMix64 rounds so
/// that distinct replicas give statistically independent streams and any
/// change of the master reseeds every replica. Stable across versions.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica);

/// xoshiro256++ generator. Small, fast and portable; seeded via SplitMix64
/// so that any 64-bit seed (including 0) yields a good state.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform integer in [0, n), n >= 1. Unbiased (rejection sampling).
    std::uint64_t uniform_below(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Bernoulli(p).
    bool bernoulli(double p) { return uniform() < p; }

    /// Geometric number of failures before first success, P(success) = p.
    /// Used for skip-sampling sparse edge sets. Requires 0 < p <= 1.
    std::uint64_t geometric_skips(double p);

private:
    std::uint64_t s_[4];
};

} // namespace ergolab
