#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace mongemmd {

/// Deterministic random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, because the standard leaves their algorithms to the library
/// vendor. Independent streams are derived with SplitMix64 from
/// (seed, stream id), so the same seed gives the same draws everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// A new generator for the sub-stream `stream`, independent of this one's position.
    Rng split(std::uint64_t stream) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), rejection-sampled (no modulo bias).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();

    /// Fisher-Yates shuffle of [0, n).
    std::vector<std::size_t> permutation(std::size_t n);

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace mongemmd
