#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wbomd {

/// Counter-based pseudorandom stream.  The n-th draw is a pure function of
/// (seed, stream, n), so independent streams are reproducible no matter how
/// work is scheduled across threads, and a stream can be replayed exactly.
///
/// The generator hashes key + counter * golden-ratio increment through a
/// 64-bit finalizer (splitmix64-style avalanche).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(mix64(seed + kGamma) ^ mix64(stream * kGamma + 0x5851f42d4c957f2dULL)))
    {
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

    /// Uniform draw in the half-open interval (0, 1]; never returns 0, so it
    /// is safe under a logarithm.
    double next_uniform()
    {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal draw via Box-Muller on two uniform draws.  Implemented
    /// directly (not std::normal_distribution) so the sample sequence is
    /// identical on every platform and standard library.
    double next_normal()
    {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix64(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace wbomd
