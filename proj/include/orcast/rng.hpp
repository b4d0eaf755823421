#pragma once

#include <cstdint>

namespace orcast {

/// SplitMix64 (Steele, Lea & Flood 2014; constants from Vigna's reference code).
///
/// Stream convention shared by every stochastic routine in the library:
///   - `substream(seed, index)` starts a generator whose state is
///     `mix(seed ^ mix(index + 0x632BE59BD9B4E019))`, where `mix` is the SplitMix64
///     finalizer. Replicate `b` of a bootstrap always draws from `substream(seed, b)`,
///     so results do not depend on evaluation order.
///   - `next_u64()` advances state by 0x9E3779B97F4A7C15 and returns `mix(state)`.
///   - `uniform()` = (next_u64() >> 11) * 2^-53, a double in [0, 1).
///   - `below(n)` = floor(uniform() * n), clamped to n - 1.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix(seed ^ mix(index + 0x632BE59BD9B4E019ULL)));
    }

    constexpr std::uint64_t next_u64() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t below(std::uint64_t n) noexcept {
        auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return k >= n ? n - 1 : k;
    }

private:
    std::uint64_t state_;
};

}  // namespace orcast
