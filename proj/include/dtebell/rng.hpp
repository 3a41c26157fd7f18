#pragma once

#include <cstdint>

namespace dtebell {

// Counter-based SplitMix64: the n-th draw of a stream is
// mix(key + (n + 1) * golden), so any draw can be regenerated from
// (key, n) alone.
class SplitMixStream {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Stream key for sub-stream `index` of a run seeded with `seed`.
    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index) noexcept {
        return mix(mix(seed) ^ mix(index + kGolden));
    }

    constexpr explicit SplitMixStream(std::uint64_t key) noexcept : key_(key) {}
    constexpr SplitMixStream(std::uint64_t seed, std::uint64_t index) noexcept
        : key_(derive_key(seed, index)) {}

    constexpr std::uint64_t next() noexcept { return mix(key_ + (++counter_) * kGolden); }
    // Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dtebell
