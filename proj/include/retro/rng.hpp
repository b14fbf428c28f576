#pragma once

#include <cstdint>

namespace retro {

/// SplitMix64 (Steele, Lea, Flood 2014): a Weyl counter passed through a
/// 64-bit finalizer. Output depends only on the seed and draw index, so
/// streams are bit-reproducible on every platform.
class SplitMix64 {
public:
    static constexpr const char* kName = "splitmix64";
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace retro
