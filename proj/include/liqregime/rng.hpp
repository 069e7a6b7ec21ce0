#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace liqregime::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw i of stream s under seed k is a pure function
/// of (k, s, i), so results do not depend on evaluation order or platform.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL)) {}

    constexpr std::uint64_t bits(std::uint64_t i) const noexcept {
        return mix64(key_ + i * 0xd1342543de82ef95ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t i) const noexcept {
        return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on draws 2i and 2i+1.
    double normal(std::uint64_t i) const noexcept {
        const double u1 = 1.0 - uniform(2 * i);  // (0, 1]
        const double u2 = uniform(2 * i + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
};

}  // namespace liqregime::rng
