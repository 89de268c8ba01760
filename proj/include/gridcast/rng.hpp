#pragma once

#include <cstdint>
#include <random>

namespace gridcast {

// splitmix64 finalizer; used to expand one top-level seed into independent streams.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    return Engine{derive_seed(seed, stream)};
}

// Named streams so that components never share random draws.
namespace streams {
inline constexpr std::uint64_t kAdequacyPaths = 0x100;
inline constexpr std::uint64_t kScenario = 0x200;
inline constexpr std::uint64_t kSynthetic = 0x300;
}  // namespace streams

}  // namespace gridcast
