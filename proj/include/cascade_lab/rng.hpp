#pragma once
// Counter-based seeding: every replicate gets its own engine seeded from
// (master seed, replicate index), so results never depend on scheduling.

#include <cstdint>
#include <random>

namespace cascade {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Engine substream(std::uint64_t master, std::uint64_t index) {
    return Engine(substream_seed(master, index));
}

} // namespace cascade
