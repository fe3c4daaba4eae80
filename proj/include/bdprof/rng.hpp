#pragma once

#include <cstdint>
#include <random>

namespace bdp {

// splitmix64 mixing step; used to derive independent streams from (seed, counter)
// so that permutation replicates are order-independent and reproducible.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t counter) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ counter));
}

}  // namespace bdp
