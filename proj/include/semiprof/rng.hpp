#pragma once

#include <cstdint>
#include <random>

namespace semiprof {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed split: the stream for replicate b depends only on
/// (master_seed, b), so the worker that runs it is irrelevant.
inline std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t counter) {
    return mix64(mix64(master_seed) ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t master_seed, std::uint64_t counter = 0) {
    return std::mt19937_64(split_seed(master_seed, counter));
}

}  // namespace semiprof
