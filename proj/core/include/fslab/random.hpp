#pragma once

#include <cstdint>
#include <random>

namespace fslab {

// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

// Generator for item `index` of stream `stream`; the result depends only on
// (seed, stream, index), never on which thread draws it.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    return std::mt19937_64(substream_seed(seed, stream, index));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace fslab
