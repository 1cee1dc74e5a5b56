#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qae3d {

/// FNV-1a over the substream name, mixed with the run seed, so every
/// component draws from an independent, reproducible stream.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h ^ (seed * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);
}

inline std::mt19937_64 substream_rng(std::uint64_t seed, std::string_view name) {
    return std::mt19937_64(substream_seed(seed, name));
}

}  // namespace qae3d
