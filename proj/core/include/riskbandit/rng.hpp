#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace riskbandit {

// Stateless 64-bit mixer used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) + b);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Canonical double in [0,1) from 64 random bits; avoids distribution
// implementations that differ across standard libraries.
inline double u01_from_bits(std::uint64_t r) {
    return static_cast<double>(r >> 11) * 0x1.0p-53;
}

inline double draw_u01(std::mt19937_64& g) { return u01_from_bits(g()); }

inline long draw_index(std::mt19937_64& g, long n) {
    long i = static_cast<long>(draw_u01(g) * static_cast<double>(n));
    return i >= n ? n - 1 : i;
}

}  // namespace riskbandit
