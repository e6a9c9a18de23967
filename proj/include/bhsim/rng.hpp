#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bhsim {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; bijective mixing of a 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the bytes of `name`. Stable across platforms, unlike std::hash.
inline std::uint64_t fnv1a(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent named sub-stream from the master seed.
///
/// Streams are keyed by name ("layout", "sway", "perception/2", ...), so
/// adding an agent or a balloon never perturbs the draws of another stream.
inline Rng split_stream(std::uint64_t master_seed, std::string_view name) {
    return Rng{splitmix64(splitmix64(master_seed) ^ fnv1a(name))};
}

}  // namespace bhsim
