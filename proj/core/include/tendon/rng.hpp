#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tendon {

/// FNV-1a over arbitrary bytes; used for config hashing and seed derivation.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
    return fnv1a(s.data(), s.size(), h);
}

/// Derive a named sub-stream seed from the global seed. Every module draws
/// its randomness from its own stream so runs can be re-seeded independently.
inline std::uint64_t substream_seed(std::uint64_t global_seed, std::string_view name) {
    std::uint64_t h = fnv1a(name);
    h = fnv1a(&global_seed, sizeof(global_seed), h);
    // splitmix64 finalizer to decorrelate nearby seeds
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t global_seed, std::string_view name) {
    return std::mt19937_64(substream_seed(global_seed, name));
}

}  // namespace tendon
