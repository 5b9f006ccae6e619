#pragma once

#include <cstdint>
#include <random>

namespace chaoskit {

/// splitmix64 finalizer; used both for seed derivation and for
/// counter-based (order-independent) per-pair random numbers.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a root seed and a stream index
/// (run index, trial index, ...). Streams with distinct indices are
/// statistically independent for practical purposes.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    return mix64(mix64(root) ^ mix64(stream + 0x51ed2701a3f45b17ULL));
}

/// Uniform in [0,1) from a 64-bit hash key. The value depends only on the
/// key, never on evaluation order, so candidate enumeration order cannot
/// change simulation outcomes.
inline double hash_uniform(std::uint64_t key) {
    return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

/// Key for the reaction-candidate uniform of ordered pair (i,j), reaction r,
/// at a given step.
inline std::uint64_t pair_key(std::uint64_t stream_seed, std::uint64_t step,
                              std::uint64_t reaction, std::uint64_t i, std::uint64_t j) {
    std::uint64_t h = stream_seed;
    h = mix64(h ^ step);
    h = mix64(h ^ (reaction << 40 | i << 20 | j));
    return h;
}

using Rng = std::mt19937_64;

}  // namespace chaoskit
