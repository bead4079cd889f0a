#pragma once

#include <cstdint>
#include <random>

namespace covpart {

// Deterministic generator for a (seed, stream) pair. Independent streams are
// used for retry attempts and per-cube rounding so parallel and serial
// evaluation draw identical randomness.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace covpart
