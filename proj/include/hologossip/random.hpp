#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace hologossip {

/// The only generator used anywhere in the library: 64-bit Mersenne Twister
/// (std::mt19937_64, whose output sequence is fixed by the C++ standard),
/// seeded directly with the user's seed. Derived draws below avoid the
/// implementation-defined std distributions so runs are bit-reproducible
/// across standard libraries.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform integer in [0, bound) by rejection on the raw 64-bit output.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace hologossip
