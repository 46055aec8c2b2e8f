#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace covidrhythm {

// Stable FNV-1a hash; used to derive independent module seeds from one
// master seed so every stage owns its own stream.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = fnv1a(tag);
  h ^= master + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index) {
  return derive_seed(derive_seed(master, tag) + 0x2545f4914f6cdd1dull * index,
                     tag);
}

using Rng = std::mt19937_64;

}  // namespace covidrhythm
