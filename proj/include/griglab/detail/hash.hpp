#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>

namespace griglab::detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) noexcept {
  return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// FNV-1a, used where a hash must be stable across builds (file checksums,
// preset fingerprints).
inline constexpr std::uint64_t fnv1a(std::string_view bytes,
                                     std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct PairHash {
  std::size_t operator()(std::pair<std::uint32_t, std::uint32_t> p) const noexcept {
    return splitmix64((std::uint64_t{p.first} << 32) | p.second);
  }
};

}  // namespace griglab::detail
