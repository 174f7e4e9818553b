#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace griglab {

/// Permutation of {0..d-1} for d <= 16, packed four bits per point.
struct Perm {
  std::uint64_t bits = 0;

  static constexpr Perm identity(int d) noexcept {
    Perm p;
    for (int i = 0; i < d; ++i) p.set(i, i);
    return p;
  }

  static Perm from_images(const std::vector<int>& images) {
    Perm p;
    for (int i = 0; i < static_cast<int>(images.size()); ++i) p.set(i, images[i]);
    return p;
  }

  constexpr int operator()(int i) const noexcept {
    return static_cast<int>((bits >> (4 * i)) & 0xF);
  }

  constexpr void set(int i, int v) noexcept {
    bits &= ~(std::uint64_t{0xF} << (4 * i));
    bits |= std::uint64_t(v & 0xF) << (4 * i);
  }

  constexpr bool is_identity(int d) const noexcept { return bits == identity(d).bits; }

  friend constexpr bool operator==(Perm, Perm) = default;
};

/// p∘q, i.e. i ↦ p(q(i)).
constexpr Perm compose(Perm p, Perm q, int d) noexcept {
  Perm r;
  for (int i = 0; i < d; ++i) r.set(i, p(q(i)));
  return r;
}

constexpr Perm inverse(Perm p, int d) noexcept {
  Perm r;
  for (int i = 0; i < d; ++i) r.set(p(i), i);
  return r;
}

inline std::vector<int> images(Perm p, int d) {
  std::vector<int> out(d);
  for (int i = 0; i < d; ++i) out[i] = p(i);
  return out;
}

/// Permutation of the d^m leaves of a finite tree level.
using LeafPerm = std::vector<std::uint32_t>;

inline LeafPerm compose(const LeafPerm& p, const LeafPerm& q) {
  LeafPerm r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
  return r;
}

inline bool is_identity(const LeafPerm& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

}  // namespace griglab
