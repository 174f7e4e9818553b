#pragma once

// The infinite dihedral group ⟨r, s | r² = s² = 1⟩ on its own word engine:
// elements are alternating r/s strings, multiplication is concatenation
// with cancellation of equal neighbours.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace griglab::dihedral {

inline std::string normalize(std::string_view w) {
  std::string out;
  for (char c : w) {
    if (c != 'r' && c != 's') throw std::invalid_argument("dihedral words use only r and s");
    if (!out.empty() && out.back() == c)
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

inline std::string multiply(std::string_view x, std::string_view y) {
  return normalize(std::string(x) + std::string(y));
}

inline std::string inverse(std::string_view x) { return std::string(x.rbegin(), x.rend()); }

/// u⁻¹·x·u.
inline std::string conjugate(std::string_view x, std::string_view u) {
  return normalize(inverse(u) + std::string(x) + std::string(u));
}

/// All elements of length ≤ L in normal form, shortest first.
inline std::vector<std::string> elements(int L) {
  std::vector<std::string> out{""};
  for (int n = 1; n <= L; ++n)
    for (char first : {'r', 's'}) {
      std::string w;
      for (int i = 0; i < n; ++i) w += (i % 2 == 0) ? first : (first == 'r' ? 's' : 'r');
      out.push_back(w);
    }
  return out;
}

struct ConjugateFactor {
  char base;
  std::string conj;
};

struct Decomposition {
  std::string element;
  std::vector<ConjugateFactor> factors;
  bool found = false;
};

inline std::string evaluate(const std::vector<ConjugateFactor>& f) {
  std::string x;
  for (const auto& c : f) x = multiply(x, conjugate(std::string(1, c.base), c.conj));
  return x;
}

/// Fewest conjugates of r, s (conjugators of length ≤ R, at most two
/// factors) whose product is x.
inline Decomposition decompose(std::string_view x, int R) {
  Decomposition d;
  d.element = normalize(x);
  if (d.element.empty()) {
    d.found = true;
    return d;
  }
  std::vector<ConjugateFactor> cs;
  for (const auto& u : elements(R))
    for (char b : {'r', 's'}) cs.push_back({b, u});
  for (const auto& c : cs)
    if (evaluate({c}) == d.element) {
      d.factors = {c};
      d.found = true;
      return d;
    }
  for (const auto& c1 : cs)
    for (const auto& c2 : cs)
      if (evaluate({c1, c2}) == d.element) {
        d.factors = {c1, c2};
        d.found = true;
        return d;
      }
  return d;
}

struct WidthReport {
  int max_length = 0;
  std::size_t elements = 0, decomposed = 0, max_factors = 0;
  std::vector<Decomposition> rows;
};

/// Every element of length ≤ L as a product of ≤ 2 conjugates.
inline WidthReport preset_width(int L) {
  WidthReport rep;
  rep.max_length = L;
  for (const auto& x : elements(L)) {
    Decomposition d = decompose(x, (L + 1) / 2);
    ++rep.elements;
    if (d.found && evaluate(d.factors) == d.element) {
      ++rep.decomposed;
      rep.max_factors = std::max(rep.max_factors, d.factors.size());
    }
    rep.rows.push_back(std::move(d));
  }
  return rep;
}

}  // namespace griglab::dihedral
