#pragma once

// Symbolic products of conjugates, commutators or palindromes.

#include <cctype>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "group.hpp"
#include "words.hpp"

namespace griglab {

enum class ExprKind { Conjugates, Commutators, Palindromes };

inline const char* to_string(ExprKind k) {
  switch (k) {
    case ExprKind::Conjugates: return "conjugates";
    case ExprKind::Commutators: return "commutators";
    case ExprKind::Palindromes: return "palindromes";
  }
  return "?";
}

/// Conjugates: base^conj = conj⁻¹·base·conj. Commutators: [base, conj] =
/// base⁻¹·conj⁻¹·base·conj. Palindromes: the word base (conj unused).
struct Factor {
  std::string base;
  std::string conj;
  bool operator==(const Factor&) const = default;
};

struct Expression {
  ExprKind kind = ExprKind::Conjugates;
  std::vector<Factor> factors;

  std::size_t size() const noexcept { return factors.size(); }
  bool empty() const noexcept { return factors.empty(); }

  std::string factor_word(const Group& g, std::size_t i) const {
    const Factor& f = factors[i];
    switch (kind) {
      case ExprKind::Conjugates: return inverse_word(g, f.conj) + f.base + f.conj;
      case ExprKind::Commutators:
        return inverse_word(g, f.base) + inverse_word(g, f.conj) + f.base + f.conj;
      case ExprKind::Palindromes: return f.base;
    }
    return {};
  }

  /// The expression written out as one (unreduced) word.
  std::string word(const Group& g) const {
    std::string w;
    for (std::size_t i = 0; i < factors.size(); ++i) w += factor_word(g, i);
    return w;
  }

  Element evaluate(const Group& g) const {
    Element x = g.identity();
    for (const auto& f : factors) {
      Element y;
      switch (kind) {
        case ExprKind::Conjugates: y = g.conjugate(g.eval(f.base), g.eval(f.conj)); break;
        case ExprKind::Commutators: y = g.commutator(g.eval(f.base), g.eval(f.conj)); break;
        case ExprKind::Palindromes: y = g.eval(f.base); break;
      }
      x = g.multiply(x, y);
    }
    return x;
  }

  /// Conjugates "a^{bc}", commutators "[a,b]", palindromes as words;
  /// factors joined by '*', "1" when empty.
  std::string to_string() const {
    if (factors.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) s += '*';
      const Factor& f = factors[i];
      switch (kind) {
        case ExprKind::Conjugates:
          s += f.base;
          if (!f.conj.empty()) s += "^{" + f.conj + "}";
          break;
        case ExprKind::Commutators: s += "[" + f.base + "," + f.conj + "]"; break;
        case ExprKind::Palindromes: s += f.base.empty() ? "1" : f.base; break;
      }
    }
    return s;
  }

  Expression& append(const Expression& other) {
    if (other.kind != kind && !other.empty())
      throw std::invalid_argument("cannot append expressions of different kinds");
    factors.insert(factors.end(), other.factors.begin(), other.factors.end());
    return *this;
  }
};

/// Parses a target: letters (upper case = inverse), commutators [u,v] and
/// parenthesised groups with an optional power, e.g. "(ab)^2[a,c]d".
/// Returns an equivalent generator word (not reduced).
inline std::string parse_target(const Group& g, std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw WordError("cannot parse target '" + std::string(text) + "' at " + std::to_string(pos) + ": " + why);
  };
  std::function<std::string(char)> seq = [&](char stop) {
    std::string out;
    while (pos < text.size() && text[pos] != stop && text[pos] != ',') {
      char c = text[pos];
      std::string atom;
      if (c == '[') {
        ++pos;
        std::string u = seq(',');
        if (pos >= text.size() || text[pos] != ',') fail("expected ','");
        ++pos;
        std::string v = seq(']');
        if (pos >= text.size() || text[pos] != ']') fail("expected ']'");
        ++pos;
        atom = inverse_word(g, u) + inverse_word(g, v) + u + v;
      } else if (c == '(') {
        ++pos;
        atom = seq(')');
        if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
        ++pos;
      } else if (g.has_letter(c)) {
        atom = std::string(1, c);
        ++pos;
      } else if (c == ' ') {
        ++pos;
        continue;
      } else {
        fail(std::string("unexpected '") + c + "'");
      }
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        bool neg = pos < text.size() && text[pos] == '-';
        if (neg) ++pos;
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected exponent");
        int k = std::stoi(std::string(text.substr(start, pos - start)));
        std::string base = neg ? inverse_word(g, atom) : atom;
        atom.clear();
        for (int i = 0; i < k; ++i) atom += base;
      }
      out += atom;
    }
    return out;
  };
  std::string w = seq('\0');
  if (pos != text.size()) fail("trailing input");
  return w;
}

/// Conjugates every factor of a conjugate product by t: (x^s)^t = x^{st}.
inline Expression conjugated(const WordRewriter& rw, Expression e, std::string_view t) {
  if (e.kind != ExprKind::Conjugates) throw std::invalid_argument("conjugated() needs a conjugate product");
  for (auto& f : e.factors) f.conj = rw.reduce(f.conj + std::string(t));
  return e;
}

}  // namespace griglab
