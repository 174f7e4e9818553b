#pragma once

// Word-level layer: rewriting to the alternating normal form
// a^ε * a * … a *^δ, word sections for level-one stabilizer words, and
// enumeration of syntactically reduced words.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "group.hpp"

namespace griglab {

class WordError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Formal inverse of a word: reversed, with each letter replaced by its
/// inverse letter (involutions stay lower-case).
inline std::string inverse_word(const Group& g, std::string_view w) {
  std::string out(w.rbegin(), w.rend());
  for (char& c : out) {
    char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (g.is_involution(lc))
      c = lc;
    else
      c = std::islower(static_cast<unsigned char>(c))
              ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
              : lc;
  }
  return out;
}

/// Length-reducing rewriting on words: xx⁻¹ → 1 for every letter and
/// uv → w for every two-letter relation of the preset, each verified with
/// the equality oracle when the rewriter is built.
class WordRewriter {
 public:
  explicit WordRewriter(const Group& g) : group_(&g) {
    for (char c : g.alphabet()) {
      letters_.push_back(c);
      if (!g.is_involution(c))
        letters_.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    for (auto& row : table_) row.fill(kNoRule);
    for (char u : letters_) {
      for (char v : letters_) {
        Element uv = g.multiply(g.generator(u), g.generator(v));
        if (g.is_identity(uv)) {
          table_[idx(u)][idx(v)] = '\0';
          continue;
        }
        for (const auto& r : g.preset().relations) {
          if (r.lhs.size() != 2 || r.lhs[0] != u || r.lhs[1] != v || r.rhs.size() > 1) continue;
          // Preset relations are checked by Group; re-check here so the
          // rewriter never relies on an unverified rule.
          if (g.eval(r.rhs) != uv)
            throw WordError("relation " + r.lhs + "=" + r.rhs + " fails the equality oracle");
          table_[idx(u)][idx(v)] = r.rhs.empty() ? '\0' : r.rhs[0];
        }
      }
    }
  }

  const Group& group() const noexcept { return *group_; }

  /// Letters of the rewriting alphabet: generators, then inverse letters of
  /// non-involutions, sorted.
  std::string alphabet() const {
    std::string s(letters_.begin(), letters_.end());
    std::sort(s.begin(), s.end());
    return s;
  }

  /// Leftmost-innermost normal form.
  std::string reduce(std::string_view w) const {
    std::string stack;
    stack.reserve(w.size());
    for (char c : w) {
      if (!group_->has_letter(c)) throw WordError(std::string("letter '") + c + "' not in alphabet");
      if (group_->is_involution(static_cast<char>(std::tolower(static_cast<unsigned char>(c)))))
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      char cur = c;
      for (;;) {
        if (stack.empty()) {
          stack.push_back(cur);
          break;
        }
        char rule = table_[idx(stack.back())][idx(cur)];
        if (rule == kNoRule) {
          stack.push_back(cur);
          break;
        }
        stack.pop_back();
        if (rule == '\0') break;
        cur = rule;
      }
    }
    return stack;
  }

  /// No adjacent pair admits a rule.
  bool is_reduced(std::string_view w) const {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (table_[idx(w[i])][idx(w[i + 1])] != kNoRule) return false;
    return true;
  }

  /// Result of applying the rule at position i, if one applies.
  std::optional<std::string> rewrite_at(std::string_view w, std::size_t i) const {
    if (i + 1 >= w.size()) return std::nullopt;
    char rule = table_[idx(w[i])][idx(w[i + 1])];
    if (rule == kNoRule) return std::nullopt;
    std::string out(w.substr(0, i));
    if (rule != '\0') out += rule;
    out += w.substr(i + 2);
    return out;
  }

  bool can_follow(char prev, char next) const { return table_[idx(prev)][idx(next)] == kNoRule; }

 private:
  static constexpr char kNoRule = '\x7f';
  static std::size_t idx(char c) { return static_cast<unsigned char>(c) & 0x7F; }

  const Group* group_;
  std::vector<char> letters_;
  std::array<std::array<char, 128>, 128> table_{};
};

/// Sections of a word whose root permutation is trivial, computed letter by
/// letter from the preset's section table and then reduced:
/// (y_1⋯y_n)_v = (y_1)_{π(y_2⋯y_n)(v)} ⋯ (y_n)_v.
inline std::vector<std::string> word_sections(const WordRewriter& rw, std::string_view w) {
  const Group& g = rw.group();
  const int d = g.arity();
  // Suffix permutations.
  std::vector<Perm> suffix(w.size() + 1, Perm::identity(d));
  for (std::size_t i = w.size(); i-- > 0;)
    suffix[i] = compose(g.root_perm(g.generator(w[i])), suffix[i + 1], d);
  if (!suffix[0].is_identity(d))
    throw WordError("word '" + std::string(w) + "' does not stabilize the first level");
  std::vector<std::string> out(d);
  for (std::size_t i = 0; i < w.size(); ++i) {
    char c = w[i];
    bool inv = std::isupper(static_cast<unsigned char>(c));
    const GeneratorSpec* spec =
        g.preset().find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    Perm p = Perm::from_images(spec->perm);
    for (int v = 0; v < d; ++v) {
      int at = suffix[i + 1](v);
      std::string label;
      if (!inv) {
        label = spec->sections[at];
      } else {
        // (g⁻¹)_y = (g_{π⁻¹(y)})⁻¹
        label = spec->sections[inverse(p, d)(at)];
        if (label != "1") label = inverse_word(g, label);
      }
      if (label != "1") out[v] += label;
    }
  }
  for (auto& s : out) s = rw.reduce(s);
  return out;
}

/// Lexicographic stream of all reduced words of a fixed length. Restartable
/// with reset(); consume from one thread.
class ReducedWordStream {
 public:
  ReducedWordStream(const WordRewriter& rw, std::size_t length)
      : rw_(&rw), alphabet_(rw.alphabet()), length_(length) {
    reset();
  }

  void reset() {
    digits_.assign(length_, 0);
    done_ = false;
    first_ = true;
  }

  std::optional<std::string> next() {
    if (done_) return std::nullopt;
    if (first_) {
      first_ = false;
      if (!settle(0)) {
        done_ = true;
        return std::nullopt;
      }
      return current();
    }
    if (length_ == 0 || !advance(length_ - 1)) {
      done_ = true;
      return std::nullopt;
    }
    return current();
  }

 private:
  std::string current() const {
    std::string s(length_, ' ');
    for (std::size_t i = 0; i < length_; ++i) s[i] = alphabet_[digits_[i]];
    return s;
  }

  bool ok_at(std::size_t i) const {
    return i == 0 || rw_->can_follow(alphabet_[digits_[i - 1]], alphabet_[digits_[i]]);
  }

  // Makes positions [i, n) the smallest valid completion of positions [0, i).
  bool settle(std::size_t i) {
    for (; i < length_; ++i) {
      digits_[i] = 0;
      while (digits_[i] < alphabet_.size() && !ok_at(i)) ++digits_[i];
      if (digits_[i] == alphabet_.size()) return backtrack(i);
    }
    return true;
  }

  bool backtrack(std::size_t i) {
    if (i == 0) return false;
    return advance(i - 1);
  }

  bool advance(std::size_t i) {
    for (;;) {
      ++digits_[i];
      while (digits_[i] < alphabet_.size() && !ok_at(i)) ++digits_[i];
      if (digits_[i] < alphabet_.size()) return settle(i + 1);
      if (i == 0) return false;
      --i;
    }
  }

  const WordRewriter* rw_;
  std::string alphabet_;
  std::size_t length_;
  std::vector<std::size_t> digits_;
  bool done_ = false;
  bool first_ = true;
};

inline std::vector<std::string> enumerate_reduced(const WordRewriter& rw, std::size_t length) {
  std::vector<std::string> out;
  ReducedWordStream s(rw, length);
  while (auto w = s.next()) out.push_back(std::move(*w));
  return out;
}

/// Exponent-sum parity over (a, b+d, c+d) as a 3-bit mask; zero on the
/// derived subgroup of the Grigorchuk group.
inline std::uint8_t parity_vector(std::string_view w) {
  int a = 0, bd = 0, cd = 0;
  for (char c : w) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'a': a ^= 1; break;
      case 'b': bd ^= 1; break;
      case 'c': cd ^= 1; break;
      case 'd': bd ^= 1; cd ^= 1; break;
      default: throw WordError(std::string("parity vector undefined for letter '") + c + "'");
    }
  }
  return static_cast<std::uint8_t>(a | (bd << 1) | (cd << 2));
}

/// True for the Grigorchuk generator table (the only preset with a known
/// abelianization filter).
inline bool is_grigorchuk(const Group& g) {
  const auto& p = g.preset();
  if (p.arity != 2 || g.alphabet() != "abcd") return false;
  return g.eval("a") != g.identity() && g.section(g.eval("b"), 0) == g.eval("a") &&
         g.section(g.eval("b"), 1) == g.eval("c") && g.section(g.eval("c"), 1) == g.eval("d") &&
         g.section(g.eval("d"), 1) == g.eval("b") && g.is_identity(g.section(g.eval("d"), 0)) &&
         g.is_root_active(g.eval("a")) && !g.is_root_active(g.eval("b"));
}

inline void require_grigorchuk(const Group& g, std::string_view what) {
  if (!is_grigorchuk(g))
    throw WordError(std::string(what) + " requires the grigorchuk preset");
}

}  // namespace griglab
