#pragma once

// Finite level quotients Γ/St(m), realised as permutation groups on the
// d^m vertices of level m: orders, conjugacy classes, normal closures.

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "enumeration.hpp"
#include "group.hpp"
#include "words.hpp"

namespace griglab {

struct LeafPermHash {
  std::size_t operator()(const LeafPerm& p) const noexcept {
    std::uint64_t h = p.size();
    for (auto v : p) h = detail::hash_combine(h, v);
    return h;
  }
};

class UnstabilizedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Γ/St(m) as the group generated by the level-m actions of the generators.
/// Elements are numbered in breadth-first order from the identity, each with
/// a shortest word.
class LevelQuotient {
 public:
  LevelQuotient(const Group& g, const WordRewriter& rw, int m, std::size_t max_order = 1u << 23)
      : level_(m) {
    std::string alpha = rw.alphabet();
    for (char c : alpha) {
      letters_.push_back(c);
      gens_.push_back(g.level_action(g.generator(c), m));
    }
    LeafPerm id(gens_.empty() ? 1 : gens_[0].size());
    std::iota(id.begin(), id.end(), 0u);
    add(id, "");
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      for (std::size_t j = 0; j < gens_.size(); ++j) {
        LeafPerm q = compose(elems_[i], gens_[j]);
        if (index_.count(q)) continue;
        if (elems_.size() >= max_order)
          throw BudgetExceeded("quotient at level " + std::to_string(m) + " exceeds " +
                                   std::to_string(max_order) + " elements", m - 1);
        add(std::move(q), words_[i] + letters_[j]);
      }
    }
  }

  int level() const noexcept { return level_; }
  std::size_t order() const noexcept { return elems_.size(); }
  const LeafPerm& element(std::size_t i) const { return elems_[i]; }
  const std::string& word(std::size_t i) const { return words_[i]; }

  std::optional<std::size_t> index_of(const LeafPerm& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const Group& g, Element x) const {
    auto i = index_of(g.level_action(x, level_));
    if (!i) throw std::logic_error("level action outside the generated quotient");
    return *i;
  }

  std::size_t multiply(std::size_t i, std::size_t j) const { return *index_of(compose(elems_[i], elems_[j])); }

  std::size_t inverse(std::size_t i) const {
    const LeafPerm& p = elems_[i];
    LeafPerm q(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) q[p[k]] = static_cast<std::uint32_t>(k);
    return *index_of(q);
  }

  /// Conjugacy class ids (classes numbered by their first element).
  const std::vector<std::uint32_t>& classes() const {
    if (classes_.empty()) {
      std::vector<std::size_t> parent(order());
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
      };
      std::vector<std::size_t> gi, ginv;
      for (const auto& s : gens_) gi.push_back(*index_of(s));
      for (auto s : gi) ginv.push_back(inverse(s));
      for (std::size_t i = 0; i < order(); ++i)
        for (std::size_t j = 0; j < gi.size(); ++j) {
          std::size_t c = multiply(multiply(ginv[j], i), gi[j]);
          std::size_t a = find(i), b = find(c);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      classes_.resize(order());
      for (std::size_t i = 0; i < order(); ++i) classes_[i] = static_cast<std::uint32_t>(find(i));
    }
    return classes_;
  }

  /// Membership table of the normal closure of the given elements.
  std::vector<bool> normal_closure(const std::vector<std::size_t>& seeds) const {
    std::vector<bool> in(order(), false);
    std::vector<std::size_t> members{0}, gens;
    in[0] = true;
    std::vector<std::size_t> gi, ginv;
    for (const auto& s : gens_) gi.push_back(*index_of(s));
    for (auto s : gi) ginv.push_back(inverse(s));
    std::vector<std::size_t> pending(seeds.begin(), seeds.end());
    while (!pending.empty()) {
      std::size_t h = pending.back();
      pending.pop_back();
      if (in[h]) continue;
      gens.push_back(h);
      // regenerate the subgroup with the new generator
      for (std::size_t k = 0; k < members.size(); ++k)
        for (std::size_t s : gens) {
          std::size_t p = multiply(members[k], s);
          if (!in[p]) {
            in[p] = true;
            members.push_back(p);
          }
        }
      for (std::size_t s : gens)
        for (std::size_t j = 0; j < gi.size(); ++j) {
          std::size_t c = multiply(multiply(ginv[j], s), gi[j]);
          if (!in[c]) pending.push_back(c);
        }
    }
    return in;
  }

 private:
  void add(LeafPerm p, std::string w) {
    index_.emplace(p, elems_.size());
    elems_.push_back(std::move(p));
    words_.push_back(std::move(w));
  }

  int level_;
  std::string letters_;
  std::vector<LeafPerm> gens_;
  std::vector<LeafPerm> elems_;
  std::vector<std::string> words_;
  std::unordered_map<LeafPerm, std::size_t, LeafPermHash> index_;
  mutable std::vector<std::uint32_t> classes_;
};

inline std::uint64_t finite_quotient_order(const Group& g, const WordRewriter& rw, int m,
                                           std::size_t max_order = 1u << 23) {
  if (m < 0) throw std::invalid_argument("negative level");
  return LevelQuotient(g, rw, m, max_order).order();
}

/// Index of the image of the normal closure of `word` in Γ/St(m).
inline std::uint64_t normal_closure_index(const Group& g, const WordRewriter& rw,
                                          std::string_view word, int m) {
  LevelQuotient q(g, rw, m);
  auto in = q.normal_closure({q.index_of(g, g.eval(word))});
  std::uint64_t size = 0;
  for (bool b : in) size += b;
  return q.order() / size;
}

}  // namespace griglab
