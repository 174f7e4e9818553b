#pragma once

// Bounded-width searches: products of conjugates of generators, of
// commutators and of palindromes, joined meet-in-the-middle on structural
// hashes; the conjugates-to-commutators rewriter; the palindrome check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "enumeration.hpp"
#include "expression.hpp"
#include "group.hpp"
#include "parallel.hpp"
#include "words.hpp"

namespace griglab {

struct SearchBudget {
  int radius = 8;        // conjugators / commutator entries / palindrome half-length
  int max_factors = 4;
  double seconds = 0;    // 0 = no time cap
  unsigned threads = 1;
};

enum class WidthStatus { Confirmed, Inconclusive };

inline const char* to_string(WidthStatus s) {
  return s == WidthStatus::Confirmed ? "confirmed" : "inconclusive";
}

struct WidthResult {
  WidthStatus status = WidthStatus::Inconclusive;
  Expression expr;
};

/// Deduplicated set of factor elements, each with the first label that
/// produced it.
class FactorSet {
 public:
  FactorSet(const Group& g, ExprKind kind) : group_(&g), kind_(kind) {}

  const Group& group() const noexcept { return *group_; }
  ExprKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return elems_.size(); }
  Element element(std::size_t i) const { return elems_[i]; }
  Element inverse(std::size_t i) const { return inverses_[i]; }
  const Factor& factor(std::size_t i) const { return factors_[i]; }

  bool add(Element e, Factor f) {
    if (!ids_.emplace(e.id(), elems_.size()).second) return false;
    by_hash_.emplace(group_->structural_hash(e), elems_.size());
    elems_.push_back(e);
    inverses_.push_back(group_->invert(e));
    factors_.push_back(std::move(f));
    return true;
  }

  std::optional<std::size_t> find(Element e) const {
    auto it = ids_.find(e.id());
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Candidate index for a structural hash (verify before trusting).
  std::optional<std::size_t> find_hash(std::uint64_t h) const {
    auto it = by_hash_.find(h);
    if (it == by_hash_.end()) return std::nullopt;
    return it->second;
  }

 private:
  const Group* group_;
  ExprKind kind_;
  std::vector<Element> elems_, inverses_;
  std::vector<Factor> factors_;
  std::unordered_map<std::uint32_t, std::size_t> ids_;
  std::unordered_multimap<std::uint64_t, std::size_t> by_hash_;
};

/// C_R = {x^t : x ∈ bases, t ∈ B(R)}, in (t, x) breadth-first order.
inline FactorSet conjugate_set(const WordRewriter& rw, const std::string& bases, int R,
                               unsigned threads = 1) {
  const Group& g = rw.group();
  FactorSet s(g, ExprKind::Conjugates);
  Ball b = ball(g, rw, R, {threads});
  std::vector<Element> xs;
  for (char c : bases) xs.push_back(g.generator(c));
  for (const auto& t : b.entries())
    for (std::size_t k = 0; k < xs.size(); ++k)
      s.add(g.conjugate(xs[k], t.element), {std::string(1, bases[k]), t.word});
  return s;
}

/// Comm_R = {[x, y] : x, y ∈ B(R)}.
inline FactorSet commutator_set(const WordRewriter& rw, int R, unsigned threads = 1) {
  const Group& g = rw.group();
  FactorSet s(g, ExprKind::Commutators);
  Ball b = ball(g, rw, R, {threads});
  std::vector<Element> row(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    parallel_for(b.size(), threads, [&](std::size_t j) { row[j] = g.commutator(b[i].element, b[j].element); });
    for (std::size_t j = 0; j < b.size(); ++j) s.add(row[j], {b[i].word, b[j].word});
  }
  return s;
}

/// Values of the odd palindromes u·x·u^R with |u| ≤ R (all reduced u).
/// Even palindromes are trivial over involutions and are not needed.
inline FactorSet palindrome_set(const WordRewriter& rw, int R) {
  const Group& g = rw.group();
  FactorSet s(g, ExprKind::Palindromes);
  for (int len = 0; len <= R; ++len)
    for (const auto& u : enumerate_reduced(rw, len))
      for (char x : g.alphabet()) {
        std::string p = u + x + std::string(u.rbegin(), u.rend());
        s.add(g.eval(p), {p, ""});
      }
  return s;
}

class SearchTimeout : public std::runtime_error {
 public:
  SearchTimeout() : std::runtime_error("search time budget exhausted") {}
};

/// Products of at most five factors from a FactorSet, found by joining
/// prefixes against a table of pair products keyed by structural hash.
/// Hits are always re-verified; among all solutions with the fewest
/// factors the one with the lexicographically least index tuple of the
/// enumerated prefix is returned, independent of thread count.
class ProductSearch {
 public:
  ProductSearch(const FactorSet& set, unsigned threads = 1) : set_(&set), threads_(std::max(1u, threads)) {}

  const FactorSet& factors() const noexcept { return *set_; }

  /// Throws SearchTimeout if the deadline passes.
  std::optional<Expression> find(Element target, int kmax,
                                 std::optional<std::chrono::steady_clock::time_point> deadline = {}) const {
    const Group& g = set_->group();
    const std::size_t n = set_->size();
    auto check_time = [&] {
      if (deadline && std::chrono::steady_clock::now() > *deadline) throw SearchTimeout();
    };
    if (g.is_identity(target)) return make({}, target);
    if (kmax >= 1)
      if (auto i = set_->find(target)) return make({*i}, target);
    if (kmax >= 2) {
      std::size_t hit = parallel_first(n, threads_, [&](std::size_t i) {
        auto j = single(g.probe_product(set_->inverse(i), target).hash);
        if (!j) return false;
        return verify({i, *j}, target);
      });
      if (hit != kNoHit) return make({hit, *single(g.probe_product(set_->inverse(hit), target).hash)}, target);
    }
    check_time();
    if (kmax >= 3) {
      build_pairs();
      std::size_t hit = parallel_first(n, threads_, [&](std::size_t i) {
        auto p = pair(g.probe_product(set_->inverse(i), target).hash);
        return p && verify({i, p->first, p->second}, target);
      });
      if (hit != kNoHit) {
        auto p = pair(g.probe_product(set_->inverse(hit), target).hash);
        return make({hit, p->first, p->second}, target);
      }
    }
    check_time();
    if (kmax >= 4) {
      build_pairs();
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) check_time();
        Element a = g.multiply(set_->inverse(i), target);
        std::size_t hit = parallel_first(n, threads_, [&](std::size_t j) {
          auto p = pair(g.probe_product(set_->inverse(j), a).hash);
          return p && verify({i, j, p->first, p->second}, target);
        });
        if (hit != kNoHit) {
          auto p = pair(g.probe_product(set_->inverse(hit), a).hash);
          return make({i, hit, p->first, p->second}, target);
        }
      }
    }
    if (kmax >= 5) {
      build_pairs();
      for (std::size_t i = 0; i < n; ++i) {
        Element a = g.multiply(set_->inverse(i), target);
        for (std::size_t j = 0; j < n; ++j) {
          check_time();
          Element b = g.multiply(set_->inverse(j), a);
          std::size_t hit = parallel_first(n, threads_, [&](std::size_t l) {
            auto p = pair(g.probe_product(set_->inverse(l), b).hash);
            return p && verify({i, j, l, p->first, p->second}, target);
          });
          if (hit != kNoHit) {
            auto p = pair(g.probe_product(set_->inverse(hit), b).hash);
            return make({i, j, hit, p->first, p->second}, target);
          }
        }
      }
    }
    if (kmax > 5) throw std::invalid_argument("at most 5 factors supported");
    return std::nullopt;
  }

 private:
  std::optional<std::size_t> single(std::uint64_t h) const { return set_->find_hash(h); }

  std::optional<std::pair<std::uint32_t, std::uint32_t>> pair(std::uint64_t h) const {
    auto it = pairs_.find(h);
    if (it == pairs_.end()) return std::nullopt;
    return it->second;
  }

  void build_pairs() const {
    std::call_once(pairs_once_, [&] {
      const Group& g = set_->group();
      const std::size_t n = set_->size();
      std::vector<std::uint64_t> hashes(n * n);
      parallel_for(n, threads_, [&](std::size_t k) {
        for (std::size_t l = 0; l < n; ++l)
          hashes[k * n + l] = g.probe_product(set_->element(k), set_->element(l)).hash;
      });
      pairs_.reserve(n * n);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          pairs_.try_emplace(hashes[k * n + l], static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l));
    });
  }

  bool verify(const std::vector<std::size_t>& idx, Element target) const {
    const Group& g = set_->group();
    Element x = g.identity();
    for (auto i : idx) x = g.multiply(x, set_->element(i));
    return x == target;
  }

  Expression make(const std::vector<std::size_t>& idx, Element target) const {
    Expression e;
    e.kind = set_->kind();
    for (auto i : idx) e.factors.push_back(set_->factor(i));
    if (e.evaluate(set_->group()) != target) throw std::logic_error("width witness failed re-verification");
    return e;
  }

  const FactorSet* set_;
  unsigned threads_;
  mutable std::once_flag pairs_once_;
  mutable std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> pairs_;
};

namespace detail {
inline WidthResult run_search(const ProductSearch& s, Element target, const SearchBudget& b) {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (b.seconds > 0)
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(b.seconds));
  try {
    if (auto e = s.find(target, b.max_factors, deadline)) return {WidthStatus::Confirmed, *e};
  } catch (const SearchTimeout&) {
  }
  WidthResult r;
  r.expr.kind = s.factors().kind();
  return r;
}
}  // namespace detail

/// g as a product of ≤ k_max conjugates x^t, x ∈ bases (default: all
/// generators), t ∈ B(R).
inline WidthResult conjugate_width(const WordRewriter& rw, Element g, const SearchBudget& b,
                                   std::string bases = "") {
  if (bases.empty()) bases = rw.group().alphabet();
  FactorSet set = conjugate_set(rw, bases, b.radius, b.threads);
  return detail::run_search(ProductSearch(set, b.threads), g, b);
}

inline WidthResult commutator_width(const WordRewriter& rw, Element g, const SearchBudget& b) {
  FactorSet set = commutator_set(rw, b.radius, b.threads);
  return detail::run_search(ProductSearch(set, b.threads), g, b);
}

inline WidthResult palindromic_width(const WordRewriter& rw, Element g, const SearchBudget& b) {
  const Group& grp = rw.group();
  for (char c : grp.alphabet())
    if (!grp.is_involution(c)) throw std::invalid_argument("palindromic width needs an involutive generating set");
  FactorSet set = palindrome_set(rw, b.radius);
  return detail::run_search(ProductSearch(set, b.threads), g, b);
}

// --- palindromes are conjugates ---------------------------------------------

struct PalindromeViolation {
  std::string word;
  std::string reason;
};

struct PalindromeReport {
  std::size_t checked = 0, odd = 0, even = 0;
  std::vector<PalindromeViolation> violations;
};

/// Every palindromic word p with |p| ≤ L: odd p = u·x·u^R must equal
/// u·x·u⁻¹; even p must reduce to the empty word.
inline PalindromeReport palindrome_conjugate_check(const WordRewriter& rw, int L) {
  const Group& g = rw.group();
  std::string alpha = g.alphabet();
  for (char c : alpha)
    if (!g.is_involution(c)) throw std::invalid_argument("palindrome check needs involutive generators");
  PalindromeReport rep;
  for (int len = 0; len <= L; ++len) {
    int half = len / 2;
    std::vector<std::size_t> digits(half, 0);
    for (;;) {
      std::string u;
      for (auto d : digits) u += alpha[d];
      std::string ur(u.rbegin(), u.rend());
      if (len % 2 == 0) {
        std::string p = u + ur;
        ++rep.checked;
        ++rep.even;
        if (!rw.reduce(p).empty()) rep.violations.push_back({p, "even palindrome does not reduce to 1"});
      } else {
        for (char x : alpha) {
          std::string p = u + x + ur;
          ++rep.checked;
          ++rep.odd;
          Element want = g.multiply(g.multiply(g.eval(u), g.generator(x)), g.invert(g.eval(u)));
          if (g.eval(p) != want) rep.violations.push_back({p, "not the conjugate of its middle letter"});
        }
      }
      int k = half - 1;
      while (k >= 0 && ++digits[k] == alpha.size()) digits[k--] = 0;
      if (k < 0) break;
    }
  }
  return rep;
}

// --- conjugates to commutators ---------------------------------------------

struct CommutatorRewrite {
  std::string prefix;          // z = x₁⋯xₙ, reduced
  Expression commutators;      // ∏ [x_j, ρ_j]^{x_{j+1}⋯x_n}
  Expression prefix_commutators;  // z as commutators when z ∈ Γ′ could be absorbed
  std::string residual;        // what is left of z after absorption
  std::size_t count() const { return commutators.size() + prefix_commutators.size(); }
};

/// e = ∏ x_j^{ρ_j} = z · ∏ [x_j, ρ_j]^{x_{j+1}⋯x_n} with z = x₁⋯xₙ, using
/// x^ρ = x·[x,ρ] and [u,v]^t = [u^t, v^t]. For involutive generators the
/// prefix is then absorbed: x·w·x·R = w·R·[w^R, x^R], one commutator per
/// removed pair, so the total stays ≤ n + n/2 ≤ 3N.
inline CommutatorRewrite rewrite_conjugates_to_commutators(const WordRewriter& rw, const Expression& e) {
  const Group& g = rw.group();
  if (e.kind != ExprKind::Conjugates) throw std::invalid_argument("expected a product of conjugates");
  CommutatorRewrite out;
  out.commutators.kind = ExprKind::Commutators;
  out.prefix_commutators.kind = ExprKind::Commutators;
  std::string z;
  for (const auto& f : e.factors) z += f.base;
  for (std::size_t j = 0; j < e.factors.size(); ++j) {
    std::string t;
    for (std::size_t k = j + 1; k < e.factors.size(); ++k) t += e.factors[k].base;
    std::string ti = inverse_word(g, t);
    const Factor& f = e.factors[j];
    out.commutators.factors.push_back({rw.reduce(ti + f.base + t), rw.reduce(ti + f.conj + t)});
  }
  out.prefix = rw.reduce(z);

  bool involutive = true;
  for (char c : g.alphabet()) involutive = involutive && g.is_involution(c);
  std::string w = out.prefix;
  std::vector<Factor> absorbed;  // in order: z = residual · absorbed...
  // z = x w x R  →  w R [w^R, x^R]; the new commutators stack up in front of
  // earlier ones: z = w' R' C_new C_old.
  while (involutive && !w.empty()) {
    char x = w[0];
    std::size_t k = w.find(x, 1);
    if (k == std::string::npos) break;
    std::string mid = w.substr(1, k - 1), rest = w.substr(k + 1);
    std::string ri = inverse_word(g, rest);
    absorbed.insert(absorbed.begin(), Factor{rw.reduce(ri + mid + rest), rw.reduce(ri + std::string(1, x) + rest)});
    w = rw.reduce(mid + rest);
  }
  out.residual = w;
  out.prefix_commutators.factors = std::move(absorbed);

  Element lhs = g.multiply(g.eval(out.prefix), out.commutators.evaluate(g));
  Element abs = g.multiply(g.eval(out.residual), out.prefix_commutators.evaluate(g));
  if (lhs != e.evaluate(g) || abs != g.eval(out.prefix))
    throw std::logic_error("commutator rewrite failed re-verification");
  return out;
}

/// a^x·a^y = [x·y⁻¹, a]^y, checked on sample pairs; returns the failures.
inline std::vector<std::pair<std::string, std::string>> audit_conjugate_pair_identity(
    const WordRewriter& rw, const std::vector<std::pair<std::string, std::string>>& samples,
    char base = 'a') {
  const Group& g = rw.group();
  std::vector<std::pair<std::string, std::string>> bad;
  Element a = g.generator(base);
  for (const auto& [x, y] : samples) {
    Element xe = g.eval(x), ye = g.eval(y);
    Element lhs = g.multiply(g.conjugate(a, xe), g.conjugate(a, ye));
    Element rhs = g.conjugate(g.commutator(g.multiply(xe, g.invert(ye)), a), ye);
    if (lhs != rhs) bad.emplace_back(x, y);
  }
  return bad;
}

}  // namespace griglab
