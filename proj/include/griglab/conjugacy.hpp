#pragma once

// Conjugacy: finite-depth invariants (complete for conjugacy in the
// automorphism group of the truncated tree), explicit conjugator search,
// and the certified class bracket L ≤ f(n) ≤ U over a ball.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "enumeration.hpp"
#include "group.hpp"
#include "parallel.hpp"
#include "quotient.hpp"

namespace griglab {

/// Interned depth-m conjugacy invariants. For x at depth m, each cycle of
/// the root permutation of length ℓ through vertex v contributes
/// (ℓ, inv((x^ℓ)_v, m−1)); the invariant is the sorted multiset of these.
/// For d = 2 this is {inv(x₀), inv(x₁)} when x is inactive and
/// ("active", inv(x₁x₀)) when it is active.
///
/// With a quotient Γ/St(q) attached, every node also records the conjugacy
/// class of its image there. Sections of elements of Γ lie in Γ, so the
/// enriched certificate is still invariant under conjugation in Γ (though
/// no longer under the full automorphism group). Thread-safe.
class InvariantEngine {
 public:
  using Id = std::uint32_t;

  explicit InvariantEngine(const Group& g, const LevelQuotient* quotient = nullptr)
      : group_(&g), quotient_(quotient) {
    table_.emplace_back();  // id 0: depth-0 unit
  }

  const Group& group() const noexcept { return *group_; }

  Id invariant(Element x, int m) {
    if (m <= 0) return 0;
    const std::uint64_t key = (std::uint64_t{x.id()} << 8) | static_cast<std::uint64_t>(m);
    {
      std::lock_guard lock(mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    const Group& g = *group_;
    const int d = g.arity();
    Perm p = g.root_perm(x);
    std::vector<bool> seen(d, false);
    Entry entry;
    if (quotient_) entry.emplace_back(0, quotient_->classes()[quotient_->index_of(g, x)]);
    for (int v = 0; v < d; ++v) {
      if (seen[v]) continue;
      int len = 0;
      for (int u = v; !seen[u]; u = p(u)) {
        seen[u] = true;
        ++len;
      }
      Element power = x;
      for (int i = 1; i < len; ++i) power = g.multiply(power, x);
      entry.emplace_back(len, invariant(g.section(power, v), m - 1));
    }
    std::sort(entry.begin(), entry.end());
    std::lock_guard lock(mutex_);
    auto [it, fresh] = ids_.try_emplace(entry, static_cast<Id>(table_.size()));
    if (fresh) table_.push_back(entry);
    memo_.emplace(key, it->second);
    return it->second;
  }

  /// Canonical text form: "()" at depth 0, otherwise the sorted list of
  /// "len:child" terms.
  std::string serialize(Id id) const {
    std::lock_guard lock(mutex_);
    std::string out;
    write(id, out);
    return out;
  }

 private:
  using Entry = std::vector<std::pair<int, Id>>;

  void write(Id id, std::string& out) const {
    const Entry& e = table_[id];
    if (e.empty()) {
      out += "()";
      return;
    }
    out += '[';
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) out += ',';
      if (e[i].first == 0) {
        out += 'q' + std::to_string(e[i].second);
        continue;
      }
      out += std::to_string(e[i].first);
      out += ':';
      write(e[i].second, out);
    }
    out += ']';
  }

  const Group* group_;
  const LevelQuotient* quotient_;
  mutable std::mutex mutex_;
  std::vector<Entry> table_;
  std::map<Entry, Id> ids_;
  std::unordered_map<std::uint64_t, Id> memo_;
};

inline std::string depth_invariant(Element x, int m) {
  InvariantEngine eng(group_of(x));
  return eng.serialize(eng.invariant(x, m));
}

/// ⌈log₂ n⌉ + 3.
inline int default_invariant_depth(int n) { return oracle_depth(n) + 1; }

struct ConjugatorResult {
  bool found = false;
  std::string word;  // z with z⁻¹·x·z = y
};

/// Meet in the middle: z = u·v with u ∈ B(⌈R/2⌉), v ∈ B(⌊R/2⌋), matching
/// u⁻¹xu against v·y·v⁻¹. The first hit in (v, u) breadth-first order is
/// returned, after re-verification.
inline ConjugatorResult conjugator_search(const WordRewriter& rw, Element x, Element y, int R,
                                          unsigned threads = 1) {
  const Group& g = rw.group();
  common_group(x, y);
  if (g.equals(x, y)) return {true, ""};
  if (R <= 0) return {};
  Ball left = ball(g, rw, (R + 1) / 2, {threads});
  Ball right = ball(g, rw, R / 2, {threads});
  std::unordered_map<std::uint32_t, std::size_t> conj;  // id of x^u → index of u
  for (std::size_t i = 0; i < left.size(); ++i)
    conj.try_emplace(g.conjugate(x, left[i].element).id(), i);
  std::vector<std::uint32_t> targets(right.size());
  parallel_for(right.size(), threads, [&](std::size_t j) {
    targets[j] = g.conjugate(y, g.invert(right[j].element)).id();
  });
  for (std::size_t j = 0; j < right.size(); ++j) {
    auto it = conj.find(targets[j]);
    if (it == conj.end()) continue;
    std::string z = rw.reduce(left[it->second].word + right[j].word);
    if (!g.equals(g.conjugate(x, g.eval(z)), y))
      throw std::logic_error("conjugator failed re-verification");
    return {true, z};
  }
  return {};
}

struct MergeWitness {
  std::size_t from, to;  // ball indices
  std::string conjugator;
};

struct ConjGrowthRow {
  int n;
  std::uint64_t lower, upper;
  bool exact() const { return lower == upper; }
};

/// Union-find over a ball: buckets by depth-m invariants give the lower
/// bound, merges x ~ t⁻¹xt with t ∈ B(R) give the upper bound. Merges may
/// pass through any element of the ball, so upper(n) counts the classes
/// that meet B(n) under the merges found within the whole ball.
class ClassPartition {
 public:
  ClassPartition(const Ball& b, int depth, int radius, const WordRewriter& rw, unsigned threads = 1,
                 const LevelQuotient* quotient = nullptr)
      : ball_(&b), depth_(depth), radius_(radius), parent_(b.size()), bucket_(b.size()) {
    const Group& g = b.group();
    std::iota(parent_.begin(), parent_.end(), 0);
    InvariantEngine eng(g, quotient);
    parallel_for(b.size(), threads, [&](std::size_t i) { bucket_[i] = eng.invariant(b[i].element, depth); });
    bucket_text_.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) bucket_text_[i] = eng.serialize(bucket_[i]);

    Ball conj = griglab::ball(g, rw, radius, {threads});
    std::vector<Element> inv(conj.size());
    for (std::size_t t = 0; t < conj.size(); ++t) inv[t] = g.invert(conj[t].element);
    // hits[i]: (target index, conjugator index) for the first t reaching each target
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> hits(b.size());
    parallel_for(b.size(), threads, [&](std::size_t i) {
      std::unordered_map<std::size_t, std::size_t> first;
      for (std::size_t t = 1; t < conj.size(); ++t) {
        Element y = g.multiply(g.multiply(inv[t], b[i].element), conj[t].element);
        auto j = b.index_of(y);
        if (j && *j != i && !first.count(*j)) {
          first.emplace(*j, t);
          hits[i].emplace_back(*j, t);
        }
      }
    });
    for (std::size_t i = 0; i < b.size(); ++i)
      for (auto [j, t] : hits[i]) {
        if (bucket_[i] != bucket_[j])
          throw std::logic_error("conjugate elements carry different invariants");
        if (unite(i, j)) witnesses_.push_back({i, j, conj[t].word});
      }
  }

  const Ball& ball() const noexcept { return *ball_; }
  int depth() const noexcept { return depth_; }
  int radius() const noexcept { return radius_; }
  const std::vector<MergeWitness>& witnesses() const noexcept { return witnesses_; }
  const std::string& invariant_text(std::size_t i) const { return bucket_text_[i]; }

  std::size_t find(std::size_t i) const {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }

  std::uint64_t lower(int n) const {
    std::vector<std::uint32_t> ids(bucket_.begin(), bucket_.begin() + ball_->count_within(n));
    std::sort(ids.begin(), ids.end());
    return static_cast<std::uint64_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }

  std::uint64_t upper(int n) const {
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < ball_->count_within(n); ++i) roots.push_back(find(i));
    std::sort(roots.begin(), roots.end());
    return static_cast<std::uint64_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
  }

  /// Class representatives (shortest member, first in breadth-first order)
  /// of the classes meeting B(n).
  std::vector<std::size_t> representatives(int n) const {
    std::vector<std::size_t> reps;
    std::vector<bool> taken(ball_->size(), false);
    for (std::size_t i = 0; i < ball_->count_within(n); ++i) {
      std::size_t r = find(i);
      if (!taken[r]) {
        taken[r] = true;
        reps.push_back(i);
      }
    }
    return reps;
  }

 private:
  bool unite(std::size_t i, std::size_t j) {
    std::size_t a = find(i), b = find(j);
    if (a == b) return false;
    // smaller index stays the root so roots are breadth-first minimal
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

  const Ball* ball_;
  int depth_, radius_;
  std::vector<std::size_t> parent_;
  std::vector<std::uint32_t> bucket_;
  std::vector<std::string> bucket_text_;
  std::vector<MergeWitness> witnesses_;
};

inline std::vector<ConjGrowthRow> conj_growth_rows(const ClassPartition& cp, int N) {
  std::vector<ConjGrowthRow> rows;
  for (int n = 0; n <= N; ++n) {
    ConjGrowthRow r{n, cp.lower(n), cp.upper(n)};
    if (r.lower > r.upper || r.upper > cp.ball().count_within(n))
      throw std::logic_error("invalid conjugacy bracket at n=" + std::to_string(n));
    rows.push_back(r);
  }
  return rows;
}

/// Deepest level q ≤ max_level whose quotient Γ/St(q) has at most
/// max_order elements (0 if none does); used to enrich invariants.
inline int enrichment_level(const Group& g, const WordRewriter& rw, int max_level = 4,
                            std::size_t max_order = 1u << 16) {
  int best = 0;
  for (int q = 1; q <= max_level; ++q) {
    try {
      LevelQuotient(g, rw, q, max_order);
      best = q;
    } catch (const BudgetExceeded&) {
      break;
    }
  }
  return best;
}

/// quotient_level < 0 selects enrichment_level(); 0 disables enrichment.
inline std::vector<ConjGrowthRow> conj_growth_table(const Group& g, const WordRewriter& rw, int N,
                                                    int m, int R, unsigned threads = 1,
                                                    int quotient_level = -1) {
  Ball b = ball(g, rw, N, {threads});
  if (quotient_level < 0) quotient_level = enrichment_level(g, rw);
  std::optional<LevelQuotient> q;
  if (quotient_level > 0) q.emplace(g, rw, quotient_level);
  ClassPartition cp(b, m, R, rw, threads, q ? &*q : nullptr);
  return conj_growth_rows(cp, N);
}

struct ClassWitness {
  std::vector<Element> elements;
  std::vector<std::string> words;
  int depth = 0;  // common separating depth
};

/// k elements in pairwise distinct classes: for k ≥ 2, g_i is the first
/// element (breadth-first) whose stabilizer level is exactly i−1, so the
/// g_i lie in successive layers St(i−1) \ St(i).
inline ClassWitness infinite_classes_witness(const WordRewriter& rw, int k, int max_radius = 24) {
  const Group& g = rw.group();
  if (k < 1) throw std::invalid_argument("k must be positive");
  ClassWitness out;
  if (k == 1) {
    out.elements = {g.identity()};
    out.words = {""};
    return out;
  }
  out.depth = k;
  Ball b(g, rw);
  std::vector<std::optional<std::size_t>> found(k);
  int have = 0;
  std::size_t scanned = 0;
  for (;;) {
    for (; scanned < b.size(); ++scanned) {
      int lvl = g.stabilizer_level(b[scanned].element, k);
      if (lvl < k && !found[lvl]) {
        found[lvl] = scanned;
        ++have;
      }
    }
    if (have == k) break;
    if (b.radius() >= max_radius)
      throw BudgetExceeded("no element of every stabilizer layer within radius " +
                               std::to_string(max_radius), b.radius());
    b.extend_to(b.radius() + 1);
  }
  for (int i = 0; i < k; ++i) {
    out.elements.push_back(b[*found[i]].element);
    out.words.push_back(b[*found[i]].word);
  }
  return out;
}

}  // namespace griglab
