#pragma once

// Branching structure of a (binary) regular branch group and the
// constructive lemmas built on it: lifts into K × 1, subword encoding on the
// right subtree, commutators in K and in Γ as products of conjugates.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enumeration.hpp"
#include "expression.hpp"
#include "group.hpp"
#include "quotient.hpp"
#include "words.hpp"

namespace griglab {

class LiftUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BranchingOptions {
  std::string k_word = "abab";  // K = normal closure of this word
  int max_level = 5;            // quotient levels tried for stabilization
  int lift_radius = 16;         // first ball radius scanned for lifts
  int max_lift_radius = 28;
  unsigned threads = 1;
};

struct LiftEntry {
  std::string target;  // u ∈ K
  std::string word;    // g with sections (u, 1)
};

/// K as the normal closure of a word, modelled in the quotient Γ/St(m*)
/// where the index first repeats at two consecutive levels; H₁ = ψ⁻¹(K × K)
/// modelled at level m*+1. Binary trees only.
class BranchingData {
 public:
  BranchingData(const WordRewriter& rw, BranchingOptions opt = {})
      : rw_(&rw), opt_(std::move(opt)) {
    const Group& g = rw.group();
    if (g.arity() != 2) throw std::invalid_argument("branching data implemented for binary trees only");
    k_elem_ = g.eval(opt_.k_word);
    std::uint64_t prev = 0;
    for (int m = 1; m <= opt_.max_level; ++m) {
      std::uint64_t idx = normal_closure_index(g, rw, opt_.k_word, m);
      index_by_level_.push_back(idx);
      if (idx == prev) {
        level_ = m - 1;
        break;
      }
      prev = idx;
    }
    if (level_ == 0)
      throw UnstabilizedError("normal closure of " + opt_.k_word + " did not stabilize up to level " +
                              std::to_string(opt_.max_level));
    qk_.emplace(g, rw, level_);
    k_in_ = qk_->normal_closure({qk_->index_of(g, k_elem_)});
    build_cosets(*qk_, k_in_, k_coset_, k_reps_);

    qh_.emplace(g, rw, level_ + 1);
    h_in_.assign(qh_->order(), false);
    for (std::size_t i = 0; i < qh_->order(); ++i) {
      Element x = g.eval(qh_->word(i));
      h_in_[i] = !g.is_root_active(x) && k_member(g.section(x, 0)) && k_member(g.section(x, 1));
    }
    build_cosets(*qh_, h_in_, h_coset_, h_reps_);

    find_rooted();
    build_lifts();
  }

  const Group& group() const noexcept { return rw_->group(); }
  const WordRewriter& rewriter() const noexcept { return *rw_; }
  const std::string& k_word() const noexcept { return opt_.k_word; }

  /// Level m* at which the K-image is modelled (index equal at m*, m*+1).
  int quotient_level() const noexcept { return level_; }
  const std::vector<std::uint64_t>& index_by_level() const noexcept { return index_by_level_; }
  std::uint64_t k_index() const noexcept { return k_reps_.size(); }
  std::uint64_t h1_index() const noexcept { return h_reps_.size(); }

  bool k_member(Element x) const { return k_in_[qk_->index_of(group(), x)]; }
  bool h1_member(Element x) const { return h_in_[qh_->index_of(group(), x)]; }

  /// Shortest representatives of the cosets of K (resp. H₁).
  const std::vector<std::string>& k_transversal() const noexcept { return k_reps_; }
  const std::vector<std::string>& h1_transversal() const noexcept { return h_reps_; }

  std::size_t k_coset(Element x) const { return k_coset_[qk_->index_of(group(), x)]; }
  std::size_t h1_coset(Element x) const { return h_coset_[qh_->index_of(group(), x)]; }

  /// Maximal length of a minimal coset representative of H₁.
  int coset_length_M() const {
    std::size_t m = 0;
    for (const auto& r : h_reps_) m = std::max(m, r.size());
    return static_cast<int>(m);
  }

  /// Shortest element acting only at the root (swapping the two subtrees).
  const std::string& rooted_word() const noexcept { return rooted_; }

  const std::vector<LiftEntry>& lift_table() const noexcept { return lift_table_; }
  int lift_radius_used() const noexcept { return lift_radius_used_; }

  /// Longest lift among the Schreier generators of K.
  int max_lift_length() const {
    std::size_t m = 0;
    for (const auto& e : lift_table_) m = std::max(m, e.word.size());
    return static_cast<int>(m);
  }

  /// Word g with sections (u, 1) (coordinate 0) or (1, u) (coordinate 1),
  /// verified. Throws LiftUnavailable when u ∉ K.
  std::string lift(std::string_view u, int coordinate = 0) const {
    const Group& g = group();
    std::string uw = rw_->reduce(u);
    Element ue = g.eval(uw);
    if (!k_member(ue)) throw LiftUnavailable("'" + uw + "' is not in K; no lift available");
    std::string w;
    if (auto it = direct_.find(ue.id()); it != direct_.end()) {
      w = it->second;
    } else {
      // Reidemeister-Schreier rewriting through the K coset table.
      std::size_t coset = 0;
      std::string prefix;
      for (char y : uw) {
        prefix += y;
        std::size_t next = k_coset(g.eval(prefix));
        auto it2 = schreier_.find({coset, y});
        if (it2 == schreier_.end()) throw std::logic_error("missing Schreier generator");
        w += it2->second;
        coset = next;
      }
      w = rw_->reduce(w);
    }
    if (coordinate == 1) w = rw_->reduce(inverse_word(g, rooted_) + w + rooted_);
    Element x = g.eval(w);
    Element want0 = coordinate == 0 ? ue : g.identity();
    Element want1 = coordinate == 0 ? g.identity() : ue;
    if (g.is_root_active(x) || g.section(x, 0) != want0 || g.section(x, 1) != want1)
      throw std::logic_error("lift failed verification");
    return w;
  }

 private:
  static void build_cosets(const LevelQuotient& q, const std::vector<bool>& in,
                           std::vector<std::size_t>& coset, std::vector<std::string>& reps) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < q.order(); ++i)
      if (in[i]) members.push_back(i);
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    coset.assign(q.order(), kUnset);
    for (std::size_t i = 0; i < q.order(); ++i) {
      if (coset[i] != kUnset) continue;
      std::size_t c = reps.size();
      reps.push_back(q.word(i));
      for (std::size_t k : members) coset[q.multiply(i, k)] = c;
    }
  }

  void find_rooted() {
    const Group& g = group();
    Ball b = ball(g, *rw_, 4);
    for (const auto& e : b.entries()) {
      if (g.is_root_active(e.element) && g.is_identity(g.section(e.element, 0)) &&
          g.is_identity(g.section(e.element, 1))) {
        rooted_ = e.word;
        return;
      }
    }
    throw std::invalid_argument("no rooted element of length ≤ 4");
  }

  void build_lifts() {
    const Group& g = group();
    // Schreier generators t_c · y · t_{c'}⁻¹ of K.
    std::map<std::string, std::string> wanted;  // reduced generator word → lift
    for (std::size_t c = 0; c < k_reps_.size(); ++c) {
      for (char y : rw_->alphabet()) {
        std::string ty = k_reps_[c] + y;
        std::size_t next = k_coset(g.eval(ty));
        std::string s = rw_->reduce(ty + inverse_word(g, k_reps_[next]));
        schreier_words_[{c, y}] = s;
        if (!s.empty()) wanted.emplace(s, "");
      }
    }
    Ball b(g, *rw_);
    int radius = opt_.lift_radius;
    std::size_t scanned = 0;
    for (;;) {
      b.extend_to(radius, {opt_.threads});
      for (; scanned < b.size(); ++scanned) {
        const auto& e = b[scanned];
        if (g.is_root_active(e.element) || !g.is_identity(g.section(e.element, 1))) continue;
        direct_.try_emplace(g.section(e.element, 0).id(), e.word);
      }
      bool all = true;
      for (auto& [s, lw] : wanted) {
        auto it = direct_.find(g.eval(s).id());
        if (it == direct_.end())
          all = false;
        else
          lw = it->second;
      }
      if (all) break;
      if (radius >= opt_.max_lift_radius)
        throw LiftUnavailable("Schreier generators of K not all lifted within radius " +
                              std::to_string(radius));
      radius = std::min(opt_.max_lift_radius, radius + 4);
    }
    lift_radius_used_ = radius;
    for (const auto& [s, lw] : wanted) lift_table_.push_back({s, lw});
    for (const auto& [key, s] : schreier_words_) schreier_[key] = s.empty() ? "" : wanted.at(s);
  }

  const WordRewriter* rw_;
  BranchingOptions opt_;
  Element k_elem_;
  int level_ = 0;
  std::vector<std::uint64_t> index_by_level_;
  std::optional<LevelQuotient> qk_, qh_;
  std::vector<bool> k_in_, h_in_;
  std::vector<std::size_t> k_coset_, h_coset_;
  std::vector<std::string> k_reps_, h_reps_;
  std::string rooted_;
  std::map<std::pair<std::size_t, char>, std::string> schreier_words_, schreier_;
  std::unordered_map<std::uint32_t, std::string> direct_;  // section-0 id → shortest lift
  std::vector<LiftEntry> lift_table_;
  int lift_radius_used_ = 0;
};

// --- subword encoding (Grigorchuk) -----------------------------------------

struct RightEncoding {
  std::string word;
  std::string left;   // left section, shortest word in ⟨a, d⟩
  std::string right;  // right section (reduced)
};

namespace detail {
// Shortest alternating a/d word for an element of the dihedral group ⟨a,d⟩.
inline std::string dihedral_short(const Group& g, Element x) {
  for (int len = 0; len <= 4; ++len)
    for (char first : {'a', 'd'}) {
      std::string w;
      for (int i = 0; i < len; ++i) w += (i % 2 == 0) ? first : (first == 'a' ? 'd' : 'a');
      if (g.eval(w) == x) return w;
    }
  throw std::logic_error("left section outside <a,d>");
}
}  // namespace detail

/// w ∈ St(1) with right section w₁, built right to left: a target 'a' is
/// produced by c at odd a-parity (c = (a,d)), targets b, c, d by d, b, c at
/// even parity; an 'a' is inserted whenever the parity must flip, and one
/// more at the front if needed. |w| ≤ 2|w₁| + 1.
inline RightEncoding encode_right(const WordRewriter& rw, std::string_view w1) {
  const Group& g = rw.group();
  require_grigorchuk(g, "encode_right");
  std::string target = rw.reduce(w1);
  std::string rev;  // w reversed
  bool odd = false;
  for (auto it = target.rbegin(); it != target.rend(); ++it) {
    char t = *it;
    bool need_odd = t == 'a';
    if (odd != need_odd) {
      rev += 'a';
      odd = !odd;
    }
    switch (t) {
      case 'a': rev += 'c'; break;
      case 'b': rev += 'd'; break;
      case 'c': rev += 'b'; break;
      case 'd': rev += 'c'; break;
      default: throw WordError(std::string("unexpected letter '") + t + "'");
    }
  }
  if (odd) rev += 'a';
  RightEncoding out;
  out.word.assign(rev.rbegin(), rev.rend());
  Element x = g.eval(out.word);
  if (g.is_root_active(x) || g.section(x, 1) != g.eval(target))
    throw std::logic_error("encode_right failed verification");
  out.right = target;
  out.left = detail::dihedral_short(g, g.section(x, 0));
  return out;
}

enum class EncodeStatus { Achieved, Unreachable, Inconclusive };

inline const char* to_string(EncodeStatus s) {
  switch (s) {
    case EncodeStatus::Achieved: return "achieved";
    case EncodeStatus::Unreachable: return "unreachable-within-bound";
    case EncodeStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct PairEncodeResult {
  EncodeStatus status = EncodeStatus::Inconclusive;
  std::string word;
  std::string left, right;  // achieved sections, as words
  int bound = 0;
};

/// Index of ψ(St(1) ∩ B(R)): section pair → first (shortest) ball entry.
class SectionImageIndex {
 public:
  SectionImageIndex(const WordRewriter& rw, int radius, unsigned threads = 1)
      : ball_(griglab::ball(rw.group(), rw, radius, {threads})) {
    const Group& g = rw.group();
    for (std::size_t i = 0; i < ball_.size(); ++i) {
      Element x = ball_[i].element;
      if (g.is_root_active(x)) continue;
      index_.try_emplace({g.section(x, 0).id(), g.section(x, 1).id()}, i);
    }
  }

  int radius() const noexcept { return ball_.radius(); }
  const Ball& ball() const noexcept { return ball_; }

  /// Shortest St(1) element with the given sections, if within the radius.
  std::optional<std::size_t> find(Element s0, Element s1) const {
    auto it = index_.find({s0.id(), s1.id()});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  Ball ball_;
  std::unordered_map<std::pair<std::uint32_t, std::uint32_t>, std::size_t, detail::PairHash> index_;
};

inline constexpr int kEncodeMaxRadius = 24;

/// Shortest St(1) word with sections exactly (w₀, w₁), searched
/// exhaustively up to length 2(|w₀| + |w₁|).
inline PairEncodeResult encode_pair(const WordRewriter& rw, std::string_view w0, std::string_view w1,
                                    const SectionImageIndex* index = nullptr) {
  const Group& g = rw.group();
  require_grigorchuk(g, "encode_pair");
  PairEncodeResult r;
  std::string a = rw.reduce(w0), b = rw.reduce(w1);
  r.bound = 2 * static_cast<int>(a.size() + b.size());
  std::optional<SectionImageIndex> local;
  if (!index || index->radius() < r.bound) {
    if (r.bound > kEncodeMaxRadius) return r;  // inconclusive
    local.emplace(rw, r.bound);
    index = &*local;
  }
  auto hit = index->find(g.eval(a), g.eval(b));
  if (!hit || index->ball()[*hit].length > static_cast<std::uint32_t>(r.bound)) {
    r.status = EncodeStatus::Unreachable;
    return r;
  }
  r.status = EncodeStatus::Achieved;
  r.word = index->ball()[*hit].word;
  auto s = word_sections(rw, r.word);
  r.left = s[0];
  r.right = s[1];
  return r;
}

struct CoverageReport {
  int n = 0;
  std::size_t pairs = 0, reachable = 0, unreachable = 0, unknown = 0;
  std::vector<std::pair<std::string, std::string>> unreachable_pairs;
  std::vector<std::tuple<std::string, std::string, std::string>> samples;  // (w0, w1, word)
};

/// For every pair of targets in B(⌊n/2⌋) × B(⌊n/2⌋) (geodesic words),
/// whether ψ(St(1) ∩ B(2(|w₀|+|w₁|))) contains it.
inline CoverageReport image_coverage_report(const WordRewriter& rw, int n, unsigned threads = 1) {
  const Group& g = rw.group();
  require_grigorchuk(g, "image_coverage_report");
  CoverageReport rep;
  rep.n = n;
  Ball targets = ball(g, rw, n / 2, {threads});
  SectionImageIndex index(rw, 2 * n, threads);
  for (const auto& u : targets.entries())
    for (const auto& v : targets.entries()) {
      ++rep.pairs;
      std::uint32_t bound = 2 * (u.length + v.length);
      auto hit = index.find(u.element, v.element);
      if (hit && index.ball()[*hit].length <= bound) {
        ++rep.reachable;
        if (rep.samples.size() < 16) rep.samples.emplace_back(u.word, v.word, index.ball()[*hit].word);
      } else {
        ++rep.unreachable;
        rep.unreachable_pairs.emplace_back(u.word, v.word);
      }
    }
  return rep;
}

// --- commutators as products of conjugates ----------------------------------

/// [κ₁, κ₂] on the left subtree as x·x^κ·x^{κλ}·x^λ with x the rooted
/// element, κ = lift(κ₁⁻¹), λ = lift(κ₂). Verified before returning.
inline Expression comm_k_product(const BranchingData& bd, std::string_view k1, std::string_view k2) {
  const Group& g = bd.group();
  const WordRewriter& rw = bd.rewriter();
  std::string kappa = bd.lift(inverse_word(g, k1));
  std::string lambda = bd.lift(k2);
  const std::string& x = bd.rooted_word();
  Expression e;
  e.kind = ExprKind::Conjugates;
  e.factors = {{x, ""}, {x, kappa}, {x, rw.reduce(kappa + lambda)}, {x, lambda}};
  Element v = e.evaluate(g);
  if (g.is_root_active(v) || g.section(v, 0) != g.commutator(g.eval(k1), g.eval(k2)) ||
      !g.is_identity(g.section(v, 1)))
    throw std::logic_error("comm_k_product failed verification");
  return e;
}

struct CommGResult {
  Expression expr;
  std::string sigma, tau;  // coset representatives
  std::string kappa, lambda;
  std::size_t budget = 0;  // 4·max(|σ|,|τ|) + 2·S with S = 4
};

/// [γ, ξ] = [σ,ξ]^κ · [κ,λ] · [κ,τ]^λ for γ = σκ, ξ = τλ with κ, λ ∈ H₁;
/// [x₁⋯xₙ, ρ] = ∏ [xᵢ,ρ]^{xᵢ₊₁⋯xₙ}, [κ, y₁⋯yₙ] = ∏_{j=n..1} [κ,y_j]^{y_{j+1}⋯yₙ},
/// [x, ρ] = x⁻¹·x^ρ, [κ, y] = (y⁻¹)^κ·y, and [κ,λ] = ([κ₀,λ₀],1)·([κ₁,λ₁],1)^x.
inline CommGResult comm_g_decompose(const BranchingData& bd, std::string_view gamma, std::string_view xi) {
  const Group& g = bd.group();
  const WordRewriter& rw = bd.rewriter();
  CommGResult r;
  r.expr.kind = ExprKind::Conjugates;
  std::string gw = rw.reduce(gamma), xw = rw.reduce(xi);
  Element ge = g.eval(gw), xe = g.eval(xw);
  Element target = g.commutator(ge, xe);
  if (g.is_identity(target)) return r;

  r.sigma = bd.h1_transversal()[bd.h1_coset(ge)];
  r.tau = bd.h1_transversal()[bd.h1_coset(xe)];
  r.kappa = rw.reduce(inverse_word(g, r.sigma) + gw);
  r.lambda = rw.reduce(inverse_word(g, r.tau) + xw);
  if (!bd.h1_member(g.eval(r.kappa)) || !bd.h1_member(g.eval(r.lambda)))
    throw std::logic_error("coset split left H1");
  auto inv = [&](char c) { return inverse_word(g, std::string(1, c)); };

  auto& F = r.expr.factors;
  // [σ, ξ]^κ
  for (std::size_t i = 0; i < r.sigma.size(); ++i) {
    std::string c = rw.reduce(r.sigma.substr(i + 1) + r.kappa);
    F.push_back({inv(r.sigma[i]), c});
    F.push_back({std::string(1, r.sigma[i]), rw.reduce(xw + c)});
  }
  // [κ, λ]
  auto ks = word_sections(rw, r.kappa), ls = word_sections(rw, r.lambda);
  r.expr.append(comm_k_product(bd, ks[0], ls[0]));
  r.expr.append(conjugated(rw, comm_k_product(bd, ks[1], ls[1]), bd.rooted_word()));
  // [κ, τ]^λ
  for (std::size_t j = r.tau.size(); j-- > 0;) {
    std::string c = rw.reduce(r.tau.substr(j + 1) + r.lambda);
    F.push_back({inv(r.tau[j]), rw.reduce(r.kappa + c)});
    F.push_back({std::string(1, r.tau[j]), c});
  }
  r.budget = 4 * std::max(r.sigma.size(), r.tau.size()) + 8;
  if (r.expr.evaluate(g) != target) throw std::logic_error("comm_g_decompose failed verification");
  return r;
}

}  // namespace griglab
