#pragma once

// Exact balls in the Cayley graph, the word-growth series, subgroup
// membership counters and the on-disk ball cache.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "group.hpp"
#include "parallel.hpp"
#include "words.hpp"

namespace griglab {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, int last_complete_radius)
      : std::runtime_error(what), last_complete_radius_(last_complete_radius) {}
  int last_complete_radius() const noexcept { return last_complete_radius_; }

 private:
  int last_complete_radius_;
};

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BallEntry {
  Element element;
  std::uint32_t length = 0;
  std::string word;  // one geodesic
};

struct BallOptions {
  unsigned threads = 1;
  std::size_t max_elements = 20'000'000;
};

/// Radius-n ball, entries in breadth-first order (so lengths are
/// nondecreasing and the first k_n entries form the radius-n sub-ball).
class Ball {
 public:
  Ball(const Group& g, const WordRewriter& rw) : group_(&g), alphabet_(rw.alphabet()) {
    entries_.push_back({g.identity(), 0, ""});
    index_.emplace(g.identity().id(), 0);
    boundaries_.push_back(1);
  }

  const Group& group() const noexcept { return *group_; }
  int radius() const noexcept { return static_cast<int>(boundaries_.size()) - 1; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<BallEntry>& entries() const noexcept { return entries_; }
  const BallEntry& operator[](std::size_t i) const { return entries_[i]; }

  /// Number of elements of length ≤ n.
  std::size_t count_within(int n) const {
    if (n < 0) return 0;
    if (n > radius()) throw std::out_of_range("radius " + std::to_string(n) + " beyond ball");
    return boundaries_[n];
  }

  std::optional<std::size_t> index_of(Element x) const {
    if (x.group() != group_) return std::nullopt;
    auto it = index_.find(x.id());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(Element x) const { return index_of(x).has_value(); }

  void extend_to(int n, const BallOptions& opt = {}) {
    while (radius() < n) grow_one(opt);
  }

  /// Every element of length < radius has all generator neighbours present.
  bool closed() const {
    std::size_t inner = radius() == 0 ? 0 : boundaries_[radius() - 1];
    for (std::size_t i = 0; i < inner; ++i)
      for (char c : alphabet_)
        if (!contains(group_->multiply(entries_[i].element, group_->generator(c)))) return false;
    return true;
  }

 private:
  friend Ball load_ball(const std::string&, const Group&, const WordRewriter&);

  void grow_one(const BallOptions& opt) {
    const std::size_t begin = radius() == 0 ? 0 : boundaries_[radius() - 1];
    const std::size_t end = entries_.size();
    const std::size_t L = alphabet_.size();
    std::vector<Element> products((end - begin) * L);
    std::vector<Element> gens;
    for (char c : alphabet_) gens.push_back(group_->generator(c));
    parallel_for(end - begin, opt.threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < L; ++j)
        products[i * L + j] = group_->multiply(entries_[begin + i].element, gens[j]);
    });
    const std::uint32_t len = static_cast<std::uint32_t>(radius() + 1);
    for (std::size_t i = 0; i < end - begin; ++i) {
      for (std::size_t j = 0; j < L; ++j) {
        Element y = products[i * L + j];
        if (index_.count(y.id())) continue;
        if (entries_.size() >= opt.max_elements)
          throw BudgetExceeded("ball exceeds " + std::to_string(opt.max_elements) + " elements",
                               radius());
        index_.emplace(y.id(), entries_.size());
        entries_.push_back({y, len, entries_[begin + i].word + alphabet_[j]});
      }
    }
    boundaries_.push_back(entries_.size());
  }

  const Group* group_;
  std::string alphabet_;
  std::vector<BallEntry> entries_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
  std::vector<std::size_t> boundaries_;
};

inline Ball ball(const Group& g, const WordRewriter& rw, int n, const BallOptions& opt = {}) {
  if (n < 0) throw std::invalid_argument("negative radius");
  Ball b(g, rw);
  b.extend_to(n, opt);
  return b;
}

struct GrowthRow {
  int n;
  std::uint64_t gamma;
  bool operator==(const GrowthRow&) const = default;
};

using GrowthTable = std::vector<GrowthRow>;

inline GrowthTable growth_from_ball(const Ball& b, int N) {
  GrowthTable t;
  for (int n = 0; n <= N; ++n) t.push_back({n, b.count_within(n)});
  return t;
}

/// Level used by the level-action dedup path for radius N: ⌈log₂N⌉ + 2.
inline int oracle_depth(int N) {
  int k = 0;
  while ((1 << k) < N) ++k;
  return k + 2;
}

/// Growth series computed from level-m leaf permutations alone; shares no
/// code with canonical interning.
inline GrowthTable level_action_growth(const Group& g, const WordRewriter& rw, int N, int depth) {
  std::vector<LeafPerm> gens;
  for (char c : rw.alphabet()) gens.push_back(g.level_action(g.generator(c), depth));
  struct VecHash {
    std::size_t operator()(const LeafPerm& p) const noexcept {
      std::uint64_t h = 0;
      for (auto v : p) h = detail::hash_combine(h, v);
      return h;
    }
  };
  std::unordered_set<LeafPerm, VecHash> seen;
  LeafPerm id(gens.empty() ? 1 : gens[0].size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<std::uint32_t>(i);
  std::vector<LeafPerm> frontier{id};
  seen.insert(id);
  GrowthTable t{{0, 1}};
  for (int n = 1; n <= N; ++n) {
    std::vector<LeafPerm> next;
    for (const auto& p : frontier)
      for (const auto& s : gens) {
        LeafPerm q = compose(p, s);
        if (seen.insert(q).second) next.push_back(std::move(q));
      }
    frontier = std::move(next);
    t.push_back({n, seen.size()});
  }
  return t;
}

/// γ(n) for n ≤ N, cross-checked against the level-action path. Throws if
/// the two dedup paths disagree.
inline GrowthTable growth_table(const Group& g, const WordRewriter& rw, int N,
                                const BallOptions& opt = {}) {
  Ball b = ball(g, rw, N, opt);
  GrowthTable canon = growth_from_ball(b, N);
  GrowthTable oracle = level_action_growth(g, rw, N, oracle_depth(N));
  for (int n = 0; n <= N; ++n)
    if (canon[n].gamma != oracle[n].gamma)
      throw std::logic_error("dedup paths disagree at n=" + std::to_string(n) + ": " +
                             std::to_string(canon[n].gamma) + " vs " +
                             std::to_string(oracle[n].gamma));
  return canon;
}

enum class MembershipFilter { St1, Derived, K };

/// Number of elements of length ≤ radius (default: whole ball) passing the
/// filter. The K filter needs a membership predicate from a stabilized
/// quotient model.
inline std::size_t membership_count(const Ball& b, MembershipFilter f, int radius = -1,
                                    const std::function<bool(Element)>& k_member = {}) {
  const Group& g = b.group();
  std::size_t n = radius < 0 ? b.size() : b.count_within(radius);
  if (f == MembershipFilter::K && !k_member)
    throw std::logic_error("K-filter unavailable: quotient model not stabilized");
  if (f == MembershipFilter::Derived) require_grigorchuk(g, "derived-subgroup filter");
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = b[i];
    bool pass = false;
    switch (f) {
      case MembershipFilter::St1: pass = !g.is_root_active(e.element); break;
      case MembershipFilter::Derived: pass = parity_vector(e.word) == 0; break;
      case MembershipFilter::K: pass = k_member(e.element); break;
    }
    count += pass;
  }
  return count;
}

inline std::uint32_t geodesic_length(Element x, const Ball& b) {
  auto i = b.index_of(x);
  if (!i) throw std::out_of_range("element outside the radius-" + std::to_string(b.radius()) + " ball");
  return b[*i].length;
}

/// Pairs of reduced words of length ≤ max_len that evaluate to the same
/// element but have different parity vectors (expected: none).
inline std::size_t parity_conflicts(const WordRewriter& rw, int max_len) {
  const Group& g = rw.group();
  std::unordered_map<std::uint32_t, std::uint8_t> parity;
  std::size_t conflicts = 0;
  for (int n = 0; n <= max_len; ++n) {
    ReducedWordStream s(rw, n);
    while (auto w = s.next()) {
      Element x = g.eval(*w);
      std::uint8_t p = parity_vector(*w);
      auto [it, fresh] = parity.try_emplace(x.id(), p);
      if (!fresh && it->second != p) ++conflicts;
    }
  }
  return conflicts;
}

// --- cache files ------------------------------------------------------------
//
// Layout: one JSON header line, then `count` records
//   u32 key_len, key bytes, u32 length, u32 word_len, word bytes
// (little-endian), then a u64 FNV-1a checksum of all record bytes.

inline constexpr int kBallCacheVersion = 1;

namespace detail {
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw CacheError("truncated ball cache");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 4;
  return v;
}
}  // namespace detail

inline void save_ball(const Ball& b, const std::string& path) {
  const Group& g = b.group();
  std::string body;
  for (const auto& e : b.entries()) {
    std::string key = g.canonical_key(e.element);
    detail::put_u32(body, static_cast<std::uint32_t>(key.size()));
    body += key;
    detail::put_u32(body, e.length);
    detail::put_u32(body, static_cast<std::uint32_t>(e.word.size()));
    body += e.word;
  }
  nlohmann::json header = {{"format", "ballv1"},
                           {"version", kBallCacheVersion},
                           {"preset", g.preset().name},
                           {"fingerprint", std::to_string(fingerprint(g.preset()))},
                           {"radius", b.radius()},
                           {"count", b.size()}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CacheError("cannot write " + path);
  out << header.dump() << '\n';
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  std::uint64_t sum = detail::fnv1a(body);
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((sum >> (8 * i)) & 0xFF));
  if (!out) throw CacheError("write failed for " + path);
}

inline Ball load_ball(const std::string& path, const Group& g, const WordRewriter& rw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw CacheError("missing header in " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw CacheError("corrupt header in " + path);
  }
  if (header.value("format", "") != "ballv1" || header.value("version", -1) != kBallCacheVersion)
    throw CacheError("unsupported cache version in " + path);
  if (header.value("preset", "") != g.preset().name ||
      header.value("fingerprint", "") != std::to_string(fingerprint(g.preset())))
    throw CacheError("cache " + path + " was written for a different preset");
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (rest.size() < 8) throw CacheError("truncated ball cache");
  std::string body = rest.substr(0, rest.size() - 8);
  std::uint64_t sum = 0;
  for (int i = 0; i < 8; ++i)
    sum |= std::uint64_t(static_cast<unsigned char>(rest[rest.size() - 8 + i])) << (8 * i);
  if (sum != detail::fnv1a(body)) throw CacheError("checksum mismatch (truncated or corrupt) in " + path);

  Ball b(g, rw);
  b.entries_.clear();
  b.index_.clear();
  b.boundaries_.clear();
  const std::size_t count = header.at("count").get<std::size_t>();
  const int radius = header.at("radius").get<int>();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t klen = detail::get_u32(body, pos);
    if (pos + klen > body.size()) throw CacheError("truncated ball cache");
    std::string key = body.substr(pos, klen);
    pos += klen;
    std::uint32_t len = detail::get_u32(body, pos);
    std::uint32_t wlen = detail::get_u32(body, pos);
    if (pos + wlen > body.size()) throw CacheError("truncated ball cache");
    std::string word = body.substr(pos, wlen);
    pos += wlen;
    Element x = g.eval(word);
    if (g.canonical_key(x) != key || word.size() != len)
      throw CacheError("record " + std::to_string(i) + " does not match its key");
    while (static_cast<int>(b.boundaries_.size()) < static_cast<int>(len))
      b.boundaries_.push_back(b.entries_.size());
    if (!b.entries_.empty() && len < b.entries_.back().length)
      throw CacheError("records out of breadth-first order");
    b.index_.emplace(x.id(), b.entries_.size());
    b.entries_.push_back({x, len, std::move(word)});
  }
  if (pos != body.size()) throw CacheError("trailing bytes in ball cache");
  while (static_cast<int>(b.boundaries_.size()) <= radius) b.boundaries_.push_back(b.entries_.size());
  if (b.radius() != radius || !b.closed()) throw CacheError("loaded ball fails the closure check");
  return b;
}

}  // namespace griglab
