#pragma once

// Exact arithmetic of finite-state tree automorphisms.
//
// Every element is stored once, as a hash-consed node: a root permutation
// plus one child id per first-level vertex. A distinguished set of "leaf"
// elements is closed under taking sections; it starts as the automaton
// states of the preset (identity, generators, generator inverses) and grows
// only when a product or inverse of leaves produces a cycle of new states.
// With leaves minimized against each other, equal elements always receive
// equal ids, so the word problem reduces to an integer comparison. For a
// contracting group the leaf set stops growing once it contains the nucleus.
//
// Composition: g acts by g(x·w) = π_g(x)·g_x(w) and the product xy applies y
// first, so π_{xy} = π_x∘π_y and (xy)_v = x_{π_y(v)}·y_v.

#include <array>
#include <atomic>
#include <cassert>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "detail/hash.hpp"
#include "perm.hpp"
#include "preset.hpp"

namespace griglab {

/// Raised when the identity problem cannot be decided within the configured
/// guards, which only happens for presets that are not contracting.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GroupOptions {
  std::uint32_t depth_guard = 64;
  std::uint32_t leaf_limit = 4096;
};

class Group;

/// A group element: a handle to a canonical node in its Group.
class Element {
 public:
  Element() = default;

  const Group* group() const noexcept { return group_; }
  std::uint32_t id() const noexcept { return id_; }
  bool valid() const noexcept { return group_ != nullptr; }

  friend bool operator==(Element, Element) = default;

 private:
  friend class Group;
  Element(const Group* g, std::uint32_t id) : group_(g), id_(id) {}

  const Group* group_ = nullptr;
  std::uint32_t id_ = 0;
};

struct ElementHash {
  std::size_t operator()(Element e) const noexcept { return detail::splitmix64(e.id()); }
};

/// Result of a product computed without inserting anything new: either the
/// id of an already-interned element, or only the structural hash of an
/// element that has never been materialized.
struct Probe {
  std::uint64_t hash = 0;
  std::uint32_t id = 0;
  bool interned = false;
};

class Group {
 public:
  using Kids = std::array<std::uint32_t, kMaxArity>;
  static constexpr std::uint32_t kIdentity = 0;

  explicit Group(GroupPreset preset, GroupOptions options = {})
      : preset_(std::move(preset)), options_(options), d_(preset_.arity) {
    validate(preset_);
    chunks_ = std::make_unique<std::atomic<Node*>[]>(kMaxChunks);
    for (std::uint32_t i = 0; i < kMaxChunks; ++i) chunks_[i].store(nullptr);
    for (auto& m : pair_memo_) m.store(kNone, std::memory_order_relaxed);
    build_initial_leaves();
    verify_relations();
  }

  Group(const Group&) = delete;
  Group& operator=(const Group&) = delete;

  ~Group() {
    for (std::uint32_t i = 0; i < kMaxChunks; ++i) delete[] chunks_[i].load();
  }

  const GroupPreset& preset() const noexcept { return preset_; }
  int arity() const noexcept { return d_; }
  const GroupOptions& options() const noexcept { return options_; }

  Element identity() const { return wrap(kIdentity); }

  Element generator(char label) const {
    auto it = letters_.find(label);
    if (it == letters_.end())
      throw GroupError(std::string("unknown letter '") + label + "' for preset " + preset_.name);
    return wrap(it->second);
  }

  bool has_letter(char c) const { return letters_.count(c) != 0; }

  /// Generator letters in declaration order.
  std::string alphabet() const {
    std::string s;
    for (const auto& g : preset_.generators) s += g.label;
    return s;
  }

  bool is_involution(char label) const {
    return generator(label) == generator(upper(label));
  }

  /// Evaluates a word; upper-case letters denote inverses.
  Element eval(std::string_view word) const {
    std::uint32_t acc = kIdentity;
    for (char c : word) acc = mul(acc, generator(c).id_);
    return wrap(acc);
  }

  Element multiply(Element x, Element y) const {
    check(x);
    check(y);
    return wrap(mul(x.id_, y.id_));
  }

  Element invert(Element x) const {
    check(x);
    return wrap(inv(x.id_));
  }

  /// x^t = t⁻¹·x·t.
  Element conjugate(Element x, Element t) const {
    check(x);
    check(t);
    return wrap(mul(mul(inv(t.id_), x.id_), t.id_));
  }

  /// [x,y] = x⁻¹·y⁻¹·x·y.
  Element commutator(Element x, Element y) const {
    check(x);
    check(y);
    return wrap(mul(mul(inv(x.id_), inv(y.id_)), mul(x.id_, y.id_)));
  }

  bool is_identity(Element x) const {
    check(x);
    return x.id_ == kIdentity;
  }

  bool equals(Element x, Element y) const {
    check(x);
    check(y);
    return x.id_ == y.id_;
  }

  Perm root_perm(Element x) const {
    check(x);
    return node(x.id_).perm;
  }

  bool is_root_active(Element x) const { return !root_perm(x).is_identity(d_); }

  Element section(Element x, int vertex) const {
    check(x);
    if (vertex < 0 || vertex >= d_)
      throw GroupError("vertex " + std::to_string(vertex) + " out of range for arity " +
                       std::to_string(d_));
    return wrap(node(x.id_).kids[vertex]);
  }

  /// Iterated section along a path written as digits, e.g. "01".
  Element section(Element x, std::string_view path) const {
    for (char c : path) {
      int v = c - '0';
      if (c < '0' || v >= d_)
        throw GroupError(std::string("path symbol '") + c + "' invalid for arity " +
                         std::to_string(d_));
      x = section(x, v);
    }
    return x;
  }

  /// Action on the d^m vertices of level m (vertex x_1…x_m has index
  /// Σ x_i d^{m-i}).
  LeafPerm level_action(Element x, int m) const {
    check(x);
    if (m < 0) throw GroupError("negative level");
    std::unordered_map<std::uint64_t, LeafPerm> memo;
    return act(x.id_, m, memo);
  }

  /// True iff x fixes every vertex of level m.
  bool in_level_stabilizer(Element x, int m) const {
    check(x);
    std::unordered_map<std::uint64_t, bool> memo;
    return stabilizes(x.id_, m, memo);
  }

  /// Largest m ≤ limit with x ∈ St(m).
  int stabilizer_level(Element x, int limit) const {
    int m = 0;
    while (m < limit && in_level_stabilizer(x, m + 1)) ++m;
    return m;
  }

  /// Injective byte encoding of an element: a one-byte code for preset
  /// automaton states, otherwise the breadth-first serialization of the
  /// finite state graph reachable from x.
  std::string canonical_key(Element x) const {
    check(x);
    return key_of(x.id_);
  }

  /// Structural hash, stable across runs and thread schedules.
  std::uint64_t structural_hash(Element x) const {
    check(x);
    return node(x.id_).hash;
  }

  /// Depth-m portrait: "[perm|child,child,…]" down to preset states, which
  /// print as their label ("1" for identity); "?" marks a truncated vertex.
  std::string portrait(Element x, int m) const {
    check(x);
    std::string out;
    write_portrait(x.id_, m, out);
    return out;
  }

  /// Probe-only product: never interns new nodes (leaf products excepted).
  Probe probe_product(Element x, Element y) const {
    check(x);
    check(y);
    return probe_mul(x.id_, y.id_);
  }

  std::optional<Element> find_product(Element x, Element y) const {
    Probe p = probe_product(x, y);
    if (!p.interned) return std::nullopt;
    return wrap(p.id);
  }

  /// Number of interned elements.
  std::size_t interned_count() const noexcept { return size_.load(); }

  std::size_t leaf_count() const {
    std::lock_guard lock(resolver_mutex_);
    return leaves_.size();
  }

  bool is_leaf(Element x) const { return node(x.id_).leaf.load(std::memory_order_relaxed) != 0; }

  /// Label of a preset automaton state, or empty for any other element.
  std::string state_label(Element x) const {
    check(x);
    if (x.id_ < initial_labels_.size()) return initial_labels_[x.id_];
    return {};
  }

 private:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
  static constexpr std::uint32_t kChunkBits = 14;
  static constexpr std::uint32_t kChunkSize = 1u << kChunkBits;
  static constexpr std::uint32_t kMaxChunks = 1u << 16;
  static constexpr std::uint32_t kDenseLeaves = 64;
  static constexpr std::size_t kShards = 64;

  struct Node {
    Perm perm;
    std::uint64_t hash = 0;
    std::uint32_t height = 0;
    std::atomic<std::uint8_t> leaf{0};
    std::atomic<std::uint32_t> inverse{kNone};
    Kids kids{};
  };

  struct NodeKey {
    std::uint64_t perm;
    std::uint64_t hash;
    Kids kids;
    bool operator==(const NodeKey& o) const { return perm == o.perm && kids == o.kids; }
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept { return k.hash; }
  };
  struct Shard {
    std::mutex mutex;
    std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> map;
  };

  static char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

  Element wrap(std::uint32_t id) const { return Element(this, id); }

  void check(Element x) const {
    if (x.group_ != this) throw GroupError("element belongs to a different group preset");
  }

  Node& node(std::uint32_t id) const {
    return chunks_[id >> kChunkBits].load(std::memory_order_acquire)[id & (kChunkSize - 1)];
  }

  std::uint32_t allocate() const {
    std::uint32_t id = size_.fetch_add(1);
    std::uint32_t c = id >> kChunkBits;
    if (c >= kMaxChunks) throw std::length_error("element store exhausted");
    if (!chunks_[c].load(std::memory_order_acquire)) {
      std::lock_guard lock(grow_mutex_);
      if (!chunks_[c].load(std::memory_order_relaxed)) chunks_[c].store(new Node[kChunkSize]);
    }
    return id;
  }

  std::uint64_t node_hash(Perm p, const Kids& kids) const {
    std::uint64_t h = detail::hash_combine(0x6e6f6465ULL, p.bits);
    for (int i = 0; i < d_; ++i) h = detail::hash_combine(h, node(kids[i]).hash);
    return h;
  }

  std::uint32_t height_of(std::uint32_t id) const {
    const Node& n = node(id);
    return n.leaf.load(std::memory_order_relaxed) ? 0 : n.height;
  }

  std::optional<std::uint32_t> lookup(Perm p, const Kids& kids, std::uint64_t h) const {
    NodeKey key{p.bits, h, kids};
    Shard& s = shards_[h % kShards];
    std::lock_guard lock(s.mutex);
    auto it = s.map.find(key);
    if (it == s.map.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t make_node(Perm p, const Kids& kids) const {
    std::uint64_t h = node_hash(p, kids);
    NodeKey key{p.bits, h, kids};
    Shard& s = shards_[h % kShards];
    std::lock_guard lock(s.mutex);
    if (auto it = s.map.find(key); it != s.map.end()) return it->second;
    std::uint32_t height = 0;
    for (int i = 0; i < d_; ++i) height = std::max(height, height_of(kids[i]));
    ++height;
    if (height > options_.depth_guard)
      throw UndecidedError("section depth exceeded guard " + std::to_string(options_.depth_guard) +
                           "; preset '" + preset_.name + "' may not be contracting");
    std::uint32_t id = allocate();
    Node& n = node(id);
    n.perm = p;
    n.hash = h;
    n.height = height;
    n.kids = kids;
    s.map.emplace(key, id);
    return id;
  }

  std::uint32_t mul(std::uint32_t x, std::uint32_t y) const {
    if (x == kIdentity) return y;
    if (y == kIdentity) return x;
    const Node& nx = node(x);
    const Node& ny = node(y);
    if (nx.leaf.load(std::memory_order_relaxed) && ny.leaf.load(std::memory_order_relaxed))
      return leaf_product(x, y);
    Perm p = compose(nx.perm, ny.perm, d_);
    Kids kids{};
    for (int i = 0; i < d_; ++i) kids[i] = mul(nx.kids[ny.perm(i)], ny.kids[i]);
    return make_node(p, kids);
  }

  Probe probe_mul(std::uint32_t x, std::uint32_t y) const {
    if (x == kIdentity) return {node(y).hash, y, true};
    if (y == kIdentity) return {node(x).hash, x, true};
    const Node& nx = node(x);
    const Node& ny = node(y);
    if (nx.leaf.load(std::memory_order_relaxed) && ny.leaf.load(std::memory_order_relaxed)) {
      std::uint32_t id = leaf_product(x, y);
      return {node(id).hash, id, true};
    }
    Perm p = compose(nx.perm, ny.perm, d_);
    Kids kids{};
    std::uint64_t h = detail::hash_combine(0x6e6f6465ULL, p.bits);
    bool all = true;
    for (int i = 0; i < d_; ++i) {
      Probe k = probe_mul(nx.kids[ny.perm(i)], ny.kids[i]);
      h = detail::hash_combine(h, k.hash);
      all = all && k.interned;
      kids[i] = k.id;
    }
    if (all) {
      if (auto id = lookup(p, kids, h)) return {node(*id).hash, *id, true};
    }
    return {h, 0, false};
  }

  std::uint32_t inv(std::uint32_t x) const {
    if (x == kIdentity) return x;
    Node& n = node(x);
    std::uint32_t cached = n.inverse.load(std::memory_order_acquire);
    if (cached != kNone) return cached;
    std::uint32_t r;
    if (n.leaf.load(std::memory_order_relaxed)) {
      r = leaf_inverse(x);
    } else {
      Perm pi = inverse(n.perm, d_);
      Kids kids{};
      for (int y = 0; y < d_; ++y) kids[y] = inv(n.kids[pi(y)]);
      r = make_node(pi, kids);
    }
    n.inverse.store(r, std::memory_order_release);
    return r;
  }

  // --- leaf operations --------------------------------------------------

  // A virtual state of the product/inverse automaton over leaves.
  struct VState {
    std::uint8_t op;  // 0: u·v, 1: u⁻¹
    std::uint32_t u;
    std::uint32_t v;
    bool operator==(const VState&) const = default;
  };
  struct VStateHash {
    std::size_t operator()(const VState& s) const noexcept {
      return detail::hash_combine(detail::hash_combine(s.op, s.u), s.v);
    }
  };

  std::uint32_t leaf_product(std::uint32_t x, std::uint32_t y) const {
    if (x < kDenseLeaves && y < kDenseLeaves) {
      std::uint32_t m = pair_memo_[x * kDenseLeaves + y].load(std::memory_order_acquire);
      if (m != kNone) return m;
    }
    return resolve(VState{0, x, y});
  }

  std::uint32_t leaf_inverse(std::uint32_t x) const { return resolve(VState{1, x, 0}); }

  // Resolves a product or inverse of leaves by exploring the finite
  // automaton of virtual states it generates and minimizing that automaton
  // together with the current leaf set.
  std::uint32_t resolve(VState start) const {
    std::lock_guard lock(resolver_mutex_);
    if (start.op == 0) {
      if (auto it = sparse_memo_.find({start.u, start.v}); it != sparse_memo_.end())
        return it->second;
    } else {
      std::uint32_t c = node(start.u).inverse.load(std::memory_order_acquire);
      if (c != kNone) return c;
    }

    std::vector<VState> states{start};
    std::unordered_map<VState, std::uint32_t, VStateHash> index{{start, 0}};
    std::vector<Perm> perms;
    std::vector<Kids> kid_states;
    for (std::size_t i = 0; i < states.size(); ++i) {
      VState s = states[i];
      const Node& nu = node(s.u);
      Perm p;
      Kids kids{};
      for (int k = 0; k < d_; ++k) {
        VState c;
        if (s.op == 0) {
          const Node& nv = node(s.v);
          p = compose(nu.perm, nv.perm, d_);
          c = VState{0, nu.kids[nv.perm(k)], nv.kids[k]};
        } else {
          p = inverse(nu.perm, d_);
          c = VState{1, nu.kids[p(k)], 0};
        }
        auto [it, fresh] = index.try_emplace(c, static_cast<std::uint32_t>(states.size()));
        if (fresh) states.push_back(c);
        kids[k] = it->second;
      }
      perms.push_back(p);
      kid_states.push_back(kids);
    }

    // Joint Moore refinement over existing leaves [0, E) and states [E, E+S).
    const std::size_t E = leaves_.size();
    const std::size_t S = states.size();
    std::unordered_map<std::uint32_t, std::uint32_t> leaf_index;
    for (std::size_t i = 0; i < E; ++i) leaf_index[leaves_[i]] = static_cast<std::uint32_t>(i);
    std::vector<Perm> all_perm(E + S);
    std::vector<Kids> all_kids(E + S);
    for (std::size_t i = 0; i < E; ++i) {
      const Node& n = node(leaves_[i]);
      all_perm[i] = n.perm;
      for (int k = 0; k < d_; ++k) all_kids[i][k] = leaf_index.at(n.kids[k]);
    }
    for (std::size_t i = 0; i < S; ++i) {
      all_perm[E + i] = perms[i];
      for (int k = 0; k < d_; ++k) all_kids[E + i][k] = static_cast<std::uint32_t>(E + kid_states[i][k]);
    }
    std::vector<std::uint32_t> cls = moore_classes(all_perm, all_kids);

    std::vector<std::uint32_t> class_leaf(E + S, kNone);
    for (std::size_t i = 0; i < E; ++i) class_leaf[cls[i]] = leaves_[i];

    std::vector<std::uint32_t> result(S, kNone);
    // Unresolved classes: representative state and kid classes.
    std::unordered_map<std::uint32_t, std::uint32_t> rep;
    for (std::size_t i = 0; i < S; ++i) {
      std::uint32_t c = cls[E + i];
      if (class_leaf[c] != kNone)
        result[i] = class_leaf[c];
      else
        rep.try_emplace(c, static_cast<std::uint32_t>(i));
    }
    if (!rep.empty()) {
      // A class is finite when every unresolved descendant chain ends.
      std::unordered_map<std::uint32_t, bool> finite;
      for (auto& [c, r] : rep) finite[c] = false;
      for (bool changed = true; changed;) {
        changed = false;
        for (auto& [c, r] : rep) {
          if (finite[c]) continue;
          bool ok = true;
          for (int k = 0; k < d_; ++k) {
            std::uint32_t kc = cls[all_kids[E + r][k]];
            if (class_leaf[kc] == kNone && !finite[kc]) ok = false;
          }
          if (ok) finite[c] = changed = true;
        }
      }
      std::unordered_map<std::uint32_t, std::uint32_t> class_id;
      auto id_of_class = [&](std::uint32_t c) {
        return class_leaf[c] != kNone ? class_leaf[c] : class_id.at(c);
      };
      // Finite classes become ordinary nodes, built bottom-up.
      for (bool progress = true; progress;) {
        progress = false;
        for (auto& [c, r] : rep) {
          if (!finite[c] || class_id.count(c)) continue;
          bool ready = true;
          Kids kids{};
          for (int k = 0; k < d_; ++k) {
            std::uint32_t kc = cls[all_kids[E + r][k]];
            if (class_leaf[kc] == kNone && !class_id.count(kc)) {
              ready = false;
              break;
            }
            kids[k] = id_of_class(kc);
          }
          if (!ready) continue;
          class_id[c] = make_node(perms[r], kids);
          progress = true;
        }
      }
      // Classes on or above a cycle become new leaves.
      std::vector<std::uint32_t> fresh;
      for (auto& [c, r] : rep) {
        if (finite[c]) continue;
        std::uint32_t id = allocate();
        class_id[c] = id;
        fresh.push_back(c);
      }
      if (leaves_.size() + fresh.size() > options_.leaf_limit)
        throw UndecidedError("leaf set exceeded " + std::to_string(options_.leaf_limit) +
                             " states; preset '" + preset_.name + "' may not be contracting");
      for (std::uint32_t c : fresh) {
        std::uint32_t r = rep.at(c);
        Node& n = node(class_id.at(c));
        n.perm = perms[r];
        n.height = 0;
        for (int k = 0; k < d_; ++k) {
          std::uint32_t kid = id_of_class(cls[all_kids[E + r][k]]);
          n.kids[k] = kid;
        }
      }
      for (std::uint32_t c : fresh) {
        Node& n = node(class_id.at(c));
        for (int k = 0; k < d_; ++k) promote(n.kids[k]);
        n.leaf.store(1, std::memory_order_release);
        leaves_.push_back(class_id.at(c));
      }
      for (std::uint32_t c : fresh) {
        std::uint32_t id = class_id.at(c);
        node(id).hash = detail::fnv1a(key_of(id));
      }
      for (std::uint32_t c : fresh) {
        std::uint32_t id = class_id.at(c);
        Node& n = node(id);
        NodeKey key{n.perm.bits, node_hash(n.perm, n.kids), n.kids};
        Shard& s = shards_[key.hash % kShards];
        std::lock_guard slock(s.mutex);
        s.map.emplace(key, id);
      }
      for (std::size_t i = 0; i < S; ++i)
        if (result[i] == kNone) result[i] = class_id.at(cls[E + i]);
    }

    for (std::size_t i = 0; i < S; ++i) {
      const VState& s = states[i];
      if (s.op == 0) {
        if (s.u < kDenseLeaves && s.v < kDenseLeaves)
          pair_memo_[s.u * kDenseLeaves + s.v].store(result[i], std::memory_order_release);
        sparse_memo_[{s.u, s.v}] = result[i];
      } else {
        node(s.u).inverse.store(result[i], std::memory_order_release);
      }
    }
    return result[0];
  }

  // Marks an interned node and everything below it as leaves. Caller holds
  // resolver_mutex_.
  void promote(std::uint32_t id) const {
    Node& n = node(id);
    if (n.leaf.load(std::memory_order_relaxed)) return;
    for (int k = 0; k < d_; ++k) promote(n.kids[k]);
    n.leaf.store(1, std::memory_order_release);
    leaves_.push_back(id);
  }

  std::vector<std::uint32_t> moore_classes(const std::vector<Perm>& perm,
                                           const std::vector<Kids>& kids) const {
    const std::size_t n = perm.size();
    std::vector<std::uint32_t> cls(n);
    {
      std::unordered_map<std::uint64_t, std::uint32_t> ids;
      for (std::size_t i = 0; i < n; ++i)
        cls[i] = ids.try_emplace(perm[i].bits, static_cast<std::uint32_t>(ids.size())).first->second;
    }
    std::size_t count = 0;
    for (;;) {
      std::unordered_map<std::string, std::uint32_t> ids;
      std::vector<std::uint32_t> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::string sig(reinterpret_cast<const char*>(&cls[i]), 4);
        for (int k = 0; k < d_; ++k) sig.append(reinterpret_cast<const char*>(&cls[kids[i][k]]), 4);
        next[i] = ids.try_emplace(std::move(sig), static_cast<std::uint32_t>(ids.size())).first->second;
      }
      cls.swap(next);
      if (ids.size() == count) break;
      count = ids.size();
    }
    return cls;
  }

  void build_initial_leaves() {
    // Automaton states: 0 identity, 1..n generators, n+1..2n inverses.
    const int n = static_cast<int>(preset_.generators.size());
    auto state_of = [&](const std::string& label) -> std::uint32_t {
      if (label == "1") return 0;
      char c = label[0];
      bool inverse_letter = std::isupper(static_cast<unsigned char>(c));
      char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      for (int i = 0; i < n; ++i)
        if (preset_.generators[i].label == lc) return 1 + i + (inverse_letter ? n : 0);
      throw PresetError("undeclared section label '" + label + "'");
    };
    auto inverse_label = [](const std::string& label) -> std::string {
      if (label == "1") return label;
      char c = label[0];
      return std::string(1, std::isupper(static_cast<unsigned char>(c))
                                ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                                : upper(c));
    };
    const std::size_t total = 1 + 2 * n;
    std::vector<Perm> perms(total);
    std::vector<Kids> kids(total);
    perms[0] = Perm::identity(d_);
    for (int i = 0; i < n; ++i) {
      const auto& g = preset_.generators[i];
      Perm p = Perm::from_images(g.perm);
      Perm pi = inverse(p, d_);
      perms[1 + i] = p;
      perms[1 + n + i] = pi;
      for (int k = 0; k < d_; ++k) {
        kids[1 + i][k] = state_of(g.sections[k]);
        kids[1 + n + i][k] = state_of(inverse_label(g.sections[pi(k)]));
      }
    }
    std::vector<std::uint32_t> cls = moore_classes(perms, kids);
    std::unordered_map<std::uint32_t, std::uint32_t> class_to_id;
    std::vector<std::uint32_t> state_id(total);
    for (std::size_t s = 0; s < total; ++s) {
      auto [it, fresh] = class_to_id.try_emplace(cls[s], static_cast<std::uint32_t>(class_to_id.size()));
      state_id[s] = it->second;
      if (fresh) {
        std::uint32_t id = allocate();
        assert(id == it->second);
        (void)id;
        std::string label = s == 0 ? "1"
                            : s <= static_cast<std::size_t>(n)
                                ? std::string(1, preset_.generators[s - 1].label)
                                : std::string(1, upper(preset_.generators[s - 1 - n].label));
        initial_labels_.push_back(label);
      }
    }
    if (class_to_id.size() >= 0xF0) throw PresetError("too many automaton states");
    for (std::size_t s = 0; s < total; ++s) {
      Node& nd = node(state_id[s]);
      nd.perm = perms[s];
      for (int k = 0; k < d_; ++k) nd.kids[k] = state_id[kids[s][k]];
      nd.hash = detail::splitmix64(0x6c656166ULL + state_id[s]);
      nd.leaf.store(1);
    }
    for (std::uint32_t id = 0; id < class_to_id.size(); ++id) {
      leaves_.push_back(id);
      Node& nd = node(id);
      NodeKey key{nd.perm.bits, node_hash(nd.perm, nd.kids), nd.kids};
      shards_[key.hash % kShards].map.emplace(key, id);
    }
    for (int i = 0; i < n; ++i) {
      const auto& g = preset_.generators[i];
      letters_[g.label] = state_id[1 + i];
      letters_[upper(g.label)] = state_id[1 + n + i];
      if (g.involution && state_id[1 + i] != state_id[1 + n + i])
        throw PresetError(std::string("generator '") + g.label +
                          "' is declared an involution but does not square to the identity");
    }
  }

  void verify_relations() const {
    for (const auto& r : preset_.relations)
      if (eval(r.lhs) != eval(r.rhs))
        throw PresetError("relation " + r.lhs + " = " + r.rhs + " does not hold in preset '" +
                          preset_.name + "'");
  }

  std::string key_of(std::uint32_t x) const {
    if (x < initial_labels_.size()) return std::string(1, static_cast<char>(x));
    std::string out(1, '\xFE');
    std::vector<std::uint32_t> order{x};
    std::unordered_map<std::uint32_t, std::uint32_t> seen{{x, 0}};
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Node& n = node(order[i]);
      for (int k = 0; k < d_; ++k) out.push_back(static_cast<char>(n.perm(k)));
      for (int k = 0; k < d_; ++k) {
        std::uint32_t c = n.kids[k];
        if (c < initial_labels_.size()) {
          out.push_back(static_cast<char>(c));
          continue;
        }
        auto [it, fresh] = seen.try_emplace(c, static_cast<std::uint32_t>(order.size()));
        if (fresh) order.push_back(c);
        out.push_back('\xF1');
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((it->second >> (8 * b)) & 0xFF));
      }
    }
    return out;
  }

  LeafPerm act(std::uint32_t x, int m, std::unordered_map<std::uint64_t, LeafPerm>& memo) const {
    std::size_t size = 1;
    for (int i = 0; i < m; ++i) size *= static_cast<std::size_t>(d_);
    if (m == 0 || x == kIdentity) {
      LeafPerm id(size);
      for (std::size_t i = 0; i < size; ++i) id[i] = static_cast<std::uint32_t>(i);
      return id;
    }
    std::uint64_t key = (std::uint64_t{x} << 8) | static_cast<std::uint64_t>(m);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const Node& n = node(x);
    std::size_t block = size / d_;
    LeafPerm r(size);
    for (int i = 0; i < d_; ++i) {
      LeafPerm sub = act(n.kids[i], m - 1, memo);
      for (std::size_t j = 0; j < block; ++j)
        r[i * block + j] = static_cast<std::uint32_t>(n.perm(i) * block + sub[j]);
    }
    memo.emplace(key, r);
    return r;
  }

  bool stabilizes(std::uint32_t x, int m, std::unordered_map<std::uint64_t, bool>& memo) const {
    if (m == 0 || x == kIdentity) return true;
    std::uint64_t key = (std::uint64_t{x} << 8) | static_cast<std::uint64_t>(m);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const Node& n = node(x);
    bool ok = n.perm.is_identity(d_);
    for (int i = 0; ok && i < d_; ++i) ok = stabilizes(n.kids[i], m - 1, memo);
    memo.emplace(key, ok);
    return ok;
  }

  void write_portrait(std::uint32_t x, int m, std::string& out) const {
    if (x < initial_labels_.size()) {
      out += initial_labels_[x];
      return;
    }
    if (m == 0) {
      out += '?';
      return;
    }
    const Node& n = node(x);
    out += '[';
    for (int k = 0; k < d_; ++k) out += static_cast<char>('0' + n.perm(k));
    out += '|';
    for (int k = 0; k < d_; ++k) {
      if (k) out += ',';
      write_portrait(n.kids[k], m - 1, out);
    }
    out += ']';
  }

  GroupPreset preset_;
  GroupOptions options_;
  int d_;

  std::unique_ptr<std::atomic<Node*>[]> chunks_;
  mutable std::atomic<std::uint32_t> size_{0};
  mutable std::mutex grow_mutex_;
  mutable std::array<Shard, kShards> shards_;

  mutable std::mutex resolver_mutex_;
  mutable std::vector<std::uint32_t> leaves_;
  mutable std::array<std::atomic<std::uint32_t>, kDenseLeaves * kDenseLeaves> pair_memo_;
  mutable std::unordered_map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t, detail::PairHash>
      sparse_memo_;

  std::unordered_map<char, std::uint32_t> letters_;
  std::vector<std::string> initial_labels_;
};

// Free-function spellings of the element operations.

inline const Group& group_of(Element x) {
  if (!x.valid()) throw GroupError("element is not attached to a group");
  return *x.group();
}

inline const Group& common_group(Element x, Element y) {
  if (x.group() != y.group()) throw GroupError("elements belong to different group presets");
  return group_of(x);
}

inline Element multiply(Element x, Element y) { return common_group(x, y).multiply(x, y); }
inline Element invert(Element x) { return group_of(x).invert(x); }
inline Element section(Element x, std::string_view path) { return group_of(x).section(x, path); }
inline bool is_identity(Element x) { return group_of(x).is_identity(x); }
inline bool equals(Element x, Element y) { return common_group(x, y).equals(x, y); }
inline std::string canonical_key(Element x) { return group_of(x).canonical_key(x); }
inline LeafPerm level_action(Element x, int m) { return group_of(x).level_action(x, m); }

inline Element operator*(Element x, Element y) { return multiply(x, y); }

}  // namespace griglab
