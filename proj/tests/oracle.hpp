#pragma once

// Independent reference for the first Grigorchuk group: the action of
// words on the 2^k vertices of level k, computed letter by letter from
// the defining recursion a = swap, b = (a,c), c = (a,d), d = (1,b).
// Vertex x_1…x_k has index Σ x_i 2^{k-i}; a word acts right to left.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Action = std::vector<std::uint32_t>;

inline std::uint32_t apply_letter(char g, std::uint32_t v, int k) {
  for (int pos = k - 1; pos >= 0; --pos) {
    std::uint32_t bit = (v >> pos) & 1u;
    switch (g) {
      case 'a': return v ^ (1u << pos);
      case 'b': g = bit ? 'c' : 'a'; break;
      case 'c': g = bit ? 'd' : 'a'; break;
      case 'd':
        if (!bit) return v;
        g = 'b';
        break;
      default: return v;
    }
  }
  return v;
}

inline Action action(const std::string& w, int k) {
  Action p(1u << k);
  for (std::uint32_t v = 0; v < p.size(); ++v) {
    std::uint32_t x = v;
    for (auto it = w.rbegin(); it != w.rend(); ++it) x = apply_letter(*it, x, k);
    p[v] = x;
  }
  return p;
}

inline bool is_identity(const Action& p) {
  for (std::uint32_t v = 0; v < p.size(); ++v)
    if (p[v] != v) return false;
  return true;
}

/// p·q as words: apply q first.
inline Action compose(const Action& p, const Action& q) {
  Action r(q.size());
  for (std::size_t v = 0; v < q.size(); ++v) r[v] = p[q[v]];
  return r;
}

/// Number of distinct level-k actions of words of length ≤ n, for n = 0..N
/// (breadth-first over actions, so a lower bound for γ that is exact once
/// k separates the ball).
inline std::vector<std::uint64_t> level_growth(int N, int k) {
  std::set<Action> seen;
  std::vector<Action> frontier{action("", k)};
  seen.insert(frontier[0]);
  std::vector<std::uint64_t> out{1};
  std::vector<Action> gens;
  for (char c : std::string("abcd")) gens.push_back(action(std::string(1, c), k));
  for (int n = 1; n <= N; ++n) {
    std::vector<Action> next;
    for (const auto& p : frontier)
      for (const auto& g : gens) {
        Action q = compose(p, g);
        if (seen.insert(q).second) next.push_back(std::move(q));
      }
    frontier = std::move(next);
    out.push_back(seen.size());
  }
  return out;
}

/// Order of the group generated by the level-k actions (closure BFS).
inline std::uint64_t quotient_order(int k) {
  std::set<Action> seen;
  std::vector<Action> todo{action("", k)};
  seen.insert(todo[0]);
  std::vector<Action> gens;
  for (char c : std::string("abcd")) gens.push_back(action(std::string(1, c), k));
  while (!todo.empty()) {
    Action p = std::move(todo.back());
    todo.pop_back();
    for (const auto& g : gens) {
      Action q = compose(p, g);
      if (seen.insert(q).second) todo.push_back(std::move(q));
    }
  }
  return seen.size();
}

/// Sections of a level-k action at the two first-level vertices (as
/// level-(k-1) actions); requires the root to be fixed.
inline std::pair<Action, Action> sections(const Action& p, int k) {
  std::uint32_t half = 1u << (k - 1);
  Action s0(half), s1(half);
  for (std::uint32_t v = 0; v < half; ++v) {
    s0[v] = p[v] & (half - 1);
    s1[v] = p[v + half] & (half - 1);
  }
  return {s0, s1};
}

}  // namespace oracle
