#include <gtest/gtest.h>

#include <map>
#include <set>

#include <griglab/conjugacy.hpp>

#include "oracle.hpp"

using namespace griglab;

namespace {

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

// Union-find over level-k actions of B(n) under conjugation by B(R)
// actions: an upper bound on the number of classes meeting B(n).
std::uint64_t brute_upper(int n, int R, int k) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b = ball(g, rw, n);
  Ball t = ball(g, rw, R);
  std::map<oracle::Action, std::size_t> index;
  std::vector<oracle::Action> acts;
  for (std::size_t i = 0; i < b.size(); ++i) {
    acts.push_back(oracle::action(b[i].word, k));
    index.emplace(acts.back(), i);
  }
  std::vector<std::size_t> parent(b.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  for (const auto& e : t.entries()) {
    auto p = oracle::action(e.word, k);
    auto pi = oracle::action(inverse_word(g, e.word), k);
    for (std::size_t i = 0; i < b.size(); ++i) {
      auto it = index.find(oracle::compose(pi, oracle::compose(acts[i], p)));
      if (it != index.end()) parent[find(it->second)] = find(i);
    }
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < b.size(); ++i) roots.insert(find(i));
  return roots.size();
}

// Classes of the finite quotient Γ/St(k) met by B(n): a lower bound.
std::uint64_t quotient_lower(int n, int k) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b = ball(g, rw, n);
  std::set<oracle::Action> all{oracle::action("", k)};
  std::vector<oracle::Action> todo(all.begin(), all.end());
  while (!todo.empty()) {
    auto p = todo.back();
    todo.pop_back();
    for (char c : std::string("abcd")) {
      auto q = oracle::compose(p, oracle::action(std::string(1, c), k));
      if (all.insert(q).second) todo.push_back(q);
    }
  }
  auto inv = [](const oracle::Action& p) {
    oracle::Action r(p.size());
    for (std::size_t v = 0; v < p.size(); ++v) r[p[v]] = v;
    return r;
  };
  std::set<std::set<oracle::Action>> classes;
  for (const auto& e : b.entries()) {
    auto x = oracle::action(e.word, k);
    std::set<oracle::Action> cls;
    for (const auto& t : all) cls.insert(oracle::compose(inv(t), oracle::compose(x, t)));
    classes.insert(cls);
  }
  return classes.size();
}

}  // namespace

TEST(Conjugacy, FirstRowsExact) {
  const Group& g = grig();
  WordRewriter rw(g);
  auto rows = conj_growth_table(g, rw, 8, 8, 6);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].lower, 1u);
  EXPECT_TRUE(rows[0].exact());
  EXPECT_EQ(rows[1].lower, 5u);
  EXPECT_TRUE(rows[1].exact());
  GrowthTable gamma = growth_from_ball(ball(g, rw, 8), 8);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.exact()) << r.n;
    EXPECT_LE(r.upper, gamma[r.n].gamma);
  }
}

TEST(Conjugacy, BracketAgreesWithIndependentBounds) {
  const Group& g = grig();
  WordRewriter rw(g);
  auto rows = conj_growth_table(g, rw, 5, 8, 6);
  for (int n = 0; n <= 5; ++n) {
    EXPECT_LE(quotient_lower(n, 4), rows[n].lower) << n;
    EXPECT_GE(brute_upper(n, 6, 10), rows[n].upper) << n;
  }
}

TEST(Conjugacy, InvariantsRefineWithDepth) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b = ball(g, rw, 5);
  std::map<std::string, std::string> coarse;
  for (const auto& e : b.entries()) {
    auto [it, fresh] = coarse.emplace(depth_invariant(e.element, 6), depth_invariant(e.element, 5));
    if (!fresh) EXPECT_EQ(it->second, depth_invariant(e.element, 5));
  }
  EXPECT_EQ(depth_invariant(g.eval("a"), 4), depth_invariant(g.eval("bab"), 4));
}

TEST(Conjugacy, ConjugatorSearchVerifies) {
  const Group& g = grig();
  WordRewriter rw(g);
  auto r = conjugator_search(rw, g.eval("b"), g.eval("abababa"), 3);
  ASSERT_TRUE(r.found);
  Element t = g.eval(r.word);
  EXPECT_EQ(g.conjugate(g.eval("b"), t), g.eval("abababa"));
  EXPECT_FALSE(conjugator_search(rw, g.eval("a"), g.eval("b"), 4).found);
  r = conjugator_search(rw, g.eval("a"), g.eval("bab"), 1);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.word, "b");
}

TEST(Conjugacy, InfinitelyManyClassesWitness) {
  const Group& g = grig();
  WordRewriter rw(g);
  auto w = infinite_classes_witness(rw, 5);
  ASSERT_EQ(w.elements.size(), 5u);
  for (std::size_t i = 0; i < w.elements.size(); ++i) {
    EXPECT_EQ(g.stabilizer_level(w.elements[i], 8), static_cast<int>(i));
    for (std::size_t j = 0; j < i; ++j)
      EXPECT_NE(depth_invariant(w.elements[i], w.depth), depth_invariant(w.elements[j], w.depth));
  }
}
