#include <gtest/gtest.h>

#include <set>

#include <griglab/quotient.hpp>

#include "oracle.hpp"

using namespace griglab;

namespace {

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

// index of the normal closure of w in the level-k image, by closure BFS
std::uint64_t closure_index(const std::string& w, int k) {
  std::vector<oracle::Action> group;
  {
    std::set<oracle::Action> seen{oracle::action("", k)};
    std::vector<oracle::Action> todo(seen.begin(), seen.end());
    while (!todo.empty()) {
      auto p = todo.back();
      todo.pop_back();
      for (char c : std::string("abcd")) {
        auto q = oracle::compose(p, oracle::action(std::string(1, c), k));
        if (seen.insert(q).second) todo.push_back(q);
      }
    }
    group.assign(seen.begin(), seen.end());
  }
  auto inv = [](const oracle::Action& p) {
    oracle::Action r(p.size());
    for (std::size_t v = 0; v < p.size(); ++v) r[p[v]] = v;
    return r;
  };
  auto x = oracle::action(w, k);
  std::vector<oracle::Action> gens;
  for (const auto& t : group) gens.push_back(oracle::compose(inv(t), oracle::compose(x, t)));
  std::set<oracle::Action> sub{oracle::action("", k)};
  std::vector<oracle::Action> todo(sub.begin(), sub.end());
  while (!todo.empty()) {
    auto p = todo.back();
    todo.pop_back();
    for (const auto& s : gens) {
      auto q = oracle::compose(p, s);
      if (sub.insert(q).second) todo.push_back(q);
    }
  }
  return group.size() / sub.size();
}

}  // namespace

TEST(Quotient, OrdersMatchIndependentBfs) {
  const Group& g = grig();
  WordRewriter rw(g);
  for (int m = 0; m <= 4; ++m) EXPECT_EQ(finite_quotient_order(g, rw, m), oracle::quotient_order(m)) << m;
  EXPECT_EQ(finite_quotient_order(g, rw, 1), 2u);
  EXPECT_EQ(finite_quotient_order(g, rw, 2), 8u);
}

TEST(Quotient, NormalClosureIndexMatchesOracle) {
  const Group& g = grig();
  WordRewriter rw(g);
  for (int m = 1; m <= 4; ++m) EXPECT_EQ(normal_closure_index(g, rw, "abab", m), closure_index("abab", m)) << m;
  EXPECT_EQ(normal_closure_index(g, rw, "abab", 3), normal_closure_index(g, rw, "abab", 4));
}

TEST(Quotient, GroupStructure) {
  const Group& g = grig();
  WordRewriter rw(g);
  LevelQuotient q(g, rw, 3);
  ASSERT_EQ(q.order(), 128u);
  for (std::size_t i = 0; i < q.order(); i += 7) {
    EXPECT_EQ(q.multiply(i, q.inverse(i)), q.index_of(g, g.identity()));
    EXPECT_EQ(q.index_of(g, g.eval(q.word(i))), i);
  }
  // class ids are constant on conjugates
  const auto& cls = q.classes();
  Element x = g.eval("abad"), t = g.eval("cab");
  EXPECT_EQ(cls[q.index_of(g, x)], cls[q.index_of(g, g.conjugate(x, t))]);
  EXPECT_THROW(LevelQuotient(g, rw, 5, 1000), BudgetExceeded);
}
