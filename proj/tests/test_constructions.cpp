#include <gtest/gtest.h>

#include <random>

#include <griglab/constructions.hpp>

#include "oracle.hpp"

using namespace griglab;

namespace {

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

const WordRewriter& rw() {
  static WordRewriter r(grig());
  return r;
}

const BranchingData& branching() {
  static BranchingData bd(rw());
  return bd;
}

// Sections of a root-fixing word, compared through the level-k oracle.
void expect_sections(const std::string& w, const std::string& s0, const std::string& s1, int k = 8) {
  auto p = oracle::action(w, k);
  ASSERT_EQ(p[0] >> (k - 1), 0u) << w << " moves the root";
  auto [a, b] = oracle::sections(p, k);
  EXPECT_EQ(a, oracle::action(s0, k - 1)) << w;
  EXPECT_EQ(b, oracle::action(s1, k - 1)) << w;
}

}  // namespace

TEST(Constructions, BranchingSubgroupIndices) {
  const BranchingData& bd = branching();
  EXPECT_EQ(bd.k_index(), 16u);
  EXPECT_EQ(bd.h1_index(), 64u);
  EXPECT_EQ(bd.rooted_word(), "a");
  ASSERT_GE(bd.index_by_level().size(), 2u);
  auto& idx = bd.index_by_level();
  EXPECT_EQ(idx[idx.size() - 1], idx[idx.size() - 2]);
  EXPECT_TRUE(bd.k_member(grig().eval("abab")));
  EXPECT_TRUE(bd.k_member(grig().eval("babababa")));
  EXPECT_FALSE(bd.k_member(grig().eval("a")));
  EXPECT_EQ(bd.k_transversal().size(), 16u);
}

TEST(Constructions, LiftsHaveRequestedSections) {
  const BranchingData& bd = branching();
  const Group& g = grig();
  for (const char* k : {"abab", "baba", "abababab", "acabacab"}) {
    std::string w = bd.lift(k);
    expect_sections(w, k, "");
    EXPECT_TRUE(bd.k_member(g.eval(w)));
  }
  EXPECT_THROW(bd.lift("a"), LiftUnavailable);
}

TEST(Constructions, EncodeRight) {
  auto e = encode_right(rw(), "ab");
  EXPECT_EQ(e.word, "acad");
  expect_sections(e.word, e.left, "ab");
  for (std::size_t len = 0; len <= 5; ++len)
    for (const auto& w : enumerate_reduced(rw(), len)) {
      auto r = encode_right(rw(), w);
      EXPECT_LE(r.word.size(), 2 * w.size() + 1) << w;
      expect_sections(r.word, r.left, w);
    }
}

TEST(Constructions, EncodePair) {
  auto r = encode_pair(rw(), "d", "ab");
  ASSERT_EQ(r.status, EncodeStatus::Achieved);
  EXPECT_EQ(r.word, "acad");
  r = encode_pair(rw(), "", "ab");
  EXPECT_EQ(r.status, EncodeStatus::Unreachable);
  r = encode_pair(rw(), "", "");
  EXPECT_EQ(r.status, EncodeStatus::Achieved);
  EXPECT_EQ(r.word, "");
  r = encode_pair(rw(), "abababab", "acacacacacac");
  EXPECT_EQ(r.status, EncodeStatus::Inconclusive);
}

TEST(Constructions, CoverageTotalsConsistent) {
  auto rep = image_coverage_report(rw(), 4);
  EXPECT_EQ(rep.pairs, 121u);
  EXPECT_EQ(rep.reachable + rep.unreachable + rep.unknown, rep.pairs);
  EXPECT_EQ(rep.unreachable_pairs.size(), rep.unreachable);
  for (const auto& [u, v, w] : rep.samples) expect_sections(w, u, v);
}

TEST(Constructions, CommKIsFourConjugates) {
  const BranchingData& bd = branching();
  const Group& g = grig();
  Ball b = ball(g, rw(), 8);
  std::vector<std::string> ks;
  for (const auto& e : b.entries())
    if (bd.k_member(e.element)) ks.push_back(e.word);
  ASSERT_FALSE(ks.empty());
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto& k1 = ks[rng() % ks.size()];
    const auto& k2 = ks[rng() % ks.size()];
    Expression e = comm_k_product(bd, k1, k2);
    EXPECT_EQ(e.size(), 4u);
    std::string comm = inverse_word(g, k1) + inverse_word(g, k2) + k1 + k2;
    expect_sections(e.word(g), comm, "", 7);
  }
}

TEST(Constructions, CommGWithinBudget) {
  const BranchingData& bd = branching();
  const Group& g = grig();
  for (auto [x, y] : {std::pair{"a", "b"}, {"abac", "dab"}, {"babacad", "cabad"}, {"ab", "ab"}}) {
    CommGResult r = comm_g_decompose(bd, x, y);
    std::string comm = inverse_word(g, x) + inverse_word(g, y) + x + y;
    EXPECT_EQ(oracle::action(r.expr.word(g), 8), oracle::action(comm, 8)) << x << "," << y;
    EXPECT_LE(r.expr.size(), 4 * static_cast<std::size_t>(bd.coset_length_M()) + 8);
  }
}
