#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <griglab/enumeration.hpp>

#include "oracle.hpp"

using namespace griglab;

namespace {

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

}  // namespace

TEST(Enumeration, GrowthMatchesIndependentLevelAction) {
  const Group& g = grig();
  WordRewriter rw(g);
  auto ref = oracle::level_growth(9, 10);
  GrowthTable t = growth_table(g, rw, 9);
  ASSERT_EQ(t.size(), ref.size());
  for (std::size_t n = 0; n < ref.size(); ++n) EXPECT_EQ(t[n].gamma, ref[n]) << n;
  EXPECT_EQ(t[0].gamma, 1u);
  EXPECT_EQ(t[1].gamma, 5u);
}

TEST(Enumeration, ThreadCountDoesNotChangeTheBall) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b1 = ball(g, rw, 9, {1});
  Ball b4 = ball(g, rw, 9, {4});
  ASSERT_EQ(b1.size(), b4.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    EXPECT_EQ(b1[i].word, b4[i].word);
    EXPECT_EQ(b1[i].element, b4[i].element);
  }
  EXPECT_TRUE(b1.closed());
}

TEST(Enumeration, Submultiplicative) {
  const Group& g = grig();
  WordRewriter rw(g);
  GrowthTable t = growth_from_ball(ball(g, rw, 10), 10);
  for (int m = 1; m <= 5; ++m)
    for (int n = 1; m + n <= 10; ++n) EXPECT_LE(t[m + n].gamma, t[m].gamma * t[n].gamma);
}

TEST(Enumeration, BallWordsAreGeodesics) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b = ball(g, rw, 7);
  for (const auto& e : b.entries()) {
    EXPECT_EQ(e.word.size(), e.length);
    EXPECT_EQ(g.eval(e.word), e.element);
    EXPECT_EQ(geodesic_length(e.element, b), e.length);
  }
  EXPECT_THROW(geodesic_length(g.eval("abababababababab"), b), std::out_of_range);
}

TEST(Enumeration, StabilizerCountsMatchOracle) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b = ball(g, rw, 8);
  std::size_t st1 = 0;
  for (const auto& e : b.entries()) st1 += oracle::action(e.word, 1)[0] == 0;
  EXPECT_EQ(membership_count(b, MembershipFilter::St1), st1);
  EXPECT_EQ(membership_count(b, MembershipFilter::St1, 0), 1u);
  std::size_t derived = 0;
  for (const auto& e : b.entries()) derived += parity_vector(e.word) == 0;
  EXPECT_EQ(membership_count(b, MembershipFilter::Derived), derived);
  EXPECT_THROW(membership_count(b, MembershipFilter::K), std::logic_error);
}

TEST(Enumeration, CacheRoundTripAndCorruption) {
  const Group& g = grig();
  WordRewriter rw(g);
  Ball b = ball(g, rw, 6);
  auto dir = std::filesystem::temp_directory_path() / "griglab_enum_test";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "g.ballv1").string();
  save_ball(b, path);
  Ball c = load_ball(path, g, rw);
  ASSERT_EQ(c.size(), b.size());
  EXPECT_EQ(c.radius(), 6);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(c[i].word, b[i].word);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  bytes[bytes.size() - 20] ^= 0x5a;
  {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
  }
  EXPECT_THROW(load_ball(path, g, rw), CacheError);

  Group other(load_preset(GRIGLAB_SOURCE_DIR "/presets/gupta-sidki-3.json"));
  WordRewriter orw(other);
  save_ball(ball(other, orw, 2), path);
  EXPECT_THROW(load_ball(path, g, rw), CacheError);
  std::filesystem::remove_all(dir);
}

TEST(Enumeration, BudgetExceededReportsLastRadius) {
  const Group& g = grig();
  WordRewriter rw(g);
  try {
    ball(g, rw, 20, {1, 500});
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.last_complete_radius(), 9);
  }
}
