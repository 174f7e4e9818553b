#include <gtest/gtest.h>

#include <map>

#include <griglab/group.hpp>
#include <griglab/preset.hpp>
#include <griglab/words.hpp>

#include "oracle.hpp"

using namespace griglab;

namespace {

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

}  // namespace

TEST(TreeCore, DefiningRelations) {
  const Group& g = grig();
  for (const char* w : {"aa", "bb", "cc", "dd", "bcd", "adadadad"}) EXPECT_TRUE(g.is_identity(g.eval(w))) << w;
  for (auto [x, y] : {std::pair{"b", "c"}, {"b", "d"}, {"c", "d"}})
    EXPECT_TRUE(g.is_identity(g.commutator(g.eval(x), g.eval(y))));
  EXPECT_FALSE(g.is_identity(g.eval("adad")));
  EXPECT_FALSE(g.is_identity(g.eval("ab")));
}

TEST(TreeCore, SectionsFollowWreathRecursion) {
  const Group& g = grig();
  Element aba = g.eval("aba");
  EXPECT_EQ(g.section(aba, 0), g.eval("c"));
  EXPECT_EQ(g.section(aba, 1), g.eval("a"));
  Element x = g.eval("acad");
  EXPECT_FALSE(g.is_root_active(x));
  EXPECT_EQ(g.section(x, 0), g.eval("d"));
  EXPECT_EQ(g.section(x, 1), g.eval("ab"));
  EXPECT_EQ(g.section(g.eval("b"), "1"), g.eval("c"));
  EXPECT_EQ(g.section(g.eval("b"), "11"), g.eval("d"));
}

TEST(TreeCore, LevelActionMatchesOracle) {
  const Group& g = grig();
  WordRewriter rw(g);
  for (std::size_t len = 0; len <= 6; ++len)
    for (const auto& w : enumerate_reduced(rw, len)) {
      auto lib = g.level_action(g.eval(w), 6);
      auto ref = oracle::action(w, 6);
      ASSERT_EQ(lib.size(), ref.size());
      for (std::size_t v = 0; v < ref.size(); ++v) ASSERT_EQ(lib[v], ref[v]) << w;
    }
}

TEST(TreeCore, CanonicalKeyAgreesWithDeepAction) {
  const Group& g = grig();
  WordRewriter rw(g);
  std::map<std::string, oracle::Action> by_key;
  std::map<oracle::Action, std::string> by_action;
  for (std::size_t len = 0; len <= 6; ++len)
    for (const auto& w : enumerate_reduced(rw, len)) {
      std::string key = g.canonical_key(g.eval(w));
      auto act = oracle::action(w, 9);
      auto [it, fresh] = by_key.emplace(key, act);
      if (!fresh) EXPECT_EQ(it->second, act) << w;
      auto [jt, fresh2] = by_action.emplace(act, key);
      if (!fresh2) EXPECT_EQ(jt->second, key) << w;
    }
}

TEST(TreeCore, MultiplyInvertAssociate) {
  const Group& g = grig();
  Element x = g.eval("abac"), y = g.eval("dab"), z = g.eval("cadab");
  EXPECT_EQ(g.multiply(g.multiply(x, y), z), g.multiply(x, g.multiply(y, z)));
  EXPECT_TRUE(g.is_identity(g.multiply(x, g.invert(x))));
  EXPECT_EQ(g.conjugate(x, y), g.multiply(g.multiply(g.invert(y), x), y));
  auto lib = g.level_action(g.commutator(x, y), 8);
  auto ref = oracle::action("caba" "bad" "abac" "dab", 8);
  EXPECT_EQ(std::vector<std::uint32_t>(lib.begin(), lib.end()), ref);
  EXPECT_EQ(g.structural_hash(g.eval("abab")), g.structural_hash(g.eval("abab")));
  auto p = g.probe_product(x, y);
  EXPECT_EQ(p.hash, g.structural_hash(g.multiply(x, y)));
}

TEST(TreeCore, StabilizerLevels) {
  const Group& g = grig();
  EXPECT_EQ(g.stabilizer_level(g.eval("a"), 5), 0);
  EXPECT_EQ(g.stabilizer_level(g.eval("b"), 5), 1);
  EXPECT_EQ(g.stabilizer_level(g.eval("d"), 5), 2);
  EXPECT_TRUE(g.in_level_stabilizer(g.eval("acacacac"), 3));
}

TEST(TreeCore, PresetRoundTripAndErrors) {
  GroupPreset p = grigorchuk_preset();
  GroupPreset q = parse_preset(to_json(p));
  EXPECT_EQ(fingerprint(p), fingerprint(q));
  auto j = to_json(p);
  j["schema"] = "asg-0";
  EXPECT_THROW(parse_preset(j), PresetError);
  j = to_json(p);
  j["generators"][0]["perm"] = {0, 0};
  EXPECT_THROW(parse_preset(j), PresetError);
  j = to_json(p);
  j["generators"][1]["sections"][0] = "z";
  EXPECT_THROW(parse_preset(j), PresetError);
  EXPECT_THROW(load_preset("/nonexistent/preset.json"), PresetError);
}

TEST(TreeCore, GuptaSidkiPresetLoads) {
  Group g(load_preset(GRIGLAB_SOURCE_DIR "/presets/gupta-sidki-3.json"));
  EXPECT_EQ(g.arity(), 3);
  EXPECT_EQ(g.alphabet().size(), 2u);
  EXPECT_FALSE(g.is_involution('a'));
  EXPECT_TRUE(g.is_identity(g.eval("aaa")));
  EXPECT_TRUE(g.is_identity(g.eval("ttt")));
  EXPECT_TRUE(g.is_identity(g.multiply(g.eval("at"), g.eval("TA"))));
  EXPECT_FALSE(g.is_identity(g.eval("at")));
  EXPECT_FALSE(is_grigorchuk(g));
}
