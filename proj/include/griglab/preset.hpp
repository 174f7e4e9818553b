#pragma once

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "detail/hash.hpp"

namespace griglab {

inline constexpr std::string_view kPresetSchema = "asg-1";
inline constexpr int kMaxArity = 8;

class PresetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One generator of a self-similar group: its label, root permutation and
/// the label of its section at each first-level vertex ("1" for identity,
/// an upper-case label for the inverse of a generator).
struct GeneratorSpec {
  char label = '?';
  bool involution = false;
  std::vector<int> perm;
  std::vector<std::string> sections;
};

/// A relation lhs = rhs between words, checked when a Group is built and
/// then available to the word rewriter.
struct Relation {
  std::string lhs;
  std::string rhs;
};

struct GroupPreset {
  std::string name;
  int arity = 2;
  std::vector<GeneratorSpec> generators;
  std::vector<Relation> relations;

  const GeneratorSpec* find(char label) const {
    for (const auto& g : generators)
      if (g.label == label) return &g;
    return nullptr;
  }
};

inline void validate(const GroupPreset& p) {
  auto fail = [&](const std::string& what) {
    throw PresetError("preset '" + p.name + "': " + what);
  };
  if (p.name.empty()) fail("missing name");
  if (p.arity < 2 || p.arity > kMaxArity)
    fail("arity must be in [2, " + std::to_string(kMaxArity) + "]");
  if (p.generators.empty()) fail("no generators");
  std::set<char> labels;
  for (const auto& g : p.generators) {
    if (!std::islower(static_cast<unsigned char>(g.label)))
      fail(std::string("generator label '") + g.label + "' must be a lower-case letter");
    if (!labels.insert(g.label).second)
      fail(std::string("duplicate generator '") + g.label + "'");
  }
  for (const auto& g : p.generators) {
    std::string who = std::string("generator '") + g.label + "': ";
    if (static_cast<int>(g.perm.size()) != p.arity) fail(who + "permutation has wrong length");
    std::vector<bool> seen(p.arity, false);
    for (int x : g.perm) {
      if (x < 0 || x >= p.arity || seen[x]) fail(who + "permutation is not a bijection");
      seen[x] = true;
    }
    if (static_cast<int>(g.sections.size()) != p.arity) fail(who + "wrong number of sections");
    for (const auto& s : g.sections) {
      if (s == "1") continue;
      if (s.size() != 1) fail(who + "section label '" + s + "' is not a single letter");
      char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
      if (!labels.count(c)) fail(who + "section label '" + s + "' is not a declared generator");
    }
    if (g.involution) {
      for (int i = 0; i < p.arity; ++i)
        if (g.perm[g.perm[i]] != i) fail(who + "declared involution but permutation has order > 2");
    }
  }
  for (const auto& r : p.relations) {
    for (std::string_view w : {std::string_view(r.lhs), std::string_view(r.rhs)})
      for (char c : w)
        if (!labels.count(static_cast<char>(std::tolower(static_cast<unsigned char>(c)))))
          fail("relation '" + r.lhs + "=" + r.rhs + "' uses an undeclared letter");
  }
}

/// a = (swap; 1,1), b = (id; a,c), c = (id; a,d), d = (id; 1,b).
inline GroupPreset grigorchuk_preset() {
  GroupPreset p;
  p.name = "grigorchuk";
  p.arity = 2;
  p.generators = {
      {'a', true, {1, 0}, {"1", "1"}},
      {'b', true, {0, 1}, {"a", "c"}},
      {'c', true, {0, 1}, {"a", "d"}},
      {'d', true, {0, 1}, {"1", "b"}},
  };
  // The Klein four-group table on {1,b,c,d}; each entry is verified on load.
  p.relations = {{"bc", "d"}, {"cb", "d"}, {"bd", "c"},
                 {"db", "c"}, {"cd", "b"}, {"dc", "b"}};
  return p;
}

inline nlohmann::json to_json(const GroupPreset& p) {
  nlohmann::json j;
  j["schema"] = kPresetSchema;
  j["name"] = p.name;
  j["arity"] = p.arity;
  j["generators"] = nlohmann::json::array();
  for (const auto& g : p.generators) {
    j["generators"].push_back({{"label", std::string(1, g.label)},
                               {"involution", g.involution},
                               {"perm", g.perm},
                               {"sections", g.sections}});
  }
  if (!p.relations.empty()) {
    j["relations"] = nlohmann::json::array();
    for (const auto& r : p.relations) j["relations"].push_back({r.lhs, r.rhs});
  }
  return j;
}

inline GroupPreset parse_preset(const nlohmann::json& j) {
  GroupPreset p;
  try {
    if (j.contains("schema") && j.at("schema").get<std::string>() != kPresetSchema)
      throw PresetError("unsupported preset schema '" + j.at("schema").get<std::string>() + "'");
    p.name = j.at("name").get<std::string>();
    p.arity = j.at("arity").get<int>();
    for (const auto& g : j.at("generators")) {
      GeneratorSpec s;
      auto label = g.at("label").get<std::string>();
      if (label.size() != 1)
        throw PresetError("preset '" + p.name + "': generator label '" + label +
                          "' must be a single letter");
      s.label = label[0];
      s.involution = g.value("involution", false);
      s.perm = g.at("perm").get<std::vector<int>>();
      s.sections = g.at("sections").get<std::vector<std::string>>();
      p.generators.push_back(std::move(s));
    }
    if (j.contains("relations"))
      for (const auto& r : j.at("relations"))
        p.relations.push_back({r.at(0).get<std::string>(), r.at(1).get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw PresetError(std::string("malformed preset: ") + e.what());
  }
  validate(p);
  return p;
}

/// "grigorchuk" or a path to an asg-1 JSON file.
inline GroupPreset load_preset(std::string_view spec) {
  if (spec == "grigorchuk") return grigorchuk_preset();
  std::ifstream in{std::string(spec)};
  if (!in) throw PresetError("cannot open preset file '" + std::string(spec) + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PresetError("preset file '" + std::string(spec) + "' is not valid JSON: " + e.what());
  }
  return parse_preset(j);
}

/// Stable 64-bit identity of a preset's defining data.
inline std::uint64_t fingerprint(const GroupPreset& p) {
  return detail::fnv1a(to_json(p).dump());
}

}  // namespace griglab
