// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <griglab.hpp>

#include "oracle.hpp"

using namespace griglab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

const WordRewriter& rw() {
  static WordRewriter r(grig());
  return r;
}

Outcome relations() {
  const Group& g = grig();
  bool ok = true;
  for (const char* w : {"aa", "bb", "cc", "dd", "adadadad"}) ok = ok && g.is_identity(g.eval(w));
  for (auto [x, y] : {std::pair{"b", "c"}, {"b", "d"}, {"c", "d"}})
    ok = ok && g.equals(g.commutator(g.eval(x), g.eval(y)), g.identity());
  ok = ok && !g.is_identity(g.eval("adad"));
  return {ok, "squares, [b,c]=[b,d]=[c,d]=1, (ad)^4=1"};
}

Outcome oracle_cross_validation() {
  const Group& g = grig();
  std::map<std::string, LeafPerm> by_key;
  std::map<LeafPerm, std::string> by_act;
  std::size_t words = 0, bad = 0;
  for (std::size_t len = 0; len <= 7; ++len)
    for (const auto& w : enumerate_reduced(rw(), len)) {
      ++words;
      Element x = g.eval(w);
      std::string key = g.canonical_key(x);
      LeafPerm act = g.level_action(x, 7);
      auto [i, f1] = by_key.emplace(key, act);
      auto [j, f2] = by_act.emplace(act, key);
      if ((!f1 && i->second != act) || (!f2 && j->second != key)) ++bad;
    }
  return {bad == 0, std::to_string(words) + " words, " + std::to_string(bad) + " disagreements"};
}

Outcome growth_determinism() {
  const Group& g = grig();
  GrowthTable t = growth_table(g, rw(), 12, {1});
  Ball b8 = ball(g, rw(), 12, {8});
  bool ok = growth_from_ball(b8, 12) == t;
  auto ref = oracle::level_growth(12, 12);
  for (int n = 0; n <= 12; ++n) ok = ok && t[n].gamma == ref[n];
  ok = ok && t[0].gamma == 1 && t[1].gamma == 5;
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; m + n <= 12; ++n) ok = ok && t[m + n].gamma <= t[m].gamma * t[n].gamma;
  return {ok, "gamma(12)=" + std::to_string(t[12].gamma)};
}

std::vector<ConjGrowthRow> f_rows;

Outcome bracket_collapse() {
  const Group& g = grig();
  Ball b = ball(g, rw(), 8);
  LevelQuotient q(g, rw(), enrichment_level(g, rw()));
  auto rows = conj_growth_rows(ClassPartition(b, 8, 6, rw(), 1, &q), 8);
  GrowthTable gamma = growth_from_ball(b, 8);
  std::string flagged;
  bool ok = rows[1].lower == 5 && rows[1].exact();
  std::optional<std::vector<ConjGrowthRow>> escalated;
  for (const auto& r : rows) {
    ok = ok && r.upper <= gamma[r.n].gamma;
    if (r.exact()) continue;
    flagged += " " + std::to_string(r.n);
    if (!escalated) escalated = conj_growth_rows(ClassPartition(b, 8, 8, rw(), 1, &q), 8);
    ok = ok && (*escalated)[r.n].exact();
  }
  f_rows = escalated ? *escalated : rows;
  std::string f;
  for (const auto& r : f_rows) f += (f.empty() ? "" : ",") + std::to_string(r.lower);
  return {ok, "f=" + f + (flagged.empty() ? "" : "; escalated rows" + flagged)};
}

Outcome recursion() {
  const Group& g = grig();
  Ball b = ball(g, rw(), 8);
  std::vector<StabilizerRow> st;
  for (int n = 0; n <= 8; ++n) st.push_back({n, b.count_within(n), membership_count(b, MembershipFilter::St1, n)});
  double T = estimate_T(st);
  for (const auto& c : grig_recursion_audit(f_rows, T))
    if (c.n == 1) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "f(4)=%g >= f(1)^2/(2T)=%.3f, T=%.3f", c.lhs, c.rhs, T);
      return {c.evaluated && c.pass, buf};
    }
  return {false, "no rows for n=1 and n=4"};
}

Outcome sigma_formula() {
  double s = sigma(2, 24);
  return {std::abs(s - 0.179) <= 0.001 && std::abs(sigma(2, 2) - 0.5) <= 1e-12, "sigma(2,24)=" + std::to_string(s)};
}

AuditReport audit(const std::string& lemma, AuditConfig cfg = {}) {
  AuditContext ctx(grig(), cfg);
  return run_audit(ctx, lemma).front();
}

std::string count(const AuditReport& r, const char* key) { return r.counts.contains(key) ? r.counts[key].dump() : "?"; }

Outcome comm_k() {
  auto r = audit("comm-k");
  bool ok = r.status == AuditStatus::Pass && r.counts["verified"] == 100;
  return {ok, count(r, "verified") + "/100 verified"};
}

Outcome subwords() {
  auto r = audit("subwords");
  const auto& c = r.counts["coverage"];
  bool ok = r.status == AuditStatus::Pass && c["reachable"].get<std::size_t>() + c["unreachable"].get<std::size_t>() ==
                                                 c["pairs"].get<std::size_t>();
  std::string one_ab = "?";
  for (const auto& w : r.witnesses)
    if (w.contains("pair") && w["pair"][1] == "ab" && w["pair"][0] == "1") one_ab = w["status"];
  return {ok, count(r, "right_encodings") + " encodings; coverage " + c.dump() + "; (1,ab): " + one_ab};
}

Outcome palindromes() {
  auto r = audit("palindrome");
  return {r.status == AuditStatus::Pass,
          count(r, "palindromes_checked") + " palindromes, " + count(r, "decomposed") + "/" + count(r, "elements")};
}

AuditReport bcw_report;

Outcome bcw() {
  bcw_report = audit("bcw-rewrite");
  const auto& c = bcw_report.counts;
  double targets = c["commutator_confirmed"].get<double>();
  double at_default = c["inconclusive_at_default"].get<double>();
  bool ok = c["inconclusive_after_escalation"] == 0 && at_default <= 0.05 * targets && c["max_conjugates"] <= 4;
  return {ok, count(bcw_report, "commutator_confirmed") + " targets, inconclusive " + count(bcw_report, "inconclusive_at_default") +
                  " then " + count(bcw_report, "inconclusive_after_escalation")};
}

Outcome two_commutators() {
  const auto& c = bcw_report.counts;
  bool genuine_failure = false;
  for (const auto& d : bcw_report.discrepancies)
    if (d.contains("reason") && d["reason"].get<std::string>().find("2 commutators") != std::string::npos)
      genuine_failure = true;
  bool ok = !genuine_failure && c["commutator_confirmed"] == c["parity_zero"];
  return {ok, count(bcw_report, "commutator_confirmed") + "/" + count(bcw_report, "parity_zero") +
                  " parity-zero elements, single commutators " + count(bcw_report, "single_commutator")};
}

Outcome rewriter() {
  const auto& c = bcw_report.counts;
  bool ok = c["rewrites"] == 100;
  for (const auto& d : bcw_report.discrepancies)
    if (d.contains("commutators") || d.contains("expression")) ok = false;
  return {ok, count(bcw_report, "rewrites") + " rewrites, worst ratio " +
                  count(bcw_report, "worst_commutators_per_conjugate")};
}

Outcome dihedral_preset() {
  auto rep = dihedral::preset_width(20);
  return {rep.decomposed == rep.elements && rep.max_factors <= 2,
          std::to_string(rep.decomposed) + "/" + std::to_string(rep.elements) + " elements"};
}

Outcome quotients() {
  const Group& g = grig();
  bool ok = finite_quotient_order(g, rw(), 1) == 2 && finite_quotient_order(g, rw(), 2) == 8 &&
            oracle::quotient_order(2) == 8;
  std::string idx;
  bool stable = false;
  std::uint64_t prev = 0;
  for (int m = 1; m <= 5; ++m) {
    std::uint64_t i = normal_closure_index(g, rw(), "abab", m);
    idx += (idx.empty() ? "" : ",") + std::to_string(i);
    if (i == prev) {
      stable = true;
      break;
    }
    prev = i;
  }
  return {ok && stable, "orders 2,8; index of <<(ab)^2>> by level " + idx};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"relation suite", relations},
      {"oracle cross-validation", oracle_cross_validation},
      {"growth determinism", growth_determinism},
      {"conjugacy bracket collapse", bracket_collapse},
      {"recursion audit", recursion},
      {"sigma formula", sigma_formula},
      {"comm_K audit", comm_k},
      {"subwords audit", subwords},
      {"palindrome lemma", palindromes},
      {"BCW experiment", bcw},
      {"two-commutator experiment", two_commutators},
      {"conjugates-to-commutators rewriter", rewriter},
      {"dihedral preset", dihedral_preset},
      {"quotient computations", quotients},
  };
  int failed = 0, i = 0;
  for (const auto& [name, fn] : criteria) {
    ++i;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", i, name.c_str(), s, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
