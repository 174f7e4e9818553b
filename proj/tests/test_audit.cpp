#include <gtest/gtest.h>

#include <griglab/audit.hpp>

using namespace griglab;

namespace {

const Group& grig() {
  static Group g(grigorchuk_preset());
  return g;
}

AuditReport run_one(const std::string& lemma, AuditConfig cfg = {}) {
  AuditContext ctx(grig(), cfg);
  auto r = run_audit(ctx, lemma);
  EXPECT_EQ(r.size(), 1u);
  return r.front();
}

}  // namespace

TEST(Audit, EveryLemmaPassesAtDefaults) {
  for (const auto& name : audit_lemmas()) {
    auto r = run_one(name);
    EXPECT_EQ(r.status, AuditStatus::Pass) << name << ": " << r.to_json().dump();
    auto j = r.to_json();
    for (const char* key : {"lemma", "status", "witnesses", "counts", "discrepancies"}) EXPECT_TRUE(j.contains(key));
  }
}

TEST(Audit, StatusAndExitCodes) {
  EXPECT_EQ(exit_code(AuditStatus::Pass), 0);
  EXPECT_EQ(exit_code(AuditStatus::Fail), 1);
  EXPECT_EQ(exit_code(AuditStatus::Inconclusive), 2);
  AuditReport p{"x"}, i{"y"}, f{"z"};
  i.inconclusive();
  f.fail({{"reason", "injected"}});
  f.inconclusive();
  EXPECT_EQ(f.status, AuditStatus::Fail);
  EXPECT_EQ(combined_status({p, p}), AuditStatus::Pass);
  EXPECT_EQ(combined_status({p, i}), AuditStatus::Inconclusive);
  EXPECT_EQ(combined_status({i, f, p}), AuditStatus::Fail);
}

TEST(Audit, UnknownLemmaRejected) {
  AuditContext ctx(grig());
  EXPECT_THROW(run_audit(ctx, "no-such-lemma"), std::invalid_argument);
}

TEST(Audit, TinyBudgetIsInconclusiveNotFailed) {
  AuditConfig cfg;
  cfg.budget_seconds = 1e-9;
  auto r = run_one("bcw-rewrite", cfg);
  EXPECT_EQ(r.status, AuditStatus::Inconclusive) << r.to_json().dump();
}

TEST(Audit, SeedAndThreadsDetermineOutput) {
  AuditConfig a, b, c;
  b.threads = 4;
  c.seed = 99;
  auto ra = run_one("comm-k", a).to_json().dump();
  EXPECT_EQ(ra, run_one("comm-k", b).to_json().dump());
  EXPECT_NE(ra, run_one("comm-k", c).to_json().dump());
  EXPECT_EQ(run_one("bcw-rewrite", a).to_json().dump(), run_one("bcw-rewrite", b).to_json().dump());
}

TEST(Audit, GrigorchukOnlyLemmasRejectOtherGroups) {
  Group gs(load_preset(GRIGLAB_SOURCE_DIR "/presets/gupta-sidki-3.json"));
  AuditContext ctx(gs);
  EXPECT_THROW(run_audit(ctx, "subwords"), WordError);
  EXPECT_EQ(run_audit(ctx, "dihedral").front().status, AuditStatus::Pass);
}
