#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " GRIGLAB_CLI " " + args + " 2>/dev/null";
  Run r{-1, {}};
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Cli, GrowthTable) {
  auto r = run("growth --max-length 6");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out), 8u);
  EXPECT_EQ(r.out.rfind("n,gamma\n0,1\n1,5\n", 0), 0u);
  EXPECT_EQ(run("growth --max-length 6 --threads 4").out, r.out);
  auto v = run("growth --max-length 6 --verify --format json");
  ASSERT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("\"gamma\": 108"), std::string::npos);
}

TEST(Cli, CacheRerunIsIdentical) {
  auto dir = std::filesystem::temp_directory_path() / "griglab_cli_cache";
  std::filesystem::remove_all(dir);
  auto a = run("growth --max-length 7 --cache-dir " + dir.string());
  ASSERT_EQ(a.code, 0);
  EXPECT_FALSE(std::filesystem::is_empty(dir));
  auto b = run("growth --max-length 7", "GRIGLAB_CACHE=" + dir.string());
  EXPECT_EQ(a.out, b.out);
  auto c = run("growth --max-length 5 --cache-dir " + dir.string());
  EXPECT_EQ(c.out, a.out.substr(0, c.out.size()));
  std::filesystem::remove_all(dir);
}

TEST(Cli, ConjGrowth) {
  auto r = run("conjgrowth --max-length 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("n,lower,upper,exact\n0,1,1,1\n1,5,5,1\n", 0), 0u);
  EXPECT_EQ(run("conjgrowth --max-length 4 --threads 3").out, r.out);
  auto b = run("conjgrowth --max-length 4 --bounds");
  EXPECT_EQ(b.out.rfind("n,gamma,f_lower,f_upper,rho,env05,env767\n", 0), 0u);
}

TEST(Cli, AuditExitCodes) {
  auto r = run("audit palindrome --max-length 9");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"status\": \"pass\""), std::string::npos);
  EXPECT_EQ(run("audit no-such-lemma").code, 3);
  EXPECT_EQ(run("audit").code, 3);
  EXPECT_EQ(run("audit subwords --threads 0").code, 3);
  EXPECT_EQ(run("audit subwords --group " GRIGLAB_SOURCE_DIR "/presets/gupta-sidki-3.json").code, 3);
  EXPECT_EQ(run("audit bcw-rewrite --budget-seconds 0.000000001").code, 2);
  EXPECT_EQ(run("growth --group /nonexistent.json").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
}

TEST(Cli, WidthRows) {
  auto r = run("width a \"\" --mode conjugates --radius 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "length,element,status,factors,witness\n1,a,confirmed,1,a\n0,,confirmed,0,1\n");
  auto c = run("width \"[a,b]\" --mode commutators --radius 3");
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("4,abab,confirmed,1,\"["), std::string::npos);
  EXPECT_EQ(run("width a --mode bogus").code, 3);
  EXPECT_EQ(run("width \"[a,\"").code, 3);
}
