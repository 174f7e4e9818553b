// griglab: growth tables, conjugacy brackets, lemma audits and width searches.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <griglab.hpp>

namespace fs = std::filesystem;
using namespace griglab;
using nlohmann::json;

namespace {

constexpr int kUsageError = 3;

struct RunConfig {
  std::string group = "grigorchuk";
  int max_length = -1;
  int depth = -1;
  int radius = -1;
  unsigned threads = 1;
  std::string cache_dir;
  std::string format = "csv";
  std::uint64_t seed = 1;
  double budget_seconds = 0;
  std::string output;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string cache_path(const RunConfig& cfg, const Group& g) {
  return (fs::path(cfg.cache_dir) / (g.preset().name + "-" + hex64(fingerprint(g.preset())) + ".ballv1")).string();
}

/// Ball of radius ≥ n (exactly n when `exact`), reusing and refreshing the
/// cache when one is configured.
Ball obtain_ball(const RunConfig& cfg, const Group& g, const WordRewriter& rw, int n, bool exact) {
  BallOptions opt{cfg.threads};
  if (cfg.cache_dir.empty()) return ball(g, rw, n, opt);
  const std::string path = cache_path(cfg, g);
  if (fs::exists(path)) {
    try {
      Ball b = load_ball(path, g, rw);
      if (b.radius() == n || (!exact && b.radius() > n)) return b;
      if (b.radius() < n) {
        b.extend_to(n, opt);
        save_ball(b, path);
        return b;
      }
      return ball(g, rw, n, opt);  // cached ball larger than requested
    } catch (const CacheError& e) {
      std::cerr << "griglab: ignoring cache " << path << ": " << e.what() << "\n";
    }
  }
  Ball b = ball(g, rw, n, opt);
  fs::create_directories(cfg.cache_dir);
  save_ball(b, path);
  return b;
}

/// Quotes a CSV field when it holds a separator or a quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw UsageError("cannot write " + cfg.output);
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_growth(const RunConfig& cfg, bool verify) {
  Group g(load_preset(cfg.group));
  WordRewriter rw(g);
  const int N = AuditConfig::pick(cfg.max_length, 8);
  GrowthTable t = growth_from_ball(obtain_ball(cfg, g, rw, N, false), N);
  if (verify) {
    GrowthTable o = level_action_growth(g, rw, N, oracle_depth(N));
    for (int n = 0; n <= N; ++n)
      if (o[n].gamma != t[n].gamma)
        throw std::logic_error("level-action oracle disagrees at n=" + std::to_string(n));
  }
  if (cfg.format == "json") {
    json rows = json::array();
    for (const auto& r : t) rows.push_back({{"n", r.n}, {"gamma", r.gamma}});
    emit(cfg, dump({{"group", g.preset().name}, {"rows", rows}}));
  } else {
    std::ostringstream os;
    os << "n,gamma\n";
    for (const auto& r : t) os << r.n << ',' << r.gamma << '\n';
    emit(cfg, os.str());
  }
  return 0;
}

int cmd_conjgrowth(const RunConfig& cfg, int quotient_level, bool with_bounds) {
  Group g(load_preset(cfg.group));
  WordRewriter rw(g);
  const int N = AuditConfig::pick(cfg.max_length, 8);
  const int m = AuditConfig::pick(cfg.depth, 8);
  const int R = AuditConfig::pick(cfg.radius, 6);
  Ball b = obtain_ball(cfg, g, rw, N, true);
  if (quotient_level < 0) quotient_level = enrichment_level(g, rw);
  std::optional<LevelQuotient> q;
  if (quotient_level > 0) q.emplace(g, rw, quotient_level);
  ClassPartition cp(b, m, R, rw, cfg.threads, q ? &*q : nullptr);
  auto rows = conj_growth_rows(cp, N);

  if (with_bounds) {
    if (cfg.format == "json") throw UsageError("--bounds writes CSV only");
    emit(cfg, bounds_csv(growth_from_ball(b, N), rows));
    return 0;
  }
  if (cfg.format == "json") {
    json jr = json::array(), jw = json::array();
    for (const auto& r : rows)
      jr.push_back({{"n", r.n}, {"lower", r.lower}, {"upper", r.upper}, {"exact", r.exact()}});
    for (const auto& w : cp.witnesses())
      jw.push_back({{"from", b[w.from].word}, {"to", b[w.to].word}, {"conjugator", w.conjugator}});
    emit(cfg, dump({{"group", g.preset().name}, {"depth", m}, {"radius", R}, {"quotient_level", quotient_level},
                    {"rows", jr}, {"merges", jw}}));
  } else {
    std::ostringstream os;
    os << "n,lower,upper,exact\n";
    for (const auto& r : rows) os << r.n << ',' << r.lower << ',' << r.upper << ',' << (r.exact() ? 1 : 0) << '\n';
    emit(cfg, os.str());
  }
  return 0;
}

int cmd_audit(const RunConfig& cfg, const std::string& lemma) {
  if (lemma != "all") {
    const auto& names = audit_lemmas();
    if (std::find(names.begin(), names.end(), lemma) == names.end())
      throw UsageError("unknown lemma '" + lemma + "'");
  }
  Group g(load_preset(cfg.group));
  AuditConfig ac;
  ac.max_length = cfg.max_length;
  ac.depth = cfg.depth;
  ac.radius = cfg.radius;
  ac.threads = cfg.threads;
  ac.seed = cfg.seed;
  ac.budget_seconds = cfg.budget_seconds;
  AuditContext ctx(g, ac);
  std::vector<AuditReport> reports;
  try {
    reports = run_audit(ctx, lemma);
  } catch (const WordError& e) {
    throw UsageError(e.what());
  }
  AuditStatus s = combined_status(reports);
  if (lemma == "all") {
    json all = json::array();
    for (const auto& r : reports) all.push_back(r.to_json());
    emit(cfg, dump({{"lemma", "all"}, {"status", to_string(s)}, {"reports", all}}));
  } else {
    emit(cfg, dump(reports.front().to_json()));
  }
  return exit_code(s);
}

int cmd_width(const RunConfig& cfg, const std::vector<std::string>& targets, const std::string& mode,
              int max_factors, std::string bases) {
  Group g(load_preset(cfg.group));
  WordRewriter rw(g);
  SearchBudget budget;
  budget.radius = AuditConfig::pick(cfg.radius, mode == "palindromes" ? 4 : 6);
  budget.max_factors = max_factors;
  budget.seconds = cfg.budget_seconds;
  budget.threads = cfg.threads;
  std::optional<FactorSet> set;
  if (mode == "conjugates")
    set.emplace(conjugate_set(rw, bases.empty() ? g.alphabet() : bases, budget.radius, cfg.threads));
  else if (mode == "commutators")
    set.emplace(commutator_set(rw, budget.radius, cfg.threads));
  else
    set.emplace(palindrome_set(rw, budget.radius));
  ProductSearch search(*set, cfg.threads);

  json rows = json::array();
  std::ostringstream os;
  os << "length,element,status,factors,witness\n";
  for (const auto& text : targets) {
    std::string word = rw.reduce(parse_target(g, text));
    Element x = g.eval(word);
    Ball b = ball(g, rw, static_cast<int>(word.size()), {cfg.threads});
    std::size_t i = *b.index_of(x);
    WidthResult w = detail::run_search(search, x, budget);
    bool ok = w.status == WidthStatus::Confirmed;
    std::string factors = ok ? std::to_string(w.expr.size()) : "";
    std::string witness = ok ? w.expr.to_string() : "";
    os << b[i].length << ',' << csv_field(b[i].word) << ',' << to_string(w.status) << ',' << factors << ','
       << csv_field(witness) << '\n';
    json row{{"target", text}, {"length", b[i].length}, {"element", b[i].word}, {"status", to_string(w.status)}};
    if (ok) {
      row["factors"] = w.expr.size();
      row["witness"] = witness;
    }
    rows.push_back(row);
  }
  if (cfg.format == "json")
    emit(cfg, dump({{"mode", mode}, {"radius", budget.radius}, {"max_factors", max_factors}, {"rows", rows}}));
  else
    emit(cfg, os.str());
  return 0;
}

void validate(const RunConfig& cfg) {
  if (cfg.threads == 0) throw UsageError("--threads must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json");
  if (cfg.budget_seconds < 0) throw UsageError("--budget-seconds must be non-negative");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"griglab: computations in self-similar groups"};
  app.require_subcommand(1);
  app.allow_extras();
  RunConfig cfg;
  if (const char* env = std::getenv("GRIGLAB_CACHE")) cfg.cache_dir = env;

  app.add_option("--group", cfg.group, "preset name or asg-1 JSON file")->capture_default_str();
  app.add_option("--max-length", cfg.max_length, "largest word length / radius N")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--depth", cfg.depth, "invariant depth m")->check(CLI::NonNegativeNumber);
  app.add_option("--radius", cfg.radius, "conjugator / factor radius R")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  app.add_option("--cache-dir", cfg.cache_dir, "ball cache directory (default: $GRIGLAB_CACHE)");
  app.add_option("--format", cfg.format, "csv or json")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for sampled audits")->capture_default_str();
  app.add_option("--budget-seconds", cfg.budget_seconds, "time budget per audit / search (0 = none)");
  app.add_option("-o,--output", cfg.output, "write to a file instead of stdout");

  auto* growth = app.add_subcommand("growth", "growth table n,gamma");
  bool verify = false;
  growth->add_flag("--verify", verify, "cross-check against the level-action oracle");

  auto* conj = app.add_subcommand("conjgrowth", "conjugacy growth bracket n,lower,upper,exact");
  int quotient_level = -1;
  bool with_bounds = false;
  conj->add_option("--quotient-level", quotient_level, "invariant enrichment level (-1 auto, 0 off)");
  conj->add_flag("--bounds", with_bounds, "emit n,gamma,f_lower,f_upper,rho,env05,env767");

  auto* audit = app.add_subcommand("audit", "lemma audit, JSON report");
  std::string lemma;
  audit->add_option("lemma", lemma, "subwords|comm-k|comm-g|bcw-rewrite|palindrome|dihedral|recursion|assembly|all")
      ->required();

  auto* width = app.add_subcommand("width", "bounded width search");
  std::vector<std::string> targets;
  std::string mode = "conjugates", bases;
  int max_factors = 4;
  // targets are taken raw so that "[a,b]" is not split as a CLI11 list
  width->allow_extras();
  width->footer("Targets: words such as a, \"[a,b]\", \"(ad)^2\"; several may be given.");
  width->add_option("--mode", mode, "conjugates|commutators|palindromes")
      ->check(CLI::IsMember({"conjugates", "commutators", "palindromes"}))
      ->capture_default_str();
  width->add_option("--max-factors", max_factors, "at most 5")->check(CLI::Range(0, 5))->capture_default_str();
  width->add_option("--bases", bases, "conjugated letters (default: all generators)");

  for (auto* sub : {growth, conj, audit, width}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    validate(cfg);
    if (!width->parsed() && !app.remaining().empty())
      throw UsageError("unexpected argument '" + app.remaining().front() + "'");
    if (growth->parsed()) return cmd_growth(cfg, verify);
    if (conj->parsed()) return cmd_conjgrowth(cfg, quotient_level, with_bounds);
    if (audit->parsed()) return cmd_audit(cfg, lemma);
    if (width->parsed()) {
      targets = width->remaining();
      if (targets.empty()) targets = app.remaining();
      if (targets.empty()) throw UsageError("width needs at least one target");
      for (const auto& t : targets)
        if (t.size() > 1 && t[0] == '-' && t[1] == '-') throw UsageError("unknown option " + t);
      return cmd_width(cfg, targets, mode, max_factors, bases);
    }
  } catch (const UsageError& e) {
    std::cerr << "griglab: " << e.what() << "\n";
    return kUsageError;
  } catch (const PresetError& e) {
    std::cerr << "griglab: " << e.what() << "\n";
    return kUsageError;
  } catch (const WordError& e) {
    std::cerr << "griglab: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "griglab: error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
