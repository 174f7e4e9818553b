#pragma once

// Numeric side of the growth results: the exponent σ, the measured
// stabilizer-fraction constant T, recursion checks and envelope
// diagnostics. Pure table transforms.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "conjugacy.hpp"

namespace griglab {

/// σ = log d / log(dM).
inline double sigma(double d, double M) {
  if (!(d >= 2) || !(M >= 1)) throw std::domain_error("sigma needs d >= 2 and M >= 1");
  return std::log(d) / std::log(d * M);
}

struct BoundParams {
  int d = 2;
  int M = 1;           // longest lift / generator length on a subtree
  int K_idx = 2;       // index of St(1)
  double T = 1;        // measured on data up to some N
  double Q() const { return T * K_idx; }
  double sigma() const { return griglab::sigma(d, M); }
};

struct StabilizerRow {
  int n;
  std::uint64_t gamma;
  std::uint64_t st1;
};

/// max_n γ(n) / |B(n) ∩ St(1)|: the least T valid on the data.
inline double estimate_T(const std::vector<StabilizerRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("estimate_T needs at least one row");
  double t = 0;
  for (const auto& r : rows) {
    if (r.st1 == 0) throw std::invalid_argument("row with no stabilizer elements");
    t = std::max(t, static_cast<double>(r.gamma) / static_cast<double>(r.st1));
  }
  return t;
}

struct RecursionCheck {
  int n;
  bool evaluated = false;
  bool pass = false;
  double lhs = 0, rhs = 0;  // f(4n), f(n)²/(2T)
  std::string note;
};

/// f(4n) ≥ f(n)² / (2T) for every n with exact rows at n and 4n.
inline std::vector<RecursionCheck> grig_recursion_audit(const std::vector<ConjGrowthRow>& f, double T) {
  std::map<int, const ConjGrowthRow*> by_n;
  for (const auto& r : f) by_n[r.n] = &r;
  std::vector<RecursionCheck> out;
  for (const auto& r : f) {
    auto it = by_n.find(4 * r.n);
    if (it == by_n.end()) continue;
    RecursionCheck c{r.n};
    if (!r.exact() || !it->second->exact()) {
      c.note = "skipped: bracket not collapsed";
      out.push_back(c);
      continue;
    }
    c.evaluated = true;
    c.lhs = static_cast<double>(it->second->lower);
    c.rhs = static_cast<double>(r.lower) * static_cast<double>(r.lower) / (2 * T);
    c.pass = c.lhs >= c.rhs;
    out.push_back(c);
  }
  return out;
}

struct EnvelopeRow {
  int n;
  std::uint64_t count;
  double rho, env05, env767;
};

/// ρ(n) = log log c / log n, and log c / n^0.5, log c / n^0.767. Rows with
/// n < 2 or c < 3 are skipped.
inline std::vector<EnvelopeRow> envelope_compare(const std::vector<std::pair<int, std::uint64_t>>& table) {
  std::vector<EnvelopeRow> out;
  for (auto [n, c] : table) {
    if (n < 2 || c < 3) continue;
    double lc = std::log(static_cast<double>(c));
    out.push_back({n, c, std::log(lc) / std::log(static_cast<double>(n)), lc / std::pow(n, 0.5),
                   lc / std::pow(n, 0.767)});
  }
  return out;
}

struct QuotientRow {
  int n;
  double over_upper, over_lower;  // γ/f_upper, γ/f_lower
};

inline std::vector<QuotientRow> quotient_table(const GrowthTable& gamma, const std::vector<ConjGrowthRow>& f) {
  std::vector<QuotientRow> out;
  for (const auto& r : f) {
    if (r.n < 0 || static_cast<std::size_t>(r.n) >= gamma.size()) continue;
    double g = static_cast<double>(gamma[r.n].gamma);
    out.push_back({r.n, g / static_cast<double>(r.upper), g / static_cast<double>(r.lower)});
  }
  return out;
}

/// Columns n,gamma,f_lower,f_upper,rho,env05,env767 (envelope of f_lower;
/// empty cells where the diagnostic is undefined).
inline std::string bounds_csv(const GrowthTable& gamma, const std::vector<ConjGrowthRow>& f) {
  std::vector<std::pair<int, std::uint64_t>> lower;
  for (const auto& r : f) lower.emplace_back(r.n, r.lower);
  std::map<int, EnvelopeRow> env;
  for (const auto& e : envelope_compare(lower)) env.emplace(e.n, e);
  std::ostringstream os;
  os << "n,gamma,f_lower,f_upper,rho,env05,env767\n";
  os << std::setprecision(6) << std::fixed;
  for (const auto& r : f) {
    os << r.n << ',' << gamma.at(r.n).gamma << ',' << r.lower << ',' << r.upper << ',';
    if (auto it = env.find(r.n); it != env.end())
      os << it->second.rho << ',' << it->second.env05 << ',' << it->second.env767;
    else
      os << ",,";
    os << '\n';
  }
  return os.str();
}

}  // namespace griglab
