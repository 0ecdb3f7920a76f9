#pragma once
// Config ingestion, batch analysis, regime-table reproduction, lab runs and
// machine-readable reports.  Reports are byte-identical for identical
// config + seed: no timestamps, no environment-dependent fields.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lqp/criteria.hpp"

namespace lqp {

using OrderedJson = nlohmann::ordered_json;

/// Malformed config document.  The message carries the offending field path
/// (or byte position for syntax errors).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LabSettings {
  std::string check;                        // homotopy | ineq | norms | ddzero
  std::vector<long long> grids = {32, 64, 128};
  long long count = 0;                      // 0 picks the per-check default
  std::uint64_t seed = 1;
  double eps_disc = 0.02;
};

struct RunResult {
  OrderedJson report;
  std::string text;     // human-readable summary, also deterministic
  int exit_code = 0;    // 0 ok, 2 any Unsupported, 3 failed lab/table check
};

/// Every effective numeric default in one table.
OrderedJson defaults_json();

/// Full config document -> one Verdict per query.
RunResult run_analyze(const OrderedJson& config);
/// Same, from raw text; syntax errors surface as ConfigError with position.
RunResult run_analyze_text(const std::string& config_text);

/// Regime classification grid for the exp ("exp") or power ("power") family,
/// cross-checked against a direct transliteration of the case lists.
RunResult run_table(const std::string& family, long long nmax, const std::vector<Rational>& rates);

RunResult run_lab(const LabSettings& settings);

/// All degrees 0..m for the constant-curvature hyperbolic model.
RunResult run_preset_cartan_hadamard(long long m, const Rational& p, const Rational& q);

/// Stable serialization: two-space indent plus trailing newline.
std::string render_report(const OrderedJson& report);

}  // namespace lqp
