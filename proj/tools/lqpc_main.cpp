// lqpc: command-line front end for the lqp_core analysis library.
//
// Subcommands: analyze <config>, table exp|power, lab <check>,
// presets cartan-hadamard.  `--show-defaults` prints every effective
// numeric default.  Exit codes: 0 conclusive or inconclusive, 1 malformed
// config or CLI usage, 2 any Unsupported verdict, 3 failed lab or table
// self-check.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lqp/report.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lqp::ConfigError("config error: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<lqp::Rational> parse_rate_list(const std::string& csv) {
  std::vector<lqp::Rational> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(lqp::Rational::parse(item));
    } catch (const std::exception& e) {
      throw lqp::ConfigError("config error at --rates: '" + item + "': " + e.what());
    }
  }
  if (out.empty()) throw lqp::ConfigError("config error at --rates: empty list");
  return out;
}

std::vector<long long> parse_grid_list(const std::string& csv) {
  std::vector<long long> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      const long long g = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing characters");
      out.push_back(g);
    } catch (const std::exception&) {
      throw lqp::ConfigError("config error at --grids: '" + item + "' is not an integer");
    }
  }
  return out;
}

/// Prints the human summary on stdout and, when requested, the JSON report
/// to a file or stdout.
int emit(const lqp::RunResult& result, const std::string& out_path, bool json_stdout) {
  if (json_stdout) {
    std::cout << lqp::render_report(result.report);
  } else {
    std::cout << result.text;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 1;
    }
    out << lqp::render_report(result.report);
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduced L_{q,p}-cohomology analyzer for twisted cylinders"};
  app.require_subcommand(0, 1);
  bool show_defaults = false;
  app.add_flag("--show-defaults", show_defaults, "print the defaults table and exit");

  std::string out_path;
  bool json_stdout = false;
  app.add_option("-o,--output", out_path, "write the JSON report to this path")
      ->expected(1);
  app.add_flag("--json", json_stdout, "print the JSON report on stdout instead of the summary");

  auto* analyze = app.add_subcommand("analyze", "classify the queries in a config file");
  analyze->fallthrough();
  std::string config_path;
  analyze->add_option("config", config_path, "JSON config file")->required();

  auto* table = app.add_subcommand("table", "reproduce a regime classification table");
  table->fallthrough();
  std::string family;
  table->add_option("family", family, "exp or power")
      ->required()
      ->check(CLI::IsMember({"exp", "power"}));
  long long nmax = 6;
  table->add_option("--nmax", nmax, "largest torus dimension (default 6)")
      ->check(CLI::PositiveNumber);
  std::string rates_csv = "1,2,3";
  table->add_option("--rates", rates_csv, "comma-separated rate values (default 1,2,3)");

  auto* lab = app.add_subcommand("lab", "run a discrete verification check");
  lab->fallthrough();
  std::string check;
  lab->add_option("check", check, "homotopy, ineq, norms or ddzero")
      ->required()
      ->check(CLI::IsMember({"homotopy", "ineq", "norms", "ddzero"}));
  std::string grids_csv = "32,64,128";
  lab->add_option("--grids", grids_csv, "comma-separated grid sizes (default 32,64,128)");
  long long lab_count = 0;
  lab->add_option("--count", lab_count, "number of random forms (0 = per-check default)");
  std::uint64_t seed = 1;
  lab->add_option("--seed", seed, "random seed (default 1)");
  double eps_disc = 0.02;
  lab->add_option("--eps-disc", eps_disc, "discretization slack for ineq (default 0.02)");

  auto* presets = app.add_subcommand("presets", "run a named preset analysis");
  presets->fallthrough();
  presets->require_subcommand(1);
  auto* ch = presets->add_subcommand("cartan-hadamard",
                                     "pinched-curvature vanishing degrees for H(m)");
  ch->fallthrough();
  long long m = 0;
  ch->add_option("--m", m, "manifold dimension")->required()->check(CLI::PositiveNumber);
  std::string p_str = "2";
  ch->add_option("--p", p_str, "integrability exponent p (default 2)");
  std::string q_str;
  ch->add_option("--q", q_str, "integrability exponent q (default p)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (show_defaults) {
      std::cout << lqp::defaults_json().dump(2) << "\n";
      return 0;
    }
    if (analyze->parsed()) {
      return emit(lqp::run_analyze_text(read_file(config_path)), out_path, json_stdout);
    }
    if (table->parsed()) {
      return emit(lqp::run_table(family, nmax, parse_rate_list(rates_csv)), out_path,
                  json_stdout);
    }
    if (lab->parsed()) {
      lqp::LabSettings settings;
      settings.check = check;
      settings.grids = parse_grid_list(grids_csv);
      settings.count = lab_count;
      settings.seed = seed;
      settings.eps_disc = eps_disc;
      return emit(lqp::run_lab(settings), out_path, json_stdout);
    }
    if (ch->parsed()) {
      const lqp::Rational p = lqp::Rational::parse(p_str);
      const lqp::Rational q = q_str.empty() ? p : lqp::Rational::parse(q_str);
      return emit(lqp::run_preset_cartan_hadamard(m, p, q), out_path, json_stdout);
    }
    std::cout << app.help();
    return 0;
  } catch (const lqp::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
