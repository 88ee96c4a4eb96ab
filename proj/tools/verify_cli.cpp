// Command-line harness for the verification suites: runs named suites with
// chosen dimensions, trial counts, seeds and tolerances, and emits
// machine-readable JSON (and optionally CSV) reports.
//
// Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
// configuration error, 3 internal solver failure (report still written).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manifolds/verify/registry.hpp"

namespace {

namespace fs = std::filesystem;
using manifolds::verify::SuiteConfig;
using manifolds::verify::SuiteReport;

bool parse_tolerance(const std::string& arg, std::string* name, double* value) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  *name = arg.substr(0, eq);
  try {
    std::size_t used = 0;
    *value = std::stod(arg.substr(eq + 1), &used);
    if (used != arg.size() - eq - 1) return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
}

void emit_report(const SuiteReport& report, const std::string& out_path,
                 const std::string& csv_path, bool multi) {
  const std::string body = report.to_json().dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << body;
  } else if (multi) {
    write_text(fs::path(out_path) / (report.suite_name + ".json"), body);
  } else {
    write_text(out_path, body);
  }
  if (!csv_path.empty()) {
    if (multi) {
      write_text(fs::path(csv_path) / (report.suite_name + ".csv"), report.to_csv());
    } else {
      write_text(csv_path, report.to_csv());
    }
  }
}

void print_summary(const SuiteReport& report) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : report.checks) worst = std::min(worst, c.margin);
  std::cerr << (report.passed ? "[PASS] " : "[FAIL] ") << report.suite_name << "  checks="
            << report.checks.size() << "  worst_margin=" << worst
            << "  runtime_ms=" << report.runtime_ms;
  if (!report.error.empty()) std::cerr << "  error=" << report.error;
  std::cerr << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification suites for Stiefel/Grassmann geometry, discrete isometric "
               "actions and constant-curvature models"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "list registered suites and what each verifies");

  std::string suite;
  int n = 0, p = 0, k = 0, window = 0, trials = 0;
  std::uint64_t seed = 20260810ull;
  std::vector<std::string> tol_args;
  std::string out_path, csv_path;
  auto* verify_cmd = app.add_subcommand("verify", "run one suite by name, or 'all'");
  verify_cmd->add_option("suite", suite, "suite name or 'all'")->required();
  verify_cmd->add_option("--n", n, "truncation dimension");
  verify_cmd->add_option("--p", p, "frame width");
  verify_cmd->add_option("--k", k, "free rank");
  verify_cmd->add_option("--window", window, "l2 window radius");
  verify_cmd->add_option("--trials", trials, "trials per suite");
  verify_cmd->add_option("--seed", seed, "64-bit seed (VERIFY_SEED overrides)");
  verify_cmd->add_option("--tol", tol_args, "tolerance override NAME=FLOAT");
  verify_cmd->add_option("--out", out_path, "report path (directory when running 'all')");
  verify_cmd->add_option("--csv", csv_path, "CSV path (directory when running 'all')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_cmd->parsed()) {
    for (const auto& [name, statement] : manifolds::verify::list_suites())
      std::cout << name << "\t" << statement << "\n";
    return 0;
  }

  if (const char* env_seed = std::getenv("VERIFY_SEED")) {
    char* end = nullptr;
    const std::uint64_t parsed = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0') {
      std::cerr << "error: VERIFY_SEED is not an unsigned integer\n";
      return 2;
    }
    seed = parsed;
  }

  SuiteConfig base;
  base.dims = {n, p, k, window};
  base.trials = trials;
  base.seed = seed;
  base.output_path = out_path;
  base.csv_path = csv_path;
  for (const auto& arg : tol_args) {
    std::string name;
    double value = 0.0;
    if (!parse_tolerance(arg, &name, &value)) {
      std::cerr << "error: bad --tol argument '" << arg << "' (expected NAME=FLOAT)\n";
      return 2;
    }
    base.tolerances[name] = value;
  }

  std::vector<std::string> names;
  if (suite == "all") {
    for (const auto& info : manifolds::verify::suite_registry()) names.push_back(info.name);
  } else {
    if (manifolds::verify::find_suite(suite) == nullptr) {
      std::cerr << "error: unknown suite '" << suite << "' (see `list`)\n";
      return 2;
    }
    names.push_back(suite);
  }

  bool any_failed = false;
  bool any_internal = false;
  for (const auto& name : names) {
    SuiteConfig config = base;
    config.suite_name = name;
    SuiteReport report;
    try {
      report = manifolds::verify::run_suite(config);
    } catch (const manifolds::verify::UnknownSuiteError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const manifolds::verify::ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    emit_report(report, out_path, csv_path, suite == "all");
    print_summary(report);
    any_failed = any_failed || !report.passed;
    any_internal = any_internal || !report.error.empty();
  }
  if (any_internal) return 3;
  return any_failed ? 1 : 0;
}
