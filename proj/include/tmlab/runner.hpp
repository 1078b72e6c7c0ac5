#pragma once

// Config-driven commands behind the tmlab executable.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tmlab/config.hpp"

namespace tmlab {

/// One invariant evaluated by a verify suite: passes when
/// `value <relation> bound` ("<=" or ">=").
struct Check {
  std::string module;
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation = "<=";
  bool pass = false;
};

Check make_check(std::string module, std::string name, double value, std::string relation, double bound);

/// Invariant suite of one module ("all" runs every suite in a fixed order).
std::vector<Check> verify_suite(const std::string& module, const ExperimentConfig& config);

/// Exit codes of the command-line runner.
enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitConfig = 2, kExitConvergence = 3 };

/// A rectangular result set: written as CSV or inside the JSON report.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
};

struct RunResult {
  int exit_code = kExitOk;
  Table table;
  nlohmann::json report;  // command-specific details
  std::string summary;    // one-line human summary
};

/// Runs the configured command without touching the file system.
RunResult run(const ExperimentConfig& config);

/// Runs and writes <output>/<command>.<format> plus <output>/config.json.
/// Maps exceptions to exit codes and prints diagnostics to `err`.
int run_and_write(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits (nan, inf, -inf spelled out).
std::string format_double(double x);

}  // namespace tmlab
