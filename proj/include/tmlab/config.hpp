#pragma once

// Experiment configuration: a JSON document describing one runner command.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tmlab/finsler.hpp"
#include "tmlab/functionals.hpp"
#include "tmlab/supsearch.hpp"

namespace tmlab {

struct SupConfig {
  std::string kind = "identity";  // atmsc, atmc, identity, atmc_growth
  std::string family = "moser";
  int knots = 4;                   // moser_perturbed only
  std::size_t budget = 400;
  // relative to lambda_N
  std::vector<double> lambda_grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5,
                                  0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99};
};

struct MuConfig {
  std::vector<double> h{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  std::size_t K = 0;  // 0 selects the default truncation
  int starts = 8;
};

struct SymcheckConfig {
  std::size_t cells = 128;
  std::size_t count = 20;
  std::size_t stride = 0;  // 0 selects the default
};

struct ExperimentConfig {
  std::string command = "verify";  // verify, sweep, sup, mu, symcheck
  std::string module = "all";      // verify target
  nlohmann::json gauge{{"form", "pnorm"}, {"N", 2}, {"p", 2.0}};
  TMParams params;
  // When set, params.lambda is replaced by lambda_rel * lambda_N of the gauge.
  std::optional<double> lambda_rel;
  Theorem theorem = Theorem::T11;
  std::vector<double> n_list{4, 8, 16, 32, 64};
  std::string fit_target;
  std::string fit_mode;
  std::size_t fit_skip = 0;
  SupConfig sup;
  MuConfig mu;
  SymcheckConfig symcheck;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string output = "out";
  std::string format = "json";

  /// Rejects unknown keys and enforces the parameter invariants.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Parses text; syntax errors report line and column.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string emit() const;

  Gauge make_gauge() const;
  /// params with lambda resolved against the gauge constants.
  TMParams resolved_params(const GaugeConstants& c) const;
  ProfileFamily make_family() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace tmlab
