#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "tmlab/config.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic Trudinger-Moser numerical laboratory"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir, format, module;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  };
  const std::pair<const char*, const char*> commands[] = {
      {"verify", "run a module's invariant suite"},
      {"sweep", "growth of a theorem's ratio along the extremal sequence"},
      {"sup", "estimate supremum constants"},
      {"mu", "upper bounds on the discrete problem mu(h)"},
      {"symcheck", "rearrangement checks on random sampled functions"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (std::string(name) == "verify") sub->add_option("module", module, "module suite to run (default: all)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? tmlab::kExitOk : tmlab::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = config_path.empty() ? tmlab::ExperimentConfig{} : tmlab::ExperimentConfig::load(config_path);
    cfg.command = command;
    if (!module.empty()) cfg.module = module;
    if (!out_dir.empty()) cfg.output = out_dir;
    if (!format.empty()) cfg.format = format;
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    // Re-validate after the overrides.
    cfg = tmlab::ExperimentConfig::from_json(cfg.to_json());
    return tmlab::run_and_write(cfg, std::cout, std::cerr);
  } catch (const tmlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tmlab::kExitConfig;
  }
}
