// Command-line experiment harness.
//
//   edmlab run --config cfg.json [--seed S] [--out DIR]
//   edmlab list
//   edmlab validate --config cfg.json
//
// Exit codes: 0 success, 1 experiment failure, 2 usage or config error.
// EDMLAB_THREADS caps trial-level parallelism.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "edm/experiments.hpp"

namespace ex = edm::experiments;

int main(int argc, char** argv) {
  CLI::App app{"energy-based dynamical model experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  long long seed_override = -1;
  std::string out_override;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("--config", config_path, "path to the experiment config")->required();
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--out", out_override, "override the output directory");

  app.add_subcommand("list", "list registered experiments");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "path to the experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& info : ex::registry())
        std::printf("%-24s %s\n", info.name.c_str(), info.description.c_str());
      return 0;
    }

    ex::ExperimentConfig cfg;
    try {
      cfg = ex::load_config_file(config_path);
    } catch (const edm::ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 2;
    }
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (app.got_subcommand("validate")) {
      std::printf("config ok: experiment=%s seed=%llu\n", cfg.experiment.c_str(),
                  static_cast<unsigned long long>(cfg.seed));
      return 0;
    }

    if (cfg.out_dir.empty()) cfg.out_dir = "out/" + cfg.experiment;
    ex::ExperimentReport rep = ex::run_experiment(cfg);
    std::printf("experiment: %s (seed %llu)\n", rep.experiment.c_str(),
                static_cast<unsigned long long>(rep.seed));
    for (const auto& [k, v] : rep.summary) std::printf("  %-28s %s\n", k.c_str(), v.c_str());
    std::printf("  %-28s %.3f\n", "runtime_seconds", rep.runtime_seconds);
    for (const auto& f : rep.written_files) std::printf("wrote %s\n", f.c_str());
    return 0;
  } catch (const edm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
