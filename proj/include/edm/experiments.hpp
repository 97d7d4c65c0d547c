#pragma once

// Experiment harness: named, seeded, reproducible runs over the model
// library. Every run is deterministic given (config, seed); trial t of a
// Monte Carlo loop draws from its own stream seeded seed^t, and all
// aggregation is order-independent, so thread count never changes output
// bytes.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "edm/mathcore.hpp"
#include "edm/parallel.hpp"

namespace edm::experiments {

using json = nlohmann::json;

struct CsvTable {
  std::string name;    // file stem suffix: <experiment>_<name>.csv
  std::string header;
  std::vector<std::string> rows;
  std::string to_string() const;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  json params = json::object();
  std::string out_dir;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, std::string>> summary;
  double runtime_seconds = 0.0;  // echoed to the terminal, never to files
  json config_echo;
  std::vector<std::string> written_files;

  const CsvTable* find_table(const std::string& name) const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
};

std::vector<ExperimentInfo> registry();

// Strict parse: unknown top-level keys, unknown experiments, and unknown
// or ill-typed params are all ConfigError.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config_file(const std::string& path);
void validate(const ExperimentConfig& cfg);

// Effective parameters: declared defaults overlaid with the config's.
json effective_params(const ExperimentConfig& cfg);

// Runs the experiment and writes <experiment>_<table>.csv files plus
// config_echo.json into out_dir (created if missing). Partial outputs are
// removed if anything throws mid-write.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// kinds: capacity_curve, stability_histogram, trajectory. Writes
// <experiment>_<kind>.csv into out_dir and returns the path.
std::string emit_plotdata(const ExperimentReport& report, const std::string& kind,
                          const std::string& out_dir);

// Shared Monte Carlo kernel: single-sweep bit-error rate of a power-n
// dense memory, swept over pattern counts. Per trial, start at the first
// of K fresh random patterns, run one full random-order asynchronous
// sweep, and count the bits that left the pattern. k_star interpolates
// the first epsilon crossing on the grid (NaN if never crossed).
struct CrossoverResult {
  std::vector<std::pair<int, double>> rates;  // (K, bit error rate)
  double k_star = 0.0;
};
CrossoverResult bit_error_crossover(int n_dim, const std::vector<int>& ks, int n_power, int trials,
                                    double epsilon, std::uint64_t seed,
                                    Exec exec = Exec::Parallel);

// Least-squares slope of y against x.
double regression_slope(const Vec& x, const Vec& y);

// One-sided Welch test (normal approximation) that mean(a) < mean(b).
double welch_p_less(const Vec& a, const Vec& b);

std::string format_value(double v);

}  // namespace edm::experiments
