#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynspec/linalg.hpp"

namespace dynspec::cli {

using Json = nlohmann::ordered_json;

enum class SystemKind { finite_map, markov_shift, measure_system };

struct SystemDescriptor {
  SystemKind kind{};
  // finite_map
  std::vector<int> map;
  Vec psi;
  // markov_shift
  Mat adjacency;
  std::optional<Mat> rho;
  // measure_system
  Vec m;
  std::vector<int> beta;
  double p = 2.0;
};

struct JobConfig {
  SystemDescriptor system;
  std::string command;
  std::optional<Vec> phi;
  std::optional<Vec> mu;
  std::optional<Mat> psi_edges;  // edge weights for markov commands
  std::optional<Mat> a_edges;    // |a| for latushkin-stepin
  std::optional<double> p;
  std::optional<int> n_max;
  std::optional<double> radius;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "json";
};

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_max;
  std::optional<double> tol;
};

/// Parses a config file (JSON if the content starts with '{', else the TOML
/// subset) and validates it; unknown keys are rejected.  Throws
/// std::runtime_error with a message naming the offending field.
JobConfig parse_config_text(const std::string& text, const Overrides& overrides = {});
JobConfig parse_config_file(const std::string& path, const Overrides& overrides = {});

struct RunOutcome {
  int exit_code{};  // 0 ok, 2 validation error, 3 non-convergence
  Json report;
};

/// Executes the job; deterministic given (config, seed).  Validation failures
/// raise; numerical non-convergence is reported via exit_code 3 with the
/// report still populated.
RunOutcome run_job(const JobConfig& config);

/// Fixed-layout serializations (byte-identical across runs).
std::string report_to_json(const Json& report);
std::string report_to_csv(const Json& report);

}  // namespace dynspec::cli
