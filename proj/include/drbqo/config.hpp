#pragma once

#include "drbqo/baselines.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace drbqo {

/// Malformed configuration; carries the offending line number (0 when the
/// error is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(message)
                                    : std::move(message)),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_ = 0;
};

struct ExperimentConfig {
  std::string problem = "logistic";  // logistic | branin | levy | hartmann3
  int d = 2;
  int n = 10;
  double noise_sd = 0.01;
  double domain_lo = std::numeric_limits<double>::quiet_NaN();  // optional box override
  double domain_hi = std::numeric_limits<double>::quiet_NaN();
  double context_sd = 0.1;  // shifted problems only

  std::vector<AlgorithmId> algorithms = {AlgorithmId::DRBQO, AlgorithmId::BQO_TS,
                                         AlgorithmId::BQO_EI};
  std::vector<double> rhos = {1.0};
  int horizon = 60;
  int repetitions = 10;
  std::uint64_t master_seed = 1;

  KernelFamily kernel = KernelFamily::SquaredExponential;
  double length_scale = 0.2;
  bool learn_scales = true;

  CandidateMode candidate_mode = CandidateMode::FreshUniform;
  int candidate_count = 64;
  std::size_t grid_cap = 4096;
  int init_design = 0;  // 0 selects the dimension-based default
  bool random_w = false;

  int regret_grid = 101;
  int jobs = 0;  // 0 selects hardware concurrency
  std::string output_dir = "out";
};

/// Parses the flat `key = value` format (one pair per line, `#` comments,
/// comma-separated lists). Unknown keys are rejected with their line number.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Resolved-config echo in the same key = value format.
std::string render_config(const ExperimentConfig& config);

}  // namespace drbqo
