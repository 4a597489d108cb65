#pragma once

#include "drbqo/baselines.hpp"
#include "drbqo/config.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace drbqo {

/// A synthetic problem plus the generator of its true context distribution.
struct SyntheticProblem {
  Problem problem;
  std::function<Eigen::VectorXd(std::mt19937_64&)> context_sampler;
};

/// f(x, w) = -log(1 + exp(x^T w)) on [-3, 3]^d with contexts drawn from the
/// standard Gaussian; evaluated in overflow-safe form.
std::pair<SyntheticProblem, ContextSet> logistic_problem(int d, int n, std::uint64_t seed);

/// Shifted standard test function on the unit cube: f(x, w) = base(clamp(x + w))
/// with contexts drawn from N(0, context_sd^2 I). base is one of
/// {Branin, Levy, Hartmann3}.
std::pair<SyntheticProblem, ContextSet> shifted_problem(const std::string& base, int d, int n,
                                                        std::uint64_t seed,
                                                        double context_sd = 0.1);

/// Ground-truth robust values on a dense decision grid; supports the
/// rho-regret metric via nearest-grid lookup.
struct RegretOracle {
  Box domain;
  int resolution = 0;
  std::vector<double> robust_values;  // row-major over the axis grid
  Eigen::VectorXd x_star;
  double g_star = 0.0;

  double robust_value_at(const Eigen::VectorXd& x) const;
  double regret(const Eigen::VectorXd& x) const { return g_star - robust_value_at(x); }
};

RegretOracle build_regret_oracle(const SyntheticProblem& problem, const ContextSet& contexts,
                                 const ChiSquareBall& ball, int resolution = 101);

struct RunResult {
  AlgorithmId algorithm = AlgorithmId::DRBQO;
  double rho = 0.0;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;
  std::vector<double> regret;     // per iteration, of the report point
  std::vector<double> empirical;  // per iteration, uniform average of true f
  double wall_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct SummaryRow {
  AlgorithmId algorithm = AlgorithmId::DRBQO;
  double rho = 0.0;
  int iteration = 0;
  double mean_regret = 0.0;
  double ci96_regret = 0.0;
  double mean_empirical = 0.0;
  double ci96_empirical = 0.0;
  double log10_mean_regret = 0.0;
};

struct ExperimentOutput {
  std::vector<RunResult> results;
  std::vector<SummaryRow> summary;
  bool any_failed = false;
};

/// Runs every (algorithm, rho, repetition) cell with repetition-derived seeds
/// shared across algorithms, up to config.jobs runs concurrently. Output is
/// ordered by (algorithm, rho, repetition) regardless of completion order.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Summary statistics recomputed from per-run metric traces (mean, 96% normal
/// half-width 1.7507 * sd / sqrt(R), log10 of the mean with floor 1e-12).
std::vector<SummaryRow> summarize(const std::vector<RunResult>& results);

}  // namespace drbqo
