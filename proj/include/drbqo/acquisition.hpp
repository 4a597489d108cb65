#pragma once

#include "drbqo/gp.hpp"
#include "drbqo/robust_weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace drbqo {

/// Axis-aligned box.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }

  static Box cube(int d, double lo_v, double hi_v) {
    return {Eigen::VectorXd::Constant(d, lo_v), Eigen::VectorXd::Constant(d, hi_v)};
  }
};

/// The fixed context sample set S_n; immutable for a whole run.
struct ContextSet {
  std::vector<Eigen::VectorXd> contexts;

  int size() const { return static_cast<int>(contexts.size()); }
};

enum class CandidateMode { FixedGrid, FreshUniform };

/// How decision candidates are generated each iteration. Previously visited
/// decisions are always appended to the candidate set.
struct CandidatePolicy {
  CandidateMode mode = CandidateMode::FreshUniform;
  int count = 64;
};

struct IterationRecord {
  int t = 0;
  Eigen::VectorXd x;  // queried decision
  int w_index = -1;   // queried context index into S_n
  double y = 0.0;
  Eigen::VectorXd report_x;
  double robust_value_at_report = 0.0;
};

enum class ReportMode { Robust, Empirical };

/// Black-box problem handle: f is evaluated on domain x contexts.
struct Problem {
  std::string name;
  int d = 0;
  int m = 0;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> f;
  Box domain;
  double noise_sd = 0.01;
};

struct RunConfig {
  int horizon = 60;  // T
  double rho = 1.0;
  std::uint64_t seed = 0;
  KernelFamily kernel = KernelFamily::SquaredExponential;
  double length_scale = 0.2;  // isotropic, on normalized inputs
  bool learn_scales = false;
  std::vector<double> scale_grid = {0.05, 0.1, 0.2, 0.4};
  CandidatePolicy candidates;
  int init_design = 0;  // 0 selects 12 for d = 2, 6*d otherwise
  std::size_t grid_cap = 4096;
  bool random_w = false;  // RandW ablation: w_t drawn uniformly from S_n
};

struct RunOutput {
  std::vector<IterationRecord> records;
  Eigen::VectorXd report_x;  // final report point (after initial design if T = 0)
  double report_robust_value = 0.0;
};

/// Index of the candidate maximizing the robust value of the sampled
/// function; ties broken by lowest index. sample covers candidates x contexts
/// in candidate-major order.
std::size_t drbqo_select_x(const FunctionSample& sample, const ContextSet& contexts,
                           const ChiSquareBall& ball, std::size_t n_candidates);

/// Index into S_n of the context with the highest posterior variance at x;
/// ties broken by lowest index.
int select_w_max_variance(const GPPosterior& gp, const Eigen::VectorXd& x,
                          const ContextSet& contexts);

/// Index into visited of the report point under the given mode; ties broken
/// by earliest visit.
std::size_t report_point(const GPPosterior& gp, const std::vector<Eigen::VectorXd>& visited,
                         const ContextSet& contexts, const ChiSquareBall& ball, ReportMode mode);

/// Full distributionally robust run (Algorithm: posterior sample, robust
/// surrogate argmax, max-variance context, observe, refit).
RunOutput drbqo_run(const Problem& problem, const ContextSet& contexts, const RunConfig& config);

}  // namespace drbqo
