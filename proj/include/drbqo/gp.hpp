#pragma once

#include "drbqo/kernel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace drbqo {

struct Observation {
  JointPoint point;
  double y = 0.0;
};

/// One joint draw from the posterior on a finite grid of joint points.
struct FunctionSample {
  std::vector<JointPoint> grid;
  Eigen::VectorXd values;
};

struct GPFitOptions {
  /// Standardize observations to zero mean / unit variance inside fit;
  /// inverted on prediction.
  bool standardize_y = false;
  /// Diagonal jitter ladder tried before declaring a factorization failure.
  std::vector<double> jitter_ladder = {0.0, 1e-10, 1e-8, 1e-6};
};

/// Exact GP regression state over joint (decision, context) points with a
/// zero-mean prior and unit signal variance.
class GPPosterior {
 public:
  /// Prior (no observations).
  GPPosterior(KernelSpec spec, double noise_var);

  static GPPosterior fit(KernelSpec spec, double noise_var, std::vector<Observation> data,
                         GPFitOptions options = {});

  /// Posterior mean at a and posterior covariance between a and b.
  std::pair<double, double> mean_cov(const JointPoint& a, const JointPoint& b) const;

  double mean(const JointPoint& a) const;
  double variance(const JointPoint& a) const;

  /// One joint multivariate-normal draw of the posterior on the grid.
  /// Deterministic given the seed. grid.size() must not exceed grid_cap.
  FunctionSample sample_on_grid(const std::vector<JointPoint>& grid, std::uint64_t seed,
                                std::size_t grid_cap = 2048) const;

  /// E[sum_i weights_i f(x, w_i)] under the posterior; weights must lie in
  /// the simplex within 1e-6.
  double quadrature_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& weights,
                         const std::vector<Eigen::VectorXd>& contexts) const;

  /// Var[sum_i weights_i f(x, w_i)]; clamped at zero against roundoff.
  double quadrature_variance(const Eigen::VectorXd& x, const Eigen::VectorXd& weights,
                             const std::vector<Eigen::VectorXd>& contexts) const;

  /// Log evidence of the observations under GP(0, K + noise_var I).
  double log_marginal_likelihood() const;

  const KernelSpec& spec() const { return spec_; }
  double noise_var() const { return noise_var_; }
  const std::vector<Observation>& data() const { return data_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  KernelSpec spec_;
  double noise_var_ = 0.0;
  std::vector<Observation> data_;
  Eigen::MatrixXd chol_;   // lower factor of K + noise_var I + jitter I
  Eigen::VectorXd alpha_;  // (K + noise_var I)^{-1} y (standardized units)
  double y_shift_ = 0.0;
  double y_scale_ = 1.0;

  Eigen::VectorXd cross_kernel(const JointPoint& a) const;
};

}  // namespace drbqo
