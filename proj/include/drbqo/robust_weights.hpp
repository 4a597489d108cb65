#pragma once

#include <Eigen/Dense>

#include <vector>

namespace drbqo {

/// Ambiguity set {p in simplex : n * ||p||^2 <= 2*rho + 1} over n fixed contexts.
struct ChiSquareBall {
  int n = 0;
  double rho = 0.0;

  /// Radius at which the ball covers the whole simplex.
  double full_simplex_radius() const { return (n - 1) / 2.0; }
};

/// Weights induced by a fixed multiplier lambda > 0 together with the
/// consistent eta and active set.
struct WeightsAtLambda {
  Eigen::VectorXd p;
  double eta = 0.0;
  std::vector<int> active;
};

/// Minimizer of p^T l over the chi-square ball with KKT certificates.
struct RobustSolution {
  Eigen::VectorXd p;
  double lam = 0.0;
  double eta = 0.0;
  std::vector<int> active;
  double value = 0.0;
};

struct RobustGradient {
  Eigen::VectorXd grad;
  bool subgradient = false;  // true when the minimizer is not unique
};

struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
};

/// Solves eta and the active set for a fixed lambda > 0 so that the returned
/// weights p_i = max(-l_i - eta, 0) / (n * lambda) sum to one.
WeightsAtLambda weights_given_lambda(const Eigen::VectorXd& l, const ChiSquareBall& ball,
                                     double lam);

/// Upper bound on the optimal multiplier lambda; requires rho > 0.
double lambda_upper_bound(const Eigen::VectorXd& l, const ChiSquareBall& ball);

/// Exact inner minimization min_{p in ball} p^T l via bisection on lambda.
/// eps <= 0 selects the default bracket tolerance 1e-12 * (1 + bound).
RobustSolution solve(const Eigen::VectorXd& l, const ChiSquareBall& ball, double eps = -1.0);

/// Gradient of the robust value with respect to the decision variable,
/// given per-component gradients dl_dx (n x d). Uses the minimizing weights
/// (envelope theorem); flagged as a subgradient when the minimizer is not unique.
RobustGradient robust_value_gradient(const Eigen::VectorXd& l, const Eigen::MatrixXd& dl_dx,
                                     const ChiSquareBall& ball);

/// Variance sandwich on the gap between the empirical mean and the robust
/// value for samples z in [m0, m1].
SandwichBounds variance_sandwich_bounds(const Eigen::VectorXd& z, double m0, double m1,
                                        const ChiSquareBall& ball);

/// Grid enumeration of the simplex at the given resolution; n <= 4 only.
double brute_force_oracle(const Eigen::VectorXd& l, const ChiSquareBall& ball, double step);

}  // namespace drbqo
