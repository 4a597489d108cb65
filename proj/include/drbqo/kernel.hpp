#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace drbqo {

/// A point in the product space of decision (x) and context (w) vectors.
struct JointPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
};

/// Per-dimension length scales for the decision and context blocks.
struct LengthScales {
  Eigen::VectorXd theta;  // decision block, all entries > 0
  Eigen::VectorXd psi;    // context block, all entries > 0

  static LengthScales isotropic(int d, int m, double scale = 0.2) {
    if (d < 1 || m < 1 || !(scale > 0.0)) {
      throw std::invalid_argument("LengthScales::isotropic: d, m >= 1 and scale > 0 required");
    }
    return {Eigen::VectorXd::Constant(d, scale), Eigen::VectorXd::Constant(m, scale)};
  }
};

enum class KernelFamily {
  SquaredExponential,
  Matern12,
  Matern32,
  Matern52,
};

/// Unit-signal-variance covariance on the joint space. Values lie in [0, 1]
/// and equal 1 at identical points.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  LengthScales scales;
};

/// Length-scale weighted squared distance between two joint points.
double scaled_sq_dist(const JointPoint& a, const JointPoint& b, const LengthScales& s);

double kernel_eval(const KernelSpec& spec, const JointPoint& a, const JointPoint& b);

/// Gram matrix of the point set; symmetric with unit diagonal.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const std::vector<JointPoint>& points);

}  // namespace drbqo
