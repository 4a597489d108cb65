#include "drbqo/kernel.hpp"

#include <cmath>

namespace drbqo {

double scaled_sq_dist(const JointPoint& a, const JointPoint& b, const LengthScales& s) {
  if (a.x.size() != b.x.size() || a.w.size() != b.w.size() ||
      a.x.size() != s.theta.size() || a.w.size() != s.psi.size()) {
    throw std::invalid_argument("scaled_sq_dist: dimension mismatch");
  }
  const double dx = ((a.x - b.x).array() / s.theta.array()).matrix().squaredNorm();
  const double dw = ((a.w - b.w).array() / s.psi.array()).matrix().squaredNorm();
  return dx + dw;
}

double kernel_eval(const KernelSpec& spec, const JointPoint& a, const JointPoint& b) {
  const double d2 = scaled_sq_dist(a, b, spec.scales);
  switch (spec.family) {
    case KernelFamily::SquaredExponential:
      return std::exp(-d2);
    case KernelFamily::Matern12: {
      const double r = std::sqrt(1.0 * d2);  // sqrt(2*nu) * d with nu = 1/2
      return std::exp(-r);
    }
    case KernelFamily::Matern32: {
      const double r = std::sqrt(3.0 * d2);
      return (1.0 + r) * std::exp(-r);
    }
    case KernelFamily::Matern52: {
      const double r = std::sqrt(5.0 * d2);
      return (1.0 + r + r * r / 3.0) * std::exp(-r);
    }
  }
  throw std::invalid_argument("kernel_eval: unsupported kernel family");
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const std::vector<JointPoint>& points) {
  if (points.empty()) {
    throw std::invalid_argument("kernel_matrix: empty point sequence");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_eval(spec, points[static_cast<std::size_t>(i)],
                                   points[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace drbqo
