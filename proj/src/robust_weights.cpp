#include "drbqo/robust_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace drbqo {

namespace {

void check_instance(const Eigen::VectorXd& l, const ChiSquareBall& ball) {
  if (ball.n < 1 || l.size() != ball.n) {
    throw std::invalid_argument("chi-square ball size does not match l");
  }
  if (!l.allFinite()) {
    throw std::invalid_argument("l contains non-finite entries");
  }
  if (!(ball.rho >= 0.0)) {
    throw std::invalid_argument("rho must be nonnegative");
  }
}

RobustSolution uniform_solution(const Eigen::VectorXd& l, double eta) {
  const int n = static_cast<int>(l.size());
  RobustSolution sol;
  sol.p = Eigen::VectorXd::Constant(n, 1.0 / n);
  sol.lam = 0.0;
  sol.eta = eta;
  sol.active.resize(n);
  std::iota(sol.active.begin(), sol.active.end(), 0);
  sol.value = sol.p.dot(l);
  return sol;
}

}  // namespace

WeightsAtLambda weights_given_lambda(const Eigen::VectorXd& l, const ChiSquareBall& ball,
                                     double lam) {
  check_instance(l, ball);
  if (!(lam > 0.0)) {
    throw std::invalid_argument("weights_given_lambda: lambda must be positive");
  }
  const int n = ball.n;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return l[a] < l[b]; });

  // Find the prefix size k with eta_k = (-sum_{i<=k} l_(i) - n*lam)/k consistent
  // with A = {i : l_i <= -eta}.
  double prefix = 0.0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  bool found = false;
  for (int k = 1; k <= n; ++k) {
    prefix += l[order[static_cast<std::size_t>(k - 1)]];
    const double eta_k = (-prefix - n * lam) / k;
    const bool last_in = l[order[static_cast<std::size_t>(k - 1)]] <= -eta_k;
    const bool next_out = (k == n) || l[order[static_cast<std::size_t>(k)]] > -eta_k;
    if (last_in && next_out) {
      eta = eta_k;
      found = true;
      break;
    }
  }
  if (!found) {
    throw std::logic_error("weights_given_lambda: no consistent active prefix");
  }

  WeightsAtLambda out;
  out.eta = eta;
  out.p = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (l[i] <= -eta) {
      out.active.push_back(i);
      out.p[i] = std::max(-l[i] - eta, 0.0) / (n * lam);
    }
  }
  return out;
}

double lambda_upper_bound(const Eigen::VectorXd& l, const ChiSquareBall& ball) {
  check_instance(l, ball);
  if (!(ball.rho > 0.0)) {
    throw std::invalid_argument("lambda_upper_bound: rho must be positive");
  }
  const double lmin = l.minCoeff();
  const double lmax = l.maxCoeff();
  const double root = std::sqrt(1.0 + 2.0 * ball.rho);
  const double a = (-lmin + l.sum()) / (root - 1.0);
  const double b = (-lmin + lmax) / root;
  return std::max(a, b);
}

RobustSolution solve(const Eigen::VectorXd& l, const ChiSquareBall& ball, double eps) {
  check_instance(l, ball);
  const int n = ball.n;
  const double budget = 2.0 * ball.rho + 1.0;

  if (n == 1) {
    RobustSolution sol;
    sol.p = Eigen::VectorXd::Ones(1);
    sol.eta = -l[0];
    sol.active = {0};
    sol.value = l[0];
    return sol;
  }
  if (ball.rho == 0.0) {
    return uniform_solution(l, -l.mean());
  }
  if (ball.rho >= ball.full_simplex_radius()) {
    // The ball covers the whole simplex; mass concentrates on the minimum.
    int imin = 0;
    for (int i = 1; i < n; ++i) {
      if (l[i] < l[imin]) imin = i;
    }
    RobustSolution sol;
    sol.p = Eigen::VectorXd::Zero(n);
    sol.p[imin] = 1.0;
    sol.eta = -l[imin];
    sol.active = {imin};
    sol.value = l[imin];
    return sol;
  }
  if (l.maxCoeff() - l.minCoeff() < 1e-12) {
    // Constant objective over the ball; return the minimum-norm representative.
    return uniform_solution(l, -l[0]);
  }

  // The analytic bound is not shift-invariant although the optimal lambda is;
  // evaluating it on the nonnegative shift l - min(l) keeps it valid when the
  // entries sum to a negative number.
  const double bound =
      lambda_upper_bound((l.array() - l.minCoeff()).matrix(), ball);
  if (eps <= 0.0) {
    eps = 1e-12 * (1.0 + bound);
  }
  double lo = 1e-12 * (1.0 + bound);
  double hi = bound;
  // The analytic bound should already be feasible; guard against rounding.
  for (int guard = 0; guard < 64 && n * weights_given_lambda(l, ball, hi).p.squaredNorm() > budget;
       ++guard) {
    hi *= 2.0;
  }

  int iter = 0;
  while (hi - lo > eps) {
    if (++iter > 200) {
      throw std::runtime_error("solve: bisection exceeded 200 iterations (bracket " +
                               std::to_string(hi - lo) + ")");
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;  // bracket exhausted at double precision
    }
    const WeightsAtLambda w = weights_given_lambda(l, ball, mid);
    if (n * w.p.squaredNorm() > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  WeightsAtLambda w = weights_given_lambda(l, ball, hi);
  RobustSolution sol;
  sol.lam = hi;
  sol.eta = w.eta;
  sol.active = std::move(w.active);
  sol.p = w.p.cwiseMax(0.0);
  sol.p /= sol.p.sum();
  sol.value = sol.p.dot(l);
  return sol;
}

RobustGradient robust_value_gradient(const Eigen::VectorXd& l, const Eigen::MatrixXd& dl_dx,
                                     const ChiSquareBall& ball) {
  check_instance(l, ball);
  if (dl_dx.rows() != ball.n) {
    throw std::invalid_argument("robust_value_gradient: dl_dx must have n rows");
  }
  const RobustSolution sol = solve(l, ball);

  bool unique = false;
  if (ball.rho == 0.0) {
    unique = true;  // fixed uniform weights
  } else if (ball.rho >= ball.full_simplex_radius()) {
    // One-hot regime: unique when the smallest entry is isolated.
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ball.n; ++i) {
      if (l[i] < best) {
        second = best;
        best = l[i];
      } else if (l[i] < second) {
        second = l[i];
      }
    }
    unique = (second - best) > 1e-9;
  } else {
    unique = sol.lam > 0.0;
  }

  RobustGradient out;
  out.grad = dl_dx.transpose() * sol.p;
  out.subgradient = !unique;
  return out;
}

SandwichBounds variance_sandwich_bounds(const Eigen::VectorXd& z, double m0, double m1,
                                        const ChiSquareBall& ball) {
  check_instance(z, ball);
  const double slack = 1e-12 * (1.0 + std::abs(m0) + std::abs(m1));
  if ((z.array() < m0 - slack).any() || (z.array() > m1 + slack).any()) {
    throw std::invalid_argument("variance_sandwich_bounds: samples outside [m0, m1]");
  }
  const double range = m1 - m0;
  const double mean = z.mean();
  const double s2 = (z.array() - mean).square().mean();

  SandwichBounds out;
  out.upper = std::sqrt(2.0 * ball.rho * s2);
  out.lower = std::max(out.upper - 2.0 * range * ball.rho, 0.0);
  out.gap = mean - solve(z, ball).value;
  return out;
}

double brute_force_oracle(const Eigen::VectorXd& l, const ChiSquareBall& ball, double step) {
  check_instance(l, ball);
  const int n = ball.n;
  if (n > 4) {
    throw std::invalid_argument("brute_force_oracle: refused for n > 4");
  }
  if (!(step > 0.0) || step > 1e-2) {
    throw std::invalid_argument("brute_force_oracle: step must be in (0, 1e-2]");
  }
  const long m = std::lround(1.0 / step);
  const double md = static_cast<double>(m);
  // Integer grid: p = (i_1, ..., i_n)/m. Feasible iff n * sum(i^2) <= (2rho+1) m^2.
  // Quantization slack: rounding any feasible p to the grid moves n*||p||^2
  // by at most n^2 * step^2, so admit that much beyond the exact budget.
  const double budget2 = (2.0 * ball.rho + 1.0 + n * n * step * step) * md * md;
  double best = std::numeric_limits<double>::infinity();

  if (n == 1) {
    return l[0];
  }
  if (n == 2) {
    for (long i = 0; i <= m; ++i) {
      const double j = md - i;
      const double q = static_cast<double>(i) * i + j * j;
      if (n * q > budget2) continue;
      best = std::min(best, (i * l[0] + j * l[1]) / md);
    }
    return best;
  }
  if (n == 3) {
    for (long i = 0; i <= m; ++i) {
      const double c1 = i * l[0];
      const double s1 = static_cast<double>(i) * i;
      for (long j = 0; j <= m - i; ++j) {
        const double k = md - i - j;
        const double q = s1 + static_cast<double>(j) * j + k * k;
        if (n * q > budget2) continue;
        best = std::min(best, (c1 + j * l[1] + k * l[2]) / md);
      }
    }
    return best;
  }
  // n = 4: with i, j fixed the objective is linear in k while feasibility
  // 4 * (s2 + k^2 + (rem - k)^2) <= budget2 restricts k to an interval, so the
  // grid minimum over k sits at an extreme feasible integer. Evaluating the
  // interval endpoints (exactly re-checked, with a one-step inward scan
  // against rounding) enumerates the same grid without the cubic inner loop.
  auto feasible4 = [&](double s2, long rem, long k) {
    const double r = static_cast<double>(rem - k);
    return 4.0 * (s2 + static_cast<double>(k) * k + r * r) <= budget2;
  };
  for (long i = 0; i <= m; ++i) {
    const double c1 = i * l[0];
    const double s1 = static_cast<double>(i) * i;
    for (long j = 0; j <= m - i; ++j) {
      const double c2 = c1 + j * l[1];
      const double s2 = s1 + static_cast<double>(j) * j;
      const long rem = m - i - j;
      const double disc = budget2 / 2.0 - 2.0 * s2 - static_cast<double>(rem) * rem;
      if (disc < 0.0) continue;
      const double half_width = std::sqrt(disc) / 2.0;
      const double center = rem / 2.0;
      const long k_lo = std::max(0L, static_cast<long>(std::ceil(center - half_width - 1e-9)));
      const long k_hi = std::min(rem, static_cast<long>(std::floor(center + half_width + 1e-9)));
      for (long k : {k_lo, k_lo + 1, k_hi - 1, k_hi}) {
        if (k < k_lo || k > k_hi || !feasible4(s2, rem, k)) continue;
        const double val = (c2 + k * l[2] + (rem - k) * l[3]) / md;
        if (val < best) best = val;
      }
    }
  }
  return best;
}

}  // namespace drbqo
