#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drbqo/robust_weights.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace drbqo;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Exhaustive scan over eta: checks that no eta yields weights that satisfy
// the fixed-lambda relations better than the returned one.
double eta_scan_residual(const Eigen::VectorXd& l, int n, double lam, double eta) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::max(-l[i] - eta, 0.0) / (n * lam);
  return std::abs(sum - 1.0);
}

void check_kkt(const Eigen::VectorXd& l, const ChiSquareBall& ball, const RobustSolution& s) {
  const int n = ball.n;
  CHECK(std::abs(s.p.sum() - 1.0) <= 1e-9);
  CHECK(s.p.minCoeff() >= 0.0);
  const double norm_term = n * s.p.squaredNorm();
  CHECK(norm_term <= 2.0 * ball.rho + 1.0 + 1e-7);
  CHECK(s.lam * (2.0 * ball.rho + 1.0 - norm_term) <= 1e-6);
  if (s.lam > 1e-9) {
    for (int i = 0; i < n; ++i) {
      if (s.p[i] > 1e-9) {
        CHECK(std::abs(n * s.lam * s.p[i] - (-l[i] - s.eta)) <= 1e-6);
      }
    }
  }
}

}  // namespace

TEST_CASE("weights at fixed lambda: constant objective gives uniform weights") {
  for (double lam : {0.1, 0.5, 2.0}) {
    const Eigen::VectorXd l = Eigen::VectorXd::Constant(4, 3.0);
    const auto w = weights_given_lambda(l, {4, 1.0}, lam);
    CHECK(w.p.isApprox(Eigen::VectorXd::Constant(4, 0.25), 1e-12));
    CHECK(w.eta == doctest::Approx(-3.0 - lam).epsilon(1e-12));
    CHECK(w.active.size() == 4);
  }
}

TEST_CASE("weights at fixed lambda: the returned eta balances the weights exactly") {
  // The accepted (eta, p) must beat any eta found by brute scan.
  const Eigen::VectorXd l = vec({0.0, 1.0});
  const auto w = weights_given_lambda(l, {2, 0.25}, 0.5);
  CHECK(std::abs(w.p.sum() - 1.0) <= 1e-9);
  CHECK(eta_scan_residual(l, 2, 0.5, w.eta) <= 1e-9);
  double best = 1e9;
  for (double eta = -3.0; eta <= 1.0; eta += 1e-6) {
    best = std::min(best, eta_scan_residual(l, 2, 0.5, eta));
  }
  CHECK(eta_scan_residual(l, 2, 0.5, w.eta) <= best + 1e-5);
}

TEST_CASE("weights at fixed lambda: normalization holds on random inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ulam(0.01, 3.0);
  std::uniform_int_distribution<int> un(2, 12);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = un(rng);
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = u(rng);
    const auto w = weights_given_lambda(l, {n, 1.0}, ulam(rng));
    CHECK(std::abs(w.p.sum() - 1.0) <= 1e-9);
    CHECK(w.p.minCoeff() >= 0.0);
    CHECK(!w.active.empty());
  }
}

TEST_CASE("multiplier upper bound: hand case and dominance over the solution") {
  const double bound = lambda_upper_bound(vec({0.0, 1.0}), {2, 0.25});
  // max{1/(sqrt(1.5)-1), 1/sqrt(1.5)}
  CHECK(bound == doctest::Approx(4.449489742783178).epsilon(1e-12));

  CHECK_THROWS(lambda_upper_bound(vec({0.0, 1.0}), {2, 0.0}));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> urho(0.01, 5.0);
  std::uniform_int_distribution<int> un(2, 20);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = un(rng);
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = u(rng);
    const ChiSquareBall ball{n, urho(rng)};
    const auto s = solve(l, ball);
    // The analytic bound applies to objectives with nonnegative entries; the
    // optimal lambda is shift-invariant, so compare on the shifted instance.
    const Eigen::VectorXd shifted = (l.array() - l.minCoeff()).matrix();
    CHECK(s.lam <= lambda_upper_bound(shifted, ball) * (1.0 + 1e-9) + 1e-9);
  }
}

TEST_CASE("solve: analytic two-point case at the ball boundary") {
  const auto s = solve(vec({0.0, 1.0}), {2, 0.25});
  const double expected = (2.0 - std::sqrt(2.0)) / 4.0;
  CHECK(s.value == doctest::Approx(expected).epsilon(1e-9));
  CHECK(s.p[0] == doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-8));
  CHECK(s.p[1] == doctest::Approx(expected).epsilon(1e-7));
  CHECK(2.0 * s.p.squaredNorm() == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("solve: zero radius reduces to the plain mean") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd l(6);
    for (int i = 0; i < 6; ++i) l[i] = u(rng);
    const auto s = solve(l, {6, 0.0});
    CHECK(std::abs(s.value - l.mean()) <= 1e-12);
    CHECK(s.p.isApprox(Eigen::VectorXd::Constant(6, 1.0 / 6.0), 1e-12));
  }
}

TEST_CASE("solve: full-simplex radius concentrates on the minimum") {
  const auto s = solve(vec({3.0, 1.0, 2.0}), {3, 1.0});
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.p.isApprox(vec({0.0, 1.0, 0.0})));

  // Ties break to the lowest index.
  const auto tie = solve(vec({2.0, 1.0, 1.0}), {3, 5.0});
  CHECK(tie.p.isApprox(vec({0.0, 1.0, 0.0})));
}

TEST_CASE("solve: value is non-increasing in the radius") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd l(8);
    for (int i = 0; i < 8; ++i) l[i] = u(rng);
    double prev = solve(l, {8, 0.0}).value;
    for (int k = 1; k <= 20; ++k) {
      const double value = solve(l, {8, 0.25 * k}).value;
      CHECK(value <= prev + 1e-9);
      prev = value;
    }
  }
}

TEST_CASE("solve: value sits between the minimum and the mean") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> urho(0.0, 5.0);
  std::uniform_int_distribution<int> un(2, 30);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = un(rng);
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = u(rng);
    const auto s = solve(l, {n, urho(rng)});
    CHECK(s.value >= l.minCoeff() - 1e-9);
    CHECK(s.value <= l.mean() + 1e-9);
  }
}

TEST_CASE("solve: shifting the objective shifts the value, not the weights") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> uc(-5.0, 5.0);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd l(5);
    for (int i = 0; i < 5; ++i) l[i] = u(rng);
    const double c = uc(rng);
    const auto base = solve(l, {5, 0.7});
    const auto shifted = solve((l.array() + c).matrix(), {5, 0.7});
    CHECK(std::abs(shifted.value - base.value - c) <= 1e-9);
    CHECK((shifted.p - base.p).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("solve: KKT residuals hold on random instances") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> urho(0.01, 5.0);
  std::uniform_int_distribution<int> un(2, 25);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = un(rng);
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = u(rng);
    const ChiSquareBall ball{n, urho(rng)};
    check_kkt(l, ball, solve(l, ball));
  }
}

TEST_CASE("solve: rejects non-finite input") {
  Eigen::VectorXd l = vec({0.0, 1.0});
  l[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(solve(l, {2, 0.5}));
}

TEST_CASE("brute-force enumeration: limits and trivial radii") {
  CHECK_THROWS(brute_force_oracle(Eigen::VectorXd::Zero(5), {5, 1.0}, 1e-2));
  CHECK_THROWS(brute_force_oracle(vec({0.0, 1.0}), {2, 1.0}, 0.1));

  const Eigen::VectorXd l = vec({0.2, -0.4, 0.9});
  CHECK(brute_force_oracle(l, {3, 0.0}, 1e-3) == doctest::Approx(l.mean()).epsilon(1e-2));
  CHECK(brute_force_oracle(l, {3, 50.0}, 1e-3) == doctest::Approx(-0.4).epsilon(1e-2));
}

TEST_CASE("brute-force enumeration agrees with the solver") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd l(3);
    for (int i = 0; i < 3; ++i) l[i] = u(rng);
    for (double rho : {0.05, 0.25, 1.0}) {
      const double exact = solve(l, {3, rho}).value;
      const double grid = brute_force_oracle(l, {3, rho}, 1e-3);
      CHECK(std::abs(exact - grid) <= 2e-3 * l.cwiseAbs().maxCoeff() * 3 + 1e-9);
      CHECK(grid >= exact - 1e-3);  // grid admits a small quantization slack
    }
  }
}

TEST_CASE("robust value gradient: fixed-weight regimes") {
  // rho = 0: the weights stay uniform, so the gradient is the column mean.
  Eigen::MatrixXd dl(3, 2);
  dl << 1.0, 0.0, 2.0, 1.0, 3.0, -1.0;
  const auto g0 = robust_value_gradient(vec({0.3, -0.2, 0.5}), dl, {3, 0.0});
  CHECK_FALSE(g0.subgradient);
  CHECK(g0.grad.isApprox(vec({2.0, 0.0}), 1e-12));

  // One-hot regime: l(x) = (x, 2x) at x = 1 with a full-simplex radius puts
  // all mass on the first component, so d(value)/dx = 1.
  Eigen::MatrixXd dl2(2, 1);
  dl2 << 1.0, 2.0;
  const auto g1 = robust_value_gradient(vec({1.0, 2.0}), dl2, {2, 0.5});
  CHECK_FALSE(g1.subgradient);
  CHECK(g1.grad[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("robust value gradient: matches central finite differences") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ChiSquareBall ball{4, 0.3};
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    // Smooth instance: l_i(x) = a_i * sin(b_i * x) + c_i.
    Eigen::VectorXd a(4), b(4), c(4);
    for (int i = 0; i < 4; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    const double x = u(rng);
    auto l_at = [&](double xv) {
      Eigen::VectorXd l(4);
      for (int i = 0; i < 4; ++i) l[i] = a[i] * std::sin(b[i] * xv) + c[i];
      return l;
    };
    Eigen::MatrixXd dl(4, 1);
    for (int i = 0; i < 4; ++i) dl(i, 0) = a[i] * b[i] * std::cos(b[i] * x);

    const auto g = robust_value_gradient(l_at(x), dl, ball);
    if (g.subgradient) continue;  // non-unique minimizer: no FD comparison
    const double h = 1e-6;
    const double fd = (solve(l_at(x + h), ball).value - solve(l_at(x - h), ball).value) / (2 * h);
    // Relative to the natural gradient scale; the pointwise gradient itself
    // can vanish while the component slopes stay O(1).
    const double scale = std::max(std::abs(fd), dl.cwiseAbs().maxCoeff());
    CHECK(std::abs(g.grad[0] - fd) / scale <= 1e-4);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("variance sandwich: hand cases") {
  const auto flat = variance_sandwich_bounds(Eigen::VectorXd::Constant(5, 0.7), 0.0, 1.0, {5, 0.5});
  CHECK(flat.lower == 0.0);
  CHECK(flat.upper == 0.0);
  CHECK(std::abs(flat.gap) <= 1e-12);

  const auto two = variance_sandwich_bounds(vec({0.0, 1.0}), 0.0, 1.0, {2, 0.25});
  CHECK(two.upper == doctest::Approx(std::sqrt(0.125)).epsilon(1e-12));
  CHECK(two.gap == doctest::Approx(two.upper).epsilon(1e-8));
  CHECK_THROWS(variance_sandwich_bounds(vec({0.0, 1.5}), 0.0, 1.0, {2, 0.25}));
}

TEST_CASE("variance sandwich holds on a randomized battery") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> urho(0.0, 5.0);
  std::uniform_int_distribution<int> un(2, 50);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = un(rng);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = u(rng);
    const auto s = variance_sandwich_bounds(z, 0.0, 1.0, {n, urho(rng)});
    CHECK(s.gap >= s.lower - 1e-7);
    CHECK(s.gap <= s.upper + 1e-7);
  }
}
