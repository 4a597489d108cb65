#include "drbqo/gp.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace drbqo {

namespace {

Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd m, const std::vector<double>& ladder,
                                     const char* what) {
  for (double jitter : ladder) {
    Eigen::MatrixXd attempt = m;
    attempt.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(attempt);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  std::ostringstream msg;
  msg << what << ": Cholesky failed after jitter ladder";
  for (double jitter : ladder) msg << ' ' << jitter;
  throw std::runtime_error(msg.str());
}

void check_simplex(const Eigen::VectorXd& weights) {
  if (weights.size() == 0 || weights.minCoeff() < -1e-9 ||
      std::abs(weights.sum() - 1.0) > 1e-6) {
    throw std::invalid_argument("weights must lie in the simplex");
  }
}

}  // namespace

GPPosterior::GPPosterior(KernelSpec spec, double noise_var)
    : spec_(std::move(spec)), noise_var_(noise_var) {
  if (!(noise_var >= 0.0)) {
    throw std::invalid_argument("GPPosterior: noise_var must be nonnegative");
  }
}

GPPosterior GPPosterior::fit(KernelSpec spec, double noise_var, std::vector<Observation> data,
                             GPFitOptions options) {
  GPPosterior gp(std::move(spec), noise_var);
  if (data.empty()) {
    return gp;
  }
  const Eigen::Index t = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd y(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    if (!std::isfinite(data[static_cast<std::size_t>(i)].y)) {
      throw std::invalid_argument("GPPosterior::fit: non-finite observation");
    }
    y[i] = data[static_cast<std::size_t>(i)].y;
  }
  if (options.standardize_y) {
    gp.y_shift_ = y.mean();
    const double sd = std::sqrt((y.array() - gp.y_shift_).square().mean());
    gp.y_scale_ = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<JointPoint> points;
  points.reserve(data.size());
  for (const Observation& obs : data) points.push_back(obs.point);

  Eigen::MatrixXd gram = kernel_matrix(gp.spec_, points);
  gram.diagonal().array() += noise_var / (gp.y_scale_ * gp.y_scale_);
  gp.chol_ = cholesky_with_jitter(std::move(gram), options.jitter_ladder, "GPPosterior::fit");

  const Eigen::VectorXd y_std = (y.array() - gp.y_shift_) / gp.y_scale_;
  gp.alpha_ = gp.chol_.triangularView<Eigen::Lower>().solve(y_std);
  gp.chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(gp.alpha_);
  gp.data_ = std::move(data);
  return gp;
}

Eigen::VectorXd GPPosterior::cross_kernel(const JointPoint& a) const {
  Eigen::VectorXd k(static_cast<Eigen::Index>(data_.size()));
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    k[i] = kernel_eval(spec_, data_[static_cast<std::size_t>(i)].point, a);
  }
  return k;
}

std::pair<double, double> GPPosterior::mean_cov(const JointPoint& a, const JointPoint& b) const {
  const double prior_cov = kernel_eval(spec_, a, b);
  if (data_.empty()) {
    return {y_shift_, y_scale_ * y_scale_ * prior_cov};
  }
  const Eigen::VectorXd ka = cross_kernel(a);
  const Eigen::VectorXd kb = cross_kernel(b);
  const Eigen::VectorXd va = chol_.triangularView<Eigen::Lower>().solve(ka);
  const Eigen::VectorXd vb = chol_.triangularView<Eigen::Lower>().solve(kb);
  const double mean = y_shift_ + y_scale_ * ka.dot(alpha_);
  const double cov = y_scale_ * y_scale_ * (prior_cov - va.dot(vb));
  return {mean, cov};
}

double GPPosterior::mean(const JointPoint& a) const {
  if (data_.empty()) return y_shift_;
  return y_shift_ + y_scale_ * cross_kernel(a).dot(alpha_);
}

double GPPosterior::variance(const JointPoint& a) const { return mean_cov(a, a).second; }

FunctionSample GPPosterior::sample_on_grid(const std::vector<JointPoint>& grid,
                                           std::uint64_t seed, std::size_t grid_cap) const {
  if (grid.empty()) {
    throw std::invalid_argument("sample_on_grid: empty grid");
  }
  if (grid.size() > grid_cap) {
    throw std::invalid_argument("sample_on_grid: grid exceeds the configured cap");
  }
  const Eigen::Index g = static_cast<Eigen::Index>(grid.size());

  Eigen::VectorXd mu(g);
  Eigen::MatrixXd cov = kernel_matrix(spec_, grid);
  if (data_.empty()) {
    mu.setZero();
  } else {
    Eigen::MatrixXd cross(static_cast<Eigen::Index>(data_.size()), g);
    for (Eigen::Index j = 0; j < g; ++j) {
      cross.col(j) = cross_kernel(grid[static_cast<std::size_t>(j)]);
    }
    mu = cross.transpose() * alpha_;
    const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(cross);
    cov.noalias() -= v.transpose() * v;
  }

  const Eigen::MatrixXd factor =
      cholesky_with_jitter(std::move(cov), {1e-10, 1e-8, 1e-6}, "sample_on_grid");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(g);
  for (Eigen::Index i = 0; i < g; ++i) z[i] = gauss(rng);

  FunctionSample sample;
  sample.grid = grid;
  sample.values = (y_shift_ + (y_scale_ * (mu + factor * z)).array()).matrix();
  return sample;
}

double GPPosterior::quadrature_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& weights,
                                    const std::vector<Eigen::VectorXd>& contexts) const {
  check_simplex(weights);
  if (static_cast<std::size_t>(weights.size()) != contexts.size()) {
    throw std::invalid_argument("quadrature_mean: weights/contexts length mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i] * mean({x, contexts[static_cast<std::size_t>(i)]});
  }
  return acc;
}

double GPPosterior::quadrature_variance(const Eigen::VectorXd& x, const Eigen::VectorXd& weights,
                                        const std::vector<Eigen::VectorXd>& contexts) const {
  check_simplex(weights);
  if (static_cast<std::size_t>(weights.size()) != contexts.size()) {
    throw std::invalid_argument("quadrature_variance: weights/contexts length mismatch");
  }
  const Eigen::Index n = weights.size();
  std::vector<JointPoint> points;
  points.reserve(contexts.size());
  for (const Eigen::VectorXd& w : contexts) points.push_back({x, w});

  Eigen::MatrixXd cov = kernel_matrix(spec_, points);
  if (!data_.empty()) {
    Eigen::MatrixXd cross(static_cast<Eigen::Index>(data_.size()), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      cross.col(j) = cross_kernel(points[static_cast<std::size_t>(j)]);
    }
    const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(cross);
    cov.noalias() -= v.transpose() * v;
  }
  const double var = y_scale_ * y_scale_ * weights.dot(cov * weights);
  return std::max(var, 0.0);
}

double GPPosterior::log_marginal_likelihood() const {
  if (data_.empty()) {
    throw std::invalid_argument("log_marginal_likelihood: requires observations");
  }
  const Eigen::Index t = static_cast<Eigen::Index>(data_.size());
  Eigen::VectorXd y_std(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    y_std[i] = (data_[static_cast<std::size_t>(i)].y - y_shift_) / y_scale_;
  }
  const double quad = y_std.dot(alpha_);
  const double logdet = chol_.diagonal().array().log().sum();
  const double lml_std =
      -0.5 * quad - logdet - 0.5 * t * std::log(2.0 * std::numbers::pi);
  return lml_std - t * std::log(y_scale_);
}

}  // namespace drbqo
