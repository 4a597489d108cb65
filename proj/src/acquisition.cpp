#include "drbqo/acquisition.hpp"

#include "run_loop.hpp"

#include <stdexcept>

namespace drbqo {

std::size_t drbqo_select_x(const FunctionSample& sample, const ContextSet& contexts,
                           const ChiSquareBall& ball, std::size_t n_candidates) {
  const std::size_t n = static_cast<std::size_t>(contexts.size());
  if (n_candidates == 0 || sample.values.size() != static_cast<Eigen::Index>(n_candidates * n)) {
    throw std::invalid_argument("drbqo_select_x: sample does not cover candidates x contexts");
  }
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_candidates; ++c) {
    const Eigen::VectorXd l =
        sample.values.segment(static_cast<Eigen::Index>(c * n), static_cast<Eigen::Index>(n));
    const double value = solve(l, ball).value;
    if (value > best_value) {
      best_value = value;
      best = c;
    }
  }
  return best;
}

int select_w_max_variance(const GPPosterior& gp, const Eigen::VectorXd& x,
                          const ContextSet& contexts) {
  int best = 0;
  double best_var = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < contexts.size(); ++i) {
    const double var = gp.variance({x, contexts.contexts[static_cast<std::size_t>(i)]});
    if (var > best_var) {
      best_var = var;
      best = i;
    }
  }
  return best;
}

std::size_t report_point(const GPPosterior& gp, const std::vector<Eigen::VectorXd>& visited,
                         const ContextSet& contexts, const ChiSquareBall& ball, ReportMode mode) {
  if (visited.empty()) {
    throw std::invalid_argument("report_point: no visited decisions");
  }
  const int n = contexts.size();
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < visited.size(); ++i) {
    Eigen::VectorXd l(n);
    for (int j = 0; j < n; ++j) {
      l[j] = gp.mean({visited[i], contexts.contexts[static_cast<std::size_t>(j)]});
    }
    const double value = mode == ReportMode::Robust ? solve(l, ball).value : uniform.dot(l);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

RunOutput drbqo_run(const Problem& problem, const ContextSet& contexts, const RunConfig& config) {
  return detail::run_loop(AlgorithmId::DRBQO, problem, contexts, config);
}

}  // namespace drbqo
