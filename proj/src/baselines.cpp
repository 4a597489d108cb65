#include "drbqo/baselines.hpp"

#include "run_loop.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace drbqo {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

ReportMode report_mode_of(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::DRBQO:
    case AlgorithmId::MaximinBQO_TS:
    case AlgorithmId::MaximinBQO_EI:
      return ReportMode::Robust;
    case AlgorithmId::EmpDRBQO:
    case AlgorithmId::BQO_TS:
    case AlgorithmId::BQO_EI:
      return ReportMode::Empirical;
  }
  throw std::invalid_argument("report_mode_of: unknown algorithm");
}

std::string to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::DRBQO: return "DRBQO";
    case AlgorithmId::EmpDRBQO: return "EmpDRBQO";
    case AlgorithmId::BQO_TS: return "BQO_TS";
    case AlgorithmId::MaximinBQO_TS: return "MaximinBQO_TS";
    case AlgorithmId::BQO_EI: return "BQO_EI";
    case AlgorithmId::MaximinBQO_EI: return "MaximinBQO_EI";
  }
  throw std::invalid_argument("to_string: unknown algorithm");
}

AlgorithmId algorithm_from_string(const std::string& name) {
  if (name == "DRBQO") return AlgorithmId::DRBQO;
  if (name == "EmpDRBQO") return AlgorithmId::EmpDRBQO;
  if (name == "BQO_TS") return AlgorithmId::BQO_TS;
  if (name == "MaximinBQO_TS") return AlgorithmId::MaximinBQO_TS;
  if (name == "BQO_EI") return AlgorithmId::BQO_EI;
  if (name == "MaximinBQO_EI") return AlgorithmId::MaximinBQO_EI;
  throw std::invalid_argument("unknown algorithm id: " + name);
}

std::size_t bqo_ts_select_x(const FunctionSample& sample, const ContextSet& contexts,
                            std::size_t n_candidates) {
  const std::size_t n = static_cast<std::size_t>(contexts.size());
  if (n_candidates == 0 || sample.values.size() != static_cast<Eigen::Index>(n_candidates * n)) {
    throw std::invalid_argument("bqo_ts_select_x: sample does not cover candidates x contexts");
  }
  const Eigen::VectorXd uniform =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_candidates; ++c) {
    const double value = uniform.dot(
        sample.values.segment(static_cast<Eigen::Index>(c * n), static_cast<Eigen::Index>(n)));
    if (value > best_value) {
      best_value = value;
      best = c;
    }
  }
  return best;
}

double quadrature_ei(const GPPosterior& gp, const Eigen::VectorXd& x, const ContextSet& contexts,
                     double incumbent) {
  const int n = contexts.size();
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  const double mu = gp.quadrature_mean(x, uniform, contexts.contexts);
  const double s = std::sqrt(gp.quadrature_variance(x, uniform, contexts.contexts));
  const double improvement = mu - incumbent;
  if (s <= 1e-12) {
    return std::max(improvement, 0.0);
  }
  const double z = improvement / s;
  return std::max(improvement * normal_cdf(z) + s * normal_pdf(z), 0.0);
}

RunOutput baseline_run(AlgorithmId algorithm, const Problem& problem, const ContextSet& contexts,
                       const RunConfig& config) {
  return detail::run_loop(algorithm, problem, contexts, config);
}

}  // namespace drbqo
