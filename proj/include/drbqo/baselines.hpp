#pragma once

#include "drbqo/acquisition.hpp"

#include <string>

namespace drbqo {

enum class AlgorithmId {
  DRBQO,
  EmpDRBQO,
  BQO_TS,
  MaximinBQO_TS,
  BQO_EI,
  MaximinBQO_EI,
};

/// Robust for DRBQO and the Maximin variants, Empirical otherwise.
ReportMode report_mode_of(AlgorithmId id);

std::string to_string(AlgorithmId id);
AlgorithmId algorithm_from_string(const std::string& name);

/// Index of the candidate maximizing the uniform-weight average of the
/// sampled function; ties broken by lowest index.
std::size_t bqo_ts_select_x(const FunctionSample& sample, const ContextSet& contexts,
                            std::size_t n_candidates);

/// Expected improvement of the uniform-weight quadrature posterior at x over
/// the incumbent.
double quadrature_ei(const GPPosterior& gp, const Eigen::VectorXd& x, const ContextSet& contexts,
                     double incumbent);

/// Same loop skeleton as drbqo_run with the algorithm's selection rule and
/// report mode.
RunOutput baseline_run(AlgorithmId algorithm, const Problem& problem, const ContextSet& contexts,
                       const RunConfig& config);

}  // namespace drbqo
