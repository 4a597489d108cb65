#pragma once

#include "drbqo/baselines.hpp"

namespace drbqo::detail {

/// Shared query-observe-refit loop; algorithms differ in the x-selection rule
/// and the report mode.
RunOutput run_loop(AlgorithmId algorithm, const Problem& problem, const ContextSet& contexts,
                   const RunConfig& config);

}  // namespace drbqo::detail
