#include "run_loop.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace drbqo::detail {

namespace {

/// Maps raw decision/context coordinates to the unit cube the GP operates on.
struct Normalizer {
  Box x_box;
  Eigen::VectorXd w_lo;
  Eigen::VectorXd w_span;

  Normalizer(const Box& domain, const ContextSet& contexts) : x_box(domain) {
    const int m = static_cast<int>(contexts.contexts.front().size());
    w_lo = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    Eigen::VectorXd w_hi = Eigen::VectorXd::Constant(m, -std::numeric_limits<double>::infinity());
    for (const Eigen::VectorXd& w : contexts.contexts) {
      w_lo = w_lo.cwiseMin(w);
      w_hi = w_hi.cwiseMax(w);
    }
    w_span = (w_hi - w_lo).cwiseMax(1e-12);
  }

  Eigen::VectorXd x(const Eigen::VectorXd& raw) const {
    return (raw - x_box.lo).cwiseQuotient(x_box.hi - x_box.lo);
  }
  Eigen::VectorXd w(const Eigen::VectorXd& raw) const {
    return (raw - w_lo).cwiseQuotient(w_span);
  }
};

GPPosterior fit_gp(const RunConfig& config, double noise_var, int d, int m,
                   const std::vector<Observation>& data) {
  GPFitOptions options;
  options.standardize_y = true;
  if (!config.learn_scales || data.empty()) {
    KernelSpec spec{config.kernel, LengthScales::isotropic(d, m, config.length_scale)};
    return GPPosterior::fit(spec, noise_var, data, options);
  }
  // Grid search on the log marginal likelihood over isotropic scales.
  GPPosterior best(KernelSpec{config.kernel, LengthScales::isotropic(d, m)}, noise_var);
  double best_lml = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (double scale : config.scale_grid) {
    KernelSpec spec{config.kernel, LengthScales::isotropic(d, m, scale)};
    GPPosterior gp = GPPosterior::fit(spec, noise_var, data, options);
    const double lml = gp.log_marginal_likelihood();
    if (!have || lml > best_lml) {
      best_lml = lml;
      best = std::move(gp);
      have = true;
    }
  }
  return best;
}

}  // namespace

RunOutput run_loop(AlgorithmId algorithm, const Problem& problem, const ContextSet& contexts,
                   const RunConfig& config) {
  const int n = contexts.size();
  if (n < 2) {
    throw std::invalid_argument("run_loop: need at least 2 contexts");
  }
  if (problem.d != problem.domain.dim() || !problem.f) {
    throw std::invalid_argument("run_loop: inconsistent problem handle");
  }
  const int d = problem.d;
  const int m = static_cast<int>(contexts.contexts.front().size());
  const ChiSquareBall ball{n, config.rho};
  const ReportMode mode = report_mode_of(algorithm);
  const Normalizer norm(problem.domain, contexts);
  const double noise_var = problem.noise_sd * problem.noise_sd;

  std::vector<Eigen::VectorXd> contexts_norm;
  contexts_norm.reserve(static_cast<std::size_t>(n));
  for (const Eigen::VectorXd& w : contexts.contexts) contexts_norm.push_back(norm.w(w));
  const ContextSet ctx_norm{contexts_norm};

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> context_pick(0, n - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto draw_x = [&]() {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) {
      x[i] = problem.domain.lo[i] + unit(rng) * (problem.domain.hi[i] - problem.domain.lo[i]);
    }
    return x;
  };

  std::vector<Eigen::VectorXd> visited_raw;
  std::vector<Eigen::VectorXd> visited_norm;
  std::vector<Observation> observations;

  auto observe = [&](const Eigen::VectorXd& x_raw, int w_index) {
    const double y =
        problem.f(x_raw, contexts.contexts[static_cast<std::size_t>(w_index)]) +
        problem.noise_sd * gauss(rng);
    if (!std::isfinite(y)) {
      throw std::runtime_error("run_loop: non-finite observation at " + problem.name);
    }
    observations.push_back(
        {{norm.x(x_raw), contexts_norm[static_cast<std::size_t>(w_index)]}, y});
    return y;
  };

  const int init = config.init_design > 0 ? config.init_design : (d == 2 ? 12 : 6 * d);
  for (int i = 0; i < init; ++i) {
    const Eigen::VectorXd x = draw_x();
    const int wi = context_pick(rng);
    observe(x, wi);
    visited_raw.push_back(x);
    visited_norm.push_back(norm.x(x));
  }

  GPPosterior gp = fit_gp(config, noise_var, d, m, observations);

  std::vector<Eigen::VectorXd> fixed_grid;
  if (config.candidates.mode == CandidateMode::FixedGrid) {
    for (int i = 0; i < config.candidates.count; ++i) fixed_grid.push_back(draw_x());
  }

  const bool thompson = algorithm != AlgorithmId::BQO_EI && algorithm != AlgorithmId::MaximinBQO_EI;
  const bool robust_select = algorithm == AlgorithmId::DRBQO || algorithm == AlgorithmId::EmpDRBQO;
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);

  RunOutput out;
  for (int t = 1; t <= config.horizon; ++t) {
    std::vector<Eigen::VectorXd> cand_raw = fixed_grid;
    if (config.candidates.mode == CandidateMode::FreshUniform) {
      for (int i = 0; i < config.candidates.count; ++i) cand_raw.push_back(draw_x());
    }
    cand_raw.insert(cand_raw.end(), visited_raw.begin(), visited_raw.end());
    std::vector<Eigen::VectorXd> cand_norm;
    cand_norm.reserve(cand_raw.size());
    for (const Eigen::VectorXd& x : cand_raw) cand_norm.push_back(norm.x(x));

    std::size_t pick = 0;
    if (thompson) {
      std::vector<JointPoint> grid;
      grid.reserve(cand_norm.size() * static_cast<std::size_t>(n));
      for (const Eigen::VectorXd& x : cand_norm) {
        for (const Eigen::VectorXd& w : contexts_norm) grid.push_back({x, w});
      }
      const std::uint64_t sample_seed = rng();
      const FunctionSample sample = gp.sample_on_grid(grid, sample_seed, config.grid_cap);
      pick = robust_select ? drbqo_select_x(sample, ctx_norm, ball, cand_norm.size())
                           : bqo_ts_select_x(sample, ctx_norm, cand_norm.size());
    } else {
      double incumbent = -std::numeric_limits<double>::infinity();
      for (const Eigen::VectorXd& x : visited_norm) {
        incumbent = std::max(incumbent, gp.quadrature_mean(x, uniform, contexts_norm));
      }
      double best_ei = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cand_norm.size(); ++c) {
        const double ei = quadrature_ei(gp, cand_norm[c], ctx_norm, incumbent);
        if (ei > best_ei) {
          best_ei = ei;
          pick = c;
        }
      }
    }

    const Eigen::VectorXd x_t = cand_raw[pick];
    const int w_index = config.random_w
                            ? context_pick(rng)
                            : select_w_max_variance(gp, norm.x(x_t), ctx_norm);
    const double y_t = observe(x_t, w_index);
    visited_raw.push_back(x_t);
    visited_norm.push_back(norm.x(x_t));

    gp = fit_gp(config, noise_var, d, m, observations);

    const std::size_t rep = report_point(gp, visited_norm, ctx_norm, ball, mode);
    Eigen::VectorXd l(n);
    for (int j = 0; j < n; ++j) {
      l[j] = gp.mean({visited_norm[rep], contexts_norm[static_cast<std::size_t>(j)]});
    }
    const double robust_value = solve(l, ball).value;

    IterationRecord record;
    record.t = t;
    record.x = x_t;
    record.w_index = w_index;
    record.y = y_t;
    record.report_x = visited_raw[rep];
    record.robust_value_at_report = robust_value;
    out.records.push_back(std::move(record));
  }

  if (!out.records.empty()) {
    out.report_x = out.records.back().report_x;
    out.report_robust_value = out.records.back().robust_value_at_report;
  } else {
    // Degenerate horizon: report the best initial-design decision.
    const std::size_t rep = report_point(gp, visited_norm, ctx_norm, ball, mode);
    Eigen::VectorXd l(n);
    for (int j = 0; j < n; ++j) {
      l[j] = gp.mean({visited_norm[rep], contexts_norm[static_cast<std::size_t>(j)]});
    }
    out.report_x = visited_raw[rep];
    out.report_robust_value = solve(l, ball).value;
  }
  return out;
}

}  // namespace drbqo::detail
