#include "drbqo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace drbqo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t repetition_seed(std::uint64_t master, int repetition) {
  return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(repetition) + 1));
}

double stable_neg_log1pexp(double t) {
  // -log(1 + exp(t)) without overflow for large |t|.
  if (t > 0.0) {
    return -t - std::log1p(std::exp(-t));
  }
  return -std::log1p(std::exp(t));
}

ContextSet draw_contexts(int d, int n, double sd, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("context set requires n >= 2");
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0xC0FFEEULL));
  std::normal_distribution<double> gauss(0.0, sd);
  ContextSet contexts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd w(d);
    for (int j = 0; j < d; ++j) w[j] = gauss(rng);
    contexts.contexts.push_back(std::move(w));
  }
  return contexts;
}

double branin_unit(const Eigen::VectorXd& u) {
  const double x1 = -5.0 + 15.0 * u[0];
  const double x2 = 15.0 * u[1];
  const double b = 5.1 / (4.0 * std::numbers::pi * std::numbers::pi);
  const double c = 5.0 / std::numbers::pi;
  const double t = 1.0 / (8.0 * std::numbers::pi);
  const double inner = x2 - b * x1 * x1 + c * x1 - 6.0;
  return inner * inner + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double levy_unit(const Eigen::VectorXd& u) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd x = (-10.0 + 20.0 * u.array()).matrix();
  auto wi = [&](int i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  double acc = std::pow(std::sin(std::numbers::pi * wi(0)), 2);
  for (int i = 0; i + 1 < d; ++i) {
    const double w = wi(i);
    acc += (w - 1.0) * (w - 1.0) *
           (1.0 + 10.0 * std::pow(std::sin(std::numbers::pi * w + 1.0), 2));
  }
  const double wd = wi(d - 1);
  acc += (wd - 1.0) * (wd - 1.0) * (1.0 + std::pow(std::sin(2.0 * std::numbers::pi * wd), 2));
  return acc;
}

double hartmann3_unit(const Eigen::VectorXd& u) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][3] = {
      {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
  static const double p[4][3] = {{0.3689, 0.1170, 0.2673},
                                 {0.4699, 0.4387, 0.7470},
                                 {0.1091, 0.8732, 0.5547},
                                 {0.0381, 0.5743, 0.8828}};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 3; ++j) {
      inner += a[i][j] * (u[j] - p[i][j]) * (u[j] - p[i][j]);
    }
    acc += alpha[i] * std::exp(-inner);
  }
  return -acc;
}

}  // namespace

std::pair<SyntheticProblem, ContextSet> logistic_problem(int d, int n, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("logistic_problem: d must be >= 1");
  }
  SyntheticProblem out;
  out.problem.name = "logistic";
  out.problem.d = d;
  out.problem.m = d;
  out.problem.domain = Box::cube(d, -3.0, 3.0);
  out.problem.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    return stable_neg_log1pexp(x.dot(w));
  };
  out.context_sampler = [d](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd w(d);
    for (int j = 0; j < d; ++j) w[j] = gauss(rng);
    return w;
  };
  return {std::move(out), draw_contexts(d, n, 1.0, seed)};
}

std::pair<SyntheticProblem, ContextSet> shifted_problem(const std::string& base, int d, int n,
                                                        std::uint64_t seed, double context_sd) {
  std::function<double(const Eigen::VectorXd&)> base_fn;
  if (base == "branin" || base == "Branin") {
    if (d != 2) throw std::invalid_argument("shifted_problem: Branin requires d = 2");
    base_fn = branin_unit;
  } else if (base == "levy" || base == "Levy") {
    if (d < 1) throw std::invalid_argument("shifted_problem: d must be >= 1");
    base_fn = levy_unit;
  } else if (base == "hartmann3" || base == "Hartmann3") {
    if (d != 3) throw std::invalid_argument("shifted_problem: Hartmann3 requires d = 3");
    base_fn = hartmann3_unit;
  } else {
    throw std::invalid_argument("shifted_problem: unknown base '" + base + "'");
  }

  SyntheticProblem out;
  out.problem.name = "shifted_" + base;
  out.problem.d = d;
  out.problem.m = d;
  out.problem.domain = Box::cube(d, 0.0, 1.0);
  out.problem.f = [base_fn](const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    const Eigen::VectorXd shifted = (x + w).cwiseMax(0.0).cwiseMin(1.0);
    return base_fn(shifted);
  };
  out.context_sampler = [d, context_sd](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, context_sd);
    Eigen::VectorXd w(d);
    for (int j = 0; j < d; ++j) w[j] = gauss(rng);
    return w;
  };
  return {std::move(out), draw_contexts(d, n, context_sd, seed)};
}

double RegretOracle::robust_value_at(const Eigen::VectorXd& x) const {
  const int d = domain.dim();
  std::size_t flat = 0;
  for (int i = 0; i < d; ++i) {
    const double ratio = (x[i] - domain.lo[i]) / (domain.hi[i] - domain.lo[i]);
    long idx = std::lround(ratio * (resolution - 1));
    idx = std::clamp(idx, 0L, static_cast<long>(resolution - 1));
    flat = flat * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(idx);
  }
  return robust_values[flat];
}

RegretOracle build_regret_oracle(const SyntheticProblem& problem, const ContextSet& contexts,
                                 const ChiSquareBall& ball, int resolution) {
  const int d = problem.problem.d;
  if (d > 3) {
    throw std::invalid_argument("build_regret_oracle: refused for d > 3");
  }
  if (resolution < 2) {
    throw std::invalid_argument("build_regret_oracle: resolution must be >= 2");
  }
  const int n = contexts.size();
  RegretOracle oracle;
  oracle.domain = problem.problem.domain;
  oracle.resolution = resolution;

  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(resolution);
  oracle.robust_values.resize(total);

  Eigen::VectorXd x(d);
  Eigen::VectorXd l(n);
  oracle.g_star = -std::numeric_limits<double>::infinity();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t idx = rest % static_cast<std::size_t>(resolution);
      rest /= static_cast<std::size_t>(resolution);
      x[i] = oracle.domain.lo[i] +
             (oracle.domain.hi[i] - oracle.domain.lo[i]) *
                 (static_cast<double>(idx) / (resolution - 1));
    }
    for (int j = 0; j < n; ++j) {
      l[j] = problem.problem.f(x, contexts.contexts[static_cast<std::size_t>(j)]);
    }
    const double value = solve(l, ball).value;
    oracle.robust_values[flat] = value;
    if (value > oracle.g_star) {
      oracle.g_star = value;
      oracle.x_star = x;
    }
  }
  return oracle;
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results) {
  // Cells keyed by (algorithm, rho) in first-appearance order.
  std::vector<std::pair<AlgorithmId, double>> cells;
  for (const RunResult& r : results) {
    const std::pair<AlgorithmId, double> key{r.algorithm, r.rho};
    if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [alg, rho] : cells) {
    std::vector<const RunResult*> members;
    std::size_t iterations = 0;
    for (const RunResult& r : results) {
      if (r.algorithm == alg && r.rho == rho && !r.failed) {
        members.push_back(&r);
        iterations = std::max(iterations, r.regret.size());
      }
    }
    const double count = static_cast<double>(members.size());
    for (std::size_t it = 0; it < iterations; ++it) {
      SummaryRow row;
      row.algorithm = alg;
      row.rho = rho;
      row.iteration = static_cast<int>(it) + 1;
      double sum_r = 0.0, sum_e = 0.0;
      for (const RunResult* r : members) {
        sum_r += r->regret[it];
        sum_e += r->empirical[it];
      }
      row.mean_regret = sum_r / count;
      row.mean_empirical = sum_e / count;
      if (members.size() > 1) {
        double ss_r = 0.0, ss_e = 0.0;
        for (const RunResult* r : members) {
          ss_r += (r->regret[it] - row.mean_regret) * (r->regret[it] - row.mean_regret);
          ss_e += (r->empirical[it] - row.mean_empirical) *
                  (r->empirical[it] - row.mean_empirical);
        }
        const double sd_r = std::sqrt(ss_r / (count - 1.0));
        const double sd_e = std::sqrt(ss_e / (count - 1.0));
        row.ci96_regret = 1.7507 * sd_r / std::sqrt(count);
        row.ci96_empirical = 1.7507 * sd_e / std::sqrt(count);
      }
      row.log10_mean_regret = std::log10(std::max(row.mean_regret, 1e-12));
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  // Per-repetition problems and contexts, shared across algorithms and rhos.
  std::vector<std::pair<SyntheticProblem, ContextSet>> instances;
  std::vector<std::uint64_t> seeds;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    const std::uint64_t seed = repetition_seed(config.master_seed, rep);
    seeds.push_back(seed);
    if (config.problem == "logistic") {
      auto instance = logistic_problem(config.d, config.n, seed);
      if (std::isfinite(config.domain_lo)) {
        instance.first.problem.domain = Box::cube(config.d, config.domain_lo, config.domain_hi);
      }
      instance.first.problem.noise_sd = config.noise_sd;
      instances.push_back(std::move(instance));
    } else {
      auto instance =
          shifted_problem(config.problem, config.d, config.n, seed, config.context_sd);
      instance.first.problem.noise_sd = config.noise_sd;
      instances.push_back(std::move(instance));
    }
  }

  // Ground-truth oracles per (repetition, rho).
  std::vector<std::vector<RegretOracle>> oracles(static_cast<std::size_t>(config.repetitions));
  for (int rep = 0; rep < config.repetitions; ++rep) {
    for (double rho : config.rhos) {
      oracles[static_cast<std::size_t>(rep)].push_back(
          build_regret_oracle(instances[static_cast<std::size_t>(rep)].first,
                              instances[static_cast<std::size_t>(rep)].second,
                              ChiSquareBall{config.n, rho}, config.regret_grid));
    }
  }

  struct Task {
    AlgorithmId algorithm;
    std::size_t rho_index;
    int repetition;
  };
  std::vector<Task> tasks;
  for (AlgorithmId alg : config.algorithms) {
    for (std::size_t ri = 0; ri < config.rhos.size(); ++ri) {
      for (int rep = 0; rep < config.repetitions; ++rep) {
        tasks.push_back({alg, ri, rep});
      }
    }
  }

  ExperimentOutput output;
  output.results.resize(tasks.size());

  auto worker_body = [&](const Task& task, RunResult& result) {
    const auto& [problem, contexts] = instances[static_cast<std::size_t>(task.repetition)];
    const RegretOracle& oracle =
        oracles[static_cast<std::size_t>(task.repetition)][task.rho_index];
    result.algorithm = task.algorithm;
    result.rho = config.rhos[task.rho_index];
    result.repetition = task.repetition;
    result.seed = seeds[static_cast<std::size_t>(task.repetition)];

    RunConfig rc;
    rc.horizon = config.horizon;
    rc.rho = result.rho;
    rc.seed = result.seed;
    rc.kernel = config.kernel;
    rc.length_scale = config.length_scale;
    rc.learn_scales = config.learn_scales;
    rc.candidates = {config.candidate_mode, config.candidate_count};
    rc.init_design = config.init_design;
    rc.grid_cap = config.grid_cap;
    rc.random_w = config.random_w;

    const auto start = std::chrono::steady_clock::now();
    try {
      const RunOutput run = task.algorithm == AlgorithmId::DRBQO
                                ? drbqo_run(problem.problem, contexts, rc)
                                : baseline_run(task.algorithm, problem.problem, contexts, rc);
      result.records = run.records;
      for (const IterationRecord& record : run.records) {
        double regret = oracle.regret(record.report_x);
        if (regret < -1e-9) {
          throw std::runtime_error("negative rho-regret from the oracle grid");
        }
        regret = std::max(regret, 0.0);
        double empirical = 0.0;
        for (const Eigen::VectorXd& w : contexts.contexts) {
          empirical += problem.problem.f(record.report_x, w);
        }
        empirical /= contexts.size();
        result.regret.push_back(regret);
        result.empirical.push_back(empirical);
      }
    } catch (const std::exception& e) {
      result.failed = true;
      result.error = e.what();
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) worker_body(tasks[i], output.results[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          worker_body(tasks[i], output.results[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  output.any_failed = std::any_of(output.results.begin(), output.results.end(),
                                  [](const RunResult& r) { return r.failed; });
  output.summary = summarize(output.results);
  return output;
}

}  // namespace drbqo
