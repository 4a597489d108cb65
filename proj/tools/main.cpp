#include "drbqo/bench.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// All floating-point output goes through one formatter so reruns diff cleanly.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_raw_csv(const std::string& path, const drbqo::ExperimentOutput& output, int d) {
  std::ofstream out(path);
  out << "algorithm,rho,repetition,iteration";
  for (int i = 1; i <= d; ++i) out << ",x" << i;
  out << ",w_index,y";
  for (int i = 1; i <= d; ++i) out << ",report_x" << i;
  out << ",rho_regret,empirical_value\n";
  for (const drbqo::RunResult& run : output.results) {
    for (std::size_t it = 0; it < run.records.size(); ++it) {
      const drbqo::IterationRecord& rec = run.records[it];
      out << drbqo::to_string(run.algorithm) << ',' << fmt(run.rho) << ',' << run.repetition
          << ',' << rec.t;
      for (int i = 0; i < d; ++i) out << ',' << fmt(rec.x[i]);
      out << ',' << rec.w_index << ',' << fmt(rec.y);
      for (int i = 0; i < d; ++i) out << ',' << fmt(rec.report_x[i]);
      out << ',' << fmt(run.regret[it]) << ',' << fmt(run.empirical[it]) << '\n';
    }
  }
}

void write_summary_csv(const std::string& path, const std::vector<drbqo::SummaryRow>& rows) {
  std::ofstream out(path);
  out << "algorithm,rho,iteration,mean_regret,ci96_regret,mean_empirical,ci96_empirical,"
         "log10_mean_regret\n";
  for (const drbqo::SummaryRow& row : rows) {
    out << drbqo::to_string(row.algorithm) << ',' << fmt(row.rho) << ',' << row.iteration << ','
        << fmt(row.mean_regret) << ',' << fmt(row.ci96_regret) << ',' << fmt(row.mean_empirical)
        << ',' << fmt(row.ci96_empirical) << ',' << fmt(row.log10_mean_regret) << '\n';
  }
}

int cmd_run(const std::string& config_path, int jobs_override, long long seed_override) {
  drbqo::ExperimentConfig config;
  try {
    config = drbqo::parse_config_file(config_path);
  } catch (const drbqo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  if (jobs_override >= 0) config.jobs = jobs_override;
  if (seed_override >= 0) config.master_seed = static_cast<std::uint64_t>(seed_override);
  if (const char* dir = std::getenv("DRBQO_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    config.output_dir = dir;
  }

  drbqo::ExperimentOutput output;
  try {
    output = drbqo::run_experiment(config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  write_raw_csv((dir / "raw.csv").string(), output, config.d);
  write_summary_csv((dir / "summary.csv").string(), output.summary);
  std::ofstream((dir / "config.txt").string()) << drbqo::render_config(config);

  int failed = 0;
  for (const drbqo::RunResult& run : output.results) {
    if (run.failed) {
      ++failed;
      std::cerr << "run failed: " << drbqo::to_string(run.algorithm) << " rho=" << fmt(run.rho)
                << " repetition=" << run.repetition << ": " << run.error << '\n';
    }
  }
  std::cout << "wrote " << (dir / "raw.csv").string() << ", " << (dir / "summary.csv").string()
            << ", " << (dir / "config.txt").string() << " (" << output.results.size() - failed
            << "/" << output.results.size() << " runs succeeded)\n";
  return output.any_failed ? 2 : 0;
}

int cmd_solve_weights(const std::string& l_csv, double rho, double eps) {
  std::vector<double> values;
  std::stringstream ss(l_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::cerr << "error: non-numeric l entry '" << item << "'\n";
      return 1;
    }
  }
  if (values.size() < 2) {
    std::cerr << "error: --l needs at least 2 comma-separated values\n";
    return 1;
  }
  const int n = static_cast<int>(values.size());
  Eigen::VectorXd l = Eigen::Map<Eigen::VectorXd>(values.data(), n);
  drbqo::RobustSolution solution;
  try {
    solution = drbqo::solve(l, drbqo::ChiSquareBall{n, rho}, eps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << n << ',' << fmt(rho) << ',' << fmt(solution.lam) << ',' << fmt(solution.eta)
            << ',' << fmt(solution.value);
  for (int i = 0; i < n; ++i) std::cout << ',' << fmt(solution.p[i]);
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust Bayesian quadrature optimization"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs_override = -1;
  long long seed_override = -1;
  CLI::App* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config_path, "Path to key = value config file")->required();
  run->add_option("--jobs", jobs_override, "Max concurrent runs (0 = all processors)");
  run->add_option("--seed", seed_override, "Override master_seed");

  std::string l_csv;
  double rho = 0.0;
  double eps = -1.0;
  CLI::App* sw = app.add_subcommand("solve-weights", "Solve the inner robust weight problem");
  sw->add_option("--l", l_csv, "Comma-separated objective values")->required();
  sw->add_option("--rho", rho, "Ball radius (>= 0)")->required();
  sw->add_option("--eps", eps, "Bisection tolerance (default: auto)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, jobs_override, seed_override);
  return cmd_solve_weights(l_csv, rho, eps);
}
