#include "drbqo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace drbqo {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + value + "'", line);
  }
}

long long parse_int(const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + value + "'", line);
  }
}

bool parse_bool(const std::string& value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("expected a boolean, got '" + value + "'", line);
}

KernelFamily parse_kernel(const std::string& value, int line) {
  if (value == "se" || value == "squared_exponential") return KernelFamily::SquaredExponential;
  if (value == "matern12") return KernelFamily::Matern12;
  if (value == "matern32") return KernelFamily::Matern32;
  if (value == "matern52") return KernelFamily::Matern52;
  throw ConfigError("unknown kernel '" + value + "'", line);
}

const char* kernel_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential: return "se";
    case KernelFamily::Matern12: return "matern12";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
  }
  return "se";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::stringstream stream(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value', got '" + trim(raw_line) + "'", line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("empty key or value", line_no);
    }

    if (key == "problem") {
      if (value != "logistic" && value != "branin" && value != "levy" && value != "hartmann3") {
        throw ConfigError("unknown problem '" + value + "'", line_no);
      }
      config.problem = value;
    } else if (key == "d") {
      config.d = static_cast<int>(parse_int(value, line_no));
      if (config.d < 1) throw ConfigError("d must be >= 1", line_no);
    } else if (key == "n") {
      config.n = static_cast<int>(parse_int(value, line_no));
      if (config.n < 2) throw ConfigError("n must be >= 2", line_no);
    } else if (key == "noise_sd") {
      config.noise_sd = parse_double(value, line_no);
      if (!(config.noise_sd >= 0.0)) throw ConfigError("noise_sd must be >= 0", line_no);
    } else if (key == "domain") {
      const auto parts = split_list(value);
      if (parts.size() != 2) throw ConfigError("domain expects 'lo,hi'", line_no);
      config.domain_lo = parse_double(parts[0], line_no);
      config.domain_hi = parse_double(parts[1], line_no);
      if (!(config.domain_lo < config.domain_hi)) {
        throw ConfigError("domain lo must be < hi", line_no);
      }
    } else if (key == "context_sd") {
      config.context_sd = parse_double(value, line_no);
      if (!(config.context_sd > 0.0)) throw ConfigError("context_sd must be > 0", line_no);
    } else if (key == "algorithms") {
      config.algorithms.clear();
      for (const std::string& name : split_list(value)) {
        try {
          config.algorithms.push_back(algorithm_from_string(name));
        } catch (const std::exception& e) {
          throw ConfigError(e.what(), line_no);
        }
      }
      if (config.algorithms.empty()) throw ConfigError("empty algorithm list", line_no);
    } else if (key == "rho") {
      config.rhos.clear();
      for (const std::string& item : split_list(value)) {
        const double rho = parse_double(item, line_no);
        if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0", line_no);
        config.rhos.push_back(rho);
      }
      if (config.rhos.empty()) throw ConfigError("empty rho list", line_no);
    } else if (key == "T") {
      config.horizon = static_cast<int>(parse_int(value, line_no));
      if (config.horizon < 0) throw ConfigError("T must be >= 0", line_no);
    } else if (key == "repetitions") {
      config.repetitions = static_cast<int>(parse_int(value, line_no));
      if (config.repetitions < 1) throw ConfigError("repetitions must be >= 1", line_no);
    } else if (key == "master_seed") {
      config.master_seed = static_cast<std::uint64_t>(parse_int(value, line_no));
    } else if (key == "kernel") {
      config.kernel = parse_kernel(value, line_no);
    } else if (key == "length_scale") {
      config.length_scale = parse_double(value, line_no);
      if (!(config.length_scale > 0.0)) throw ConfigError("length_scale must be > 0", line_no);
    } else if (key == "learn_scales") {
      config.learn_scales = parse_bool(value, line_no);
    } else if (key == "candidate_mode") {
      if (value == "fresh_uniform") {
        config.candidate_mode = CandidateMode::FreshUniform;
      } else if (value == "fixed_grid") {
        config.candidate_mode = CandidateMode::FixedGrid;
      } else {
        throw ConfigError("unknown candidate_mode '" + value + "'", line_no);
      }
    } else if (key == "candidate_count") {
      config.candidate_count = static_cast<int>(parse_int(value, line_no));
      if (config.candidate_count < 1) throw ConfigError("candidate_count must be >= 1", line_no);
    } else if (key == "grid_cap") {
      config.grid_cap = static_cast<std::size_t>(parse_int(value, line_no));
    } else if (key == "init_design") {
      config.init_design = static_cast<int>(parse_int(value, line_no));
      if (config.init_design < 0) throw ConfigError("init_design must be >= 0", line_no);
    } else if (key == "random_w") {
      config.random_w = parse_bool(value, line_no);
    } else if (key == "regret_grid") {
      config.regret_grid = static_cast<int>(parse_int(value, line_no));
      if (config.regret_grid < 2) throw ConfigError("regret_grid must be >= 2", line_no);
    } else if (key == "jobs") {
      config.jobs = static_cast<int>(parse_int(value, line_no));
      if (config.jobs < 0) throw ConfigError("jobs must be >= 0", line_no);
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
  }

  if (static_cast<std::size_t>(config.candidate_count) * static_cast<std::size_t>(config.n) >
      config.grid_cap) {
    throw ConfigError("candidate_count * n exceeds grid_cap");
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "problem = " << config.problem << '\n';
  out << "d = " << config.d << '\n';
  out << "n = " << config.n << '\n';
  out << "noise_sd = " << config.noise_sd << '\n';
  if (std::isfinite(config.domain_lo)) {
    out << "domain = " << config.domain_lo << "," << config.domain_hi << '\n';
  }
  out << "context_sd = " << config.context_sd << '\n';
  out << "algorithms = ";
  for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
    out << (i ? "," : "") << to_string(config.algorithms[i]);
  }
  out << '\n';
  out << "rho = ";
  for (std::size_t i = 0; i < config.rhos.size(); ++i) {
    out << (i ? "," : "") << config.rhos[i];
  }
  out << '\n';
  out << "T = " << config.horizon << '\n';
  out << "repetitions = " << config.repetitions << '\n';
  out << "master_seed = " << config.master_seed << '\n';
  out << "kernel = " << kernel_name(config.kernel) << '\n';
  out << "length_scale = " << config.length_scale << '\n';
  out << "learn_scales = " << (config.learn_scales ? "true" : "false") << '\n';
  out << "candidate_mode = "
      << (config.candidate_mode == CandidateMode::FreshUniform ? "fresh_uniform" : "fixed_grid")
      << '\n';
  out << "candidate_count = " << config.candidate_count << '\n';
  out << "grid_cap = " << config.grid_cap << '\n';
  out << "init_design = " << config.init_design << '\n';
  out << "random_w = " << (config.random_w ? "true" : "false") << '\n';
  out << "regret_grid = " << config.regret_grid << '\n';
  out << "jobs = " << config.jobs << '\n';
  out << "output_dir = " << config.output_dir << '\n';
  return out.str();
}

}  // namespace drbqo
