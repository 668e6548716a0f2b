/*
 * Copyright (c) 2026 the pegamp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pegamp/harness.hpp"

namespace pegamp {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])))
    --end;
  return s.substr(begin, end - begin);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t consumed = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value for config key: " + key);
  }
  if (consumed != value.size())
    throw std::invalid_argument("bad value for config key: " + key);
  return parsed;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::size_t consumed = 0;
  std::uint64_t parsed = 0;
  try {
    parsed = std::stoull(value, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value for config key: " + key);
  }
  if (consumed != value.size())
    throw std::invalid_argument("bad value for config key: " + key);
  return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("bad value for config key: " + key);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> parsed;
  for (const std::string& item : split_list(value))
    parsed.push_back(parse_double(key, item));
  return parsed;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line " + std::to_string(lineno) +
                                  ": missing '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("bad config line " + std::to_string(lineno) +
                                  ": empty key");
    kv[key] = value;
  }
  return kv;
}

ExperimentConfig experiment_config_from_map(
    const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "n") {
      cfg.n = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "sigma_grid") {
      cfg.sigma_grid = parse_double_list(key, value);
    } else if (key == "rho_grid") {
      cfg.rho_grid = parse_double_list(key, value);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_uint(key, value));
    } else if (key == "signal_family") {
      cfg.signal_family = signal_family_from_string(value);
    } else if (key == "noise_scale") {
      cfg.noise_scale = parse_double(key, value);
    } else if (key == "variants") {
      cfg.variants.clear();
      for (const std::string& item : split_list(value))
        cfg.variants.push_back(solver_variant_from_string(item));
    } else if (key == "seed") {
      cfg.seed = parse_uint(key, value);
    } else if (key == "components") {
      cfg.components = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "support") {
      cfg.support = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "image_snr_db") {
      cfg.image_snr_db = parse_double(key, value);
    } else if (key == "workers") {
      cfg.workers = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "max_iters") {
      cfg.solver.max_iters = static_cast<int>(parse_uint(key, value));
    } else if (key == "tol") {
      cfg.solver.tol = parse_double(key, value);
    } else if (key == "damping") {
      cfg.solver.damping = parse_double(key, value);
    } else if (key == "estimate_parameters") {
      cfg.solver.estimate_parameters = parse_bool(key, value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

SeConfig se_config_from_map(const std::map<std::string, std::string>& kv) {
  SeConfig cfg;
  double sparsity = 0.1;
  double signal_variance = 1.0;
  double noise_variance = 1e-4;
  double init_sparsity = 0.1;
  double init_variance = 1.0;
  double init_noise_variance = 0.01;
  for (const auto& [key, value] : kv) {
    if (key == "beta") {
      cfg.beta = parse_double(key, value);
    } else if (key == "mc_samples") {
      cfg.mc_samples = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "seed") {
      cfg.seed = parse_uint(key, value);
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(parse_uint(key, value));
    } else if (key == "mse_tol") {
      cfg.mse_tol = parse_double(key, value);
    } else if (key == "sparsity") {
      sparsity = parse_double(key, value);
    } else if (key == "signal_variance") {
      signal_variance = parse_double(key, value);
    } else if (key == "noise_variance") {
      noise_variance = parse_double(key, value);
    } else if (key == "init_sparsity") {
      init_sparsity = parse_double(key, value);
    } else if (key == "init_variance") {
      init_variance = parse_double(key, value);
    } else if (key == "init_noise_variance") {
      init_noise_variance = parse_double(key, value);
    } else if (key == "estimate_parameters") {
      cfg.estimate_parameters = parse_bool(key, value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.prior_true = BgmParams{sparsity, {1.0}, {0.0}, {signal_variance}};
  cfg.noise_true = AwgnParams{noise_variance};
  if (cfg.estimate_parameters) {
    cfg.prior_init = BgmParams{init_sparsity, {1.0}, {0.0}, {init_variance}};
    cfg.noise_init = AwgnParams{init_noise_variance};
  } else {
    cfg.prior_init = cfg.prior_true;
    cfg.noise_init = cfg.noise_true;
  }
  cfg.validate();
  return cfg;
}

void write_config_sidecar_json(const std::string& path,
                               const ExperimentConfig& cfg,
                               const std::string& command) {
  nlohmann::json j;
  j["command"] = command;
  j["n"] = cfg.n;
  j["sigma_grid"] = cfg.sigma_grid;
  j["rho_grid"] = cfg.rho_grid;
  j["trials"] = cfg.trials;
  j["signal_family"] = to_string(cfg.signal_family);
  j["noise_scale"] = cfg.noise_scale;
  std::vector<std::string> variant_names;
  for (SolverVariant v : cfg.variants) variant_names.push_back(to_string(v));
  j["variants"] = variant_names;
  j["seed"] = cfg.seed;
  j["components"] = cfg.components;
  j["support"] = cfg.support;
  j["image_snr_db"] = cfg.image_snr_db;
  j["workers"] = cfg.workers;
  j["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"tol", cfg.solver.tol},
                 {"damping", cfg.solver.damping},
                 {"estimate_parameters", cfg.solver.estimate_parameters}};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open file: " + path);
  os << j.dump(2) << '\n';
}

SensingOperator read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(is >> rows >> cols))
    throw std::invalid_argument("bad matrix header in " + path);
  std::vector<double> entries(rows * cols);
  for (double& e : entries) {
    if (!(is >> e))
      throw std::invalid_argument("truncated matrix file: " + path);
  }
  return SensingOperator::from_dense(rows, cols, std::move(entries));
}

void write_matrix_file(const std::string& path, const SensingOperator& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open file: " + path);
  os.precision(17);
  os << a.rows << ' ' << a.cols << '\n';
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      os << a.entries[i * a.cols + j];
      os << (j + 1 == a.cols ? '\n' : ' ');
    }
  }
  if (!os) throw std::runtime_error("cannot write file: " + path);
}

std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(is >> rows >> cols) || cols != 1)
    throw std::invalid_argument("bad vector header in " + path);
  std::vector<double> values(rows);
  for (double& v : values) {
    if (!(is >> v))
      throw std::invalid_argument("truncated vector file: " + path);
  }
  return values;
}

void write_vector_file(const std::string& path, std::span<const double> v) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open file: " + path);
  os.precision(17);
  os << v.size() << " 1\n";
  for (double value : v) os << value << '\n';
  if (!os) throw std::runtime_error("cannot write file: " + path);
}

}  // namespace pegamp
