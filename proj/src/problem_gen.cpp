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
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pegamp/harness.hpp"

namespace pegamp {
namespace {

// splitmix64 finalizer: a cheap, well-mixed 64-bit permutation.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SignalFamily signal_family_from_string(const std::string& name) {
  if (name == "bg") return SignalFamily::kBernoulliGauss;
  if (name == "be") return SignalFamily::kBernoulliExp;
  throw std::invalid_argument("unknown signal family: " + name);
}

std::string to_string(SignalFamily family) {
  switch (family) {
    case SignalFamily::kBernoulliGauss:
      return "bg";
    case SignalFamily::kBernoulliExp:
      return "be";
  }
  throw std::invalid_argument("unknown signal family");
}

SolverVariant solver_variant_from_string(const std::string& name) {
  if (name == "pe_bgm") return SolverVariant::kPeBgm;
  if (name == "pe_bem") return SolverVariant::kPeBem;
  if (name == "pe_lasso") return SolverVariant::kPeLasso;
  if (name == "oracle") return SolverVariant::kOracle;
  throw std::invalid_argument("unknown solver variant: " + name);
}

std::string to_string(SolverVariant variant) {
  switch (variant) {
    case SolverVariant::kPeBgm:
      return "pe_bgm";
    case SolverVariant::kPeBem:
      return "pe_bem";
    case SolverVariant::kPeLasso:
      return "pe_lasso";
    case SolverVariant::kOracle:
      return "oracle";
  }
  throw std::invalid_argument("unknown solver variant");
}

void ExperimentConfig::validate() const {
  if (n == 0) throw std::invalid_argument("empty operator");
  auto check_grid = [](const std::vector<double>& grid, double lo, double hi,
                       const char* what) {
    if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(grid[i] > lo && grid[i] <= hi))
        throw std::invalid_argument(std::string(what) + " grid out of range");
      if (i > 0 && !(grid[i] > grid[i - 1]))
        throw std::invalid_argument(std::string(what) +
                                    " grid not strictly increasing");
    }
  };
  check_grid(sigma_grid, 0.0, 1.0, "sigma");
  check_grid(rho_grid, 0.0, 1.0 - 1e-12, "rho");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (variants.empty()) throw std::invalid_argument("no variants configured");
  if (components == 0) throw std::invalid_argument("components must be positive");
  if (workers == 0) throw std::invalid_argument("workers must be positive");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
    throw std::invalid_argument("negative noise scale");
  solver.validate();
}

SensingOperator generate_matrix(std::size_t rows, std::size_t cols,
                                std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty operator");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> entries(rows * cols);
  for (double& e : entries) e = normal(gen);
  // Center and normalize each row so every measurement has zero mean and
  // unit energy regardless of the draw.
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = entries.data() + i * cols;
    const double mean =
        std::accumulate(row, row + cols, 0.0) / static_cast<double>(cols);
    double sq = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      row[j] -= mean;
      sq += row[j] * row[j];
    }
    if (!(sq > 0.0)) throw std::runtime_error("degenerate row");
    const double inv_norm = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < cols; ++j) row[j] *= inv_norm;
  }
  return SensingOperator::from_dense(rows, cols, std::move(entries));
}

Problem generate_problem(std::size_t n, std::size_t m,
                         std::size_t support_size, SignalFamily family,
                         double noise_scale, std::uint64_t seed) {
  if (support_size == 0 || support_size > n)
    throw std::invalid_argument("infeasible sparsity");
  std::mt19937_64 master(seed);
  const std::uint64_t matrix_seed = master();
  const std::uint64_t signal_seed = master();
  const std::uint64_t noise_seed = master();

  Problem problem{generate_matrix(m, n, matrix_seed),
                  std::vector<double>(n, 0.0), {}};

  // Uniform support without replacement via a partial Fisher-Yates shuffle.
  std::mt19937_64 sig_gen(signal_seed);
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t k = 0; k < support_size; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(indices[k], indices[pick(sig_gen)]);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (std::size_t k = 0; k < support_size; ++k) {
    const double value = family == SignalFamily::kBernoulliGauss
                             ? normal(sig_gen)
                             : expo(sig_gen);
    problem.x_true[indices[k]] = value;
  }

  problem.y = problem.a.apply(problem.x_true);
  if (noise_scale > 0.0) {
    std::mt19937_64 noise_gen(noise_seed);
    std::normal_distribution<double> w(0.0, 1.0);
    for (double& yi : problem.y) yi += noise_scale * w(noise_gen);
  }
  return problem;
}

InputChannelParams true_input_params(SignalFamily family, std::size_t n,
                                     std::size_t support_size) {
  if (n == 0 || support_size == 0 || support_size > n)
    throw std::invalid_argument("infeasible sparsity");
  const double sparsity =
      static_cast<double>(support_size) / static_cast<double>(n);
  if (family == SignalFamily::kBernoulliGauss)
    return BgmParams{sparsity, {1.0}, {0.0}, {1.0}};
  return BemParams{sparsity, {1.0}, {1.0}};
}

AwgnParams true_output_params(double noise_scale) {
  // The solver needs a strictly positive noise variance even for noiseless
  // data; the floor matches the smallest admissible scale parameter.
  const double variance = noise_scale * noise_scale;
  return AwgnParams{std::max(variance, feasibility::kScaleLo)};
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t key1,
                         std::uint64_t key2, std::uint64_t key3) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (key1 + 0x9e3779b97f4a7c15ULL));
  h = splitmix64(h ^ (key2 + 0x9e3779b97f4a7c15ULL));
  h = splitmix64(h ^ (key3 + 0x9e3779b97f4a7c15ULL));
  return h;
}

}  // namespace pegamp
