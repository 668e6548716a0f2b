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
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pegamp/harness.hpp"
#include "pegamp/kernels.hpp"

namespace pegamp {
namespace {

std::size_t rounded_count(double ratio, std::size_t total) {
  const auto value = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(total)));
  return std::max<std::size_t>(1, value);
}

// Round-trip-safe double formatting so parsing a written CSV reproduces the
// exact values.
std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void expect_header(std::istream& is, const std::string& expected) {
  std::string line;
  if (!std::getline(is, line) || line != expected)
    throw std::invalid_argument("bad csv header");
}

struct TrialScore {
  bool solved = false;
  bool success = false;
  double snr_db = 0.0;
  double iterations = 0.0;
};

}  // namespace

RecoveryResult solve_variant(SolverVariant variant, const Problem& problem,
                             const InputChannelParams& oracle_input,
                             const AwgnParams& oracle_output,
                             const ExperimentConfig& cfg) {
  switch (variant) {
    case SolverVariant::kPeBgm:
      return run_pe_gamp(problem.a, problem.y,
                         make_default_input_init(InputChannelKind::kBgm,
                                                 cfg.components, problem.a,
                                                 problem.y),
                         make_default_output_init(problem.a, problem.y),
                         cfg.solver);
    case SolverVariant::kPeBem:
      return run_pe_gamp(problem.a, problem.y,
                         make_default_input_init(InputChannelKind::kBem,
                                                 cfg.components, problem.a,
                                                 problem.y),
                         make_default_output_init(problem.a, problem.y),
                         cfg.solver);
    case SolverVariant::kPeLasso:
      return run_pe_lasso(problem.a, problem.y, cfg.solver);
    case SolverVariant::kOracle:
      return run_oracle_gamp(problem.a, problem.y, oracle_input,
                             oracle_output, cfg.solver);
  }
  throw std::invalid_argument("unknown solver variant");
}

SweepResult run_ptc_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    double sigma = 0.0;
    double rho = 0.0;
    std::size_t m = 0;
    std::size_t s = 0;
  };
  std::vector<Cell> cells;
  for (double sigma : cfg.sigma_grid) {
    const std::size_t m = rounded_count(sigma, cfg.n);
    for (double rho : cfg.rho_grid)
      cells.push_back({sigma, rho, m, rounded_count(rho, m)});
  }

  const std::size_t n_variants = cfg.variants.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_tasks = cells.size() * n_trials;
  std::vector<TrialScore> scores(n_tasks * n_variants);

  // Every (cell, trial) generates one problem instance that all variants
  // share, seeded independently of the rest of the grid; a failing trial is
  // recorded as unsuccessful instead of aborting the sweep.
  parallel_for(n_tasks, cfg.workers, [&](std::size_t task) {
    const Cell& cell = cells[task / n_trials];
    const std::size_t trial = task % n_trials;
    TrialScore* out = scores.data() + task * n_variants;
    Problem problem;
    try {
      problem = generate_problem(
          cfg.n, cell.m, cell.s, cfg.signal_family, cfg.noise_scale,
          trial_seed(cfg.seed, cell.m, cell.s, trial));
    } catch (const std::exception&) {
      return;  // scores stay at solved = false
    }
    const InputChannelParams oracle_input =
        true_input_params(cfg.signal_family, cfg.n, cell.s);
    const AwgnParams oracle_output = true_output_params(cfg.noise_scale);
    for (std::size_t v = 0; v < n_variants; ++v) {
      try {
        const RecoveryResult res = solve_variant(
            cfg.variants[v], problem, oracle_input, oracle_output, cfg);
        out[v].solved = true;
        out[v].success = success(problem.x_true, res.x_hat);
        out[v].iterations = static_cast<double>(res.iterations_used);
      } catch (const std::exception&) {
        out[v].solved = false;
        out[v].iterations = static_cast<double>(cfg.solver.max_iters);
      }
    }
  });

  SweepResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t v = 0; v < n_variants; ++v) {
      double successes = 0.0;
      double iter_sum = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const TrialScore& score = scores[(c * n_trials + t) * n_variants + v];
        if (score.solved && score.success) successes += 1.0;
        iter_sum += score.iterations;
      }
      result.ptc_cells.push_back(
          {cells[c].sigma, cells[c].rho, cfg.variants[v],
           successes / static_cast<double>(n_trials), cfg.trials,
           iter_sum / static_cast<double>(n_trials)});
    }
  }
  return result;
}

SweepResult run_snr_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    std::size_t m = 0;
    std::size_t s = 0;
  };
  std::vector<Cell> cells;
  for (double sigma : cfg.sigma_grid) {
    const std::size_t m = rounded_count(sigma, cfg.n);
    const std::size_t s =
        cfg.support > 0 ? cfg.support : rounded_count(cfg.rho_grid.front(), m);
    cells.push_back({m, s});
  }

  const std::size_t n_variants = cfg.variants.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_tasks = cells.size() * n_trials;
  std::vector<TrialScore> scores(n_tasks * n_variants);

  parallel_for(n_tasks, cfg.workers, [&](std::size_t task) {
    const Cell& cell = cells[task / n_trials];
    const std::size_t trial = task % n_trials;
    TrialScore* out = scores.data() + task * n_variants;
    Problem problem;
    try {
      problem = generate_problem(
          cfg.n, cell.m, cell.s, cfg.signal_family, cfg.noise_scale,
          trial_seed(cfg.seed, cell.m, cell.s, trial));
    } catch (const std::exception&) {
      return;
    }
    const InputChannelParams oracle_input =
        true_input_params(cfg.signal_family, cfg.n, cell.s);
    const AwgnParams oracle_output = true_output_params(cfg.noise_scale);
    for (std::size_t v = 0; v < n_variants; ++v) {
      try {
        const RecoveryResult res = solve_variant(
            cfg.variants[v], problem, oracle_input, oracle_output, cfg);
        out[v].solved = true;
        out[v].snr_db = snr_db(problem.x_true, res.x_hat);
      } catch (const std::exception&) {
        out[v].solved = false;  // a diverged trial scores 0 dB
        out[v].snr_db = 0.0;
      }
    }
  });

  SweepResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t v = 0; v < n_variants; ++v) {
      double sum = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t)
        sum += scores[(c * n_trials + t) * n_variants + v].snr_db;
      const double mean = sum / static_cast<double>(n_trials);
      double var = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const double d =
            scores[(c * n_trials + t) * n_variants + v].snr_db - mean;
        var += d * d;
      }
      const double stddev =
          n_trials > 1 ? std::sqrt(var / static_cast<double>(n_trials - 1))
                       : 0.0;
      result.snr_cells.push_back(
          {cells[c].m, cfg.variants[v], mean, stddev, cfg.trials});
    }
  }
  return result;
}

SweepResult run_image_recovery(std::span<const double> image,
                               std::size_t side, const ExperimentConfig& cfg,
                               const SparsifyingBasis* basis) {
  cfg.validate();
  if (side == 0 || image.size() != side * side)
    throw std::invalid_argument("image not square");
  if (side > 64) throw std::invalid_argument("image too large");
  std::unique_ptr<Dct2Basis> default_basis;
  if (basis == nullptr) {
    default_basis = std::make_unique<Dct2Basis>(side);
    basis = default_basis.get();
  }
  if (basis->side() != side) throw std::invalid_argument("mismatched lengths");

  const std::size_t pixels = side * side;
  const std::vector<double> coeffs = basis->analyze(image);

  SweepResult result;
  for (double sigma : cfg.sigma_grid) {
    const std::size_t m = rounded_count(sigma, pixels);
    const SensingOperator gauss =
        generate_matrix(m, pixels, trial_seed(cfg.seed, m, pixels, 0));

    // Compose the pixel-domain Gaussian matrix with the inverse transform so
    // the solver works on the sparse coefficient vector: each row of the
    // effective operator is the analysis transform of a Gaussian row.
    std::vector<double> entries(m * pixels);
    for (std::size_t i = 0; i < m; ++i) {
      const auto row =
          std::span<const double>(gauss.entries).subspan(i * pixels, pixels);
      const std::vector<double> transformed = basis->analyze(row);
      std::copy(transformed.begin(), transformed.end(),
                entries.begin() + static_cast<std::ptrdiff_t>(i * pixels));
    }
    Problem problem{SensingOperator::from_dense(m, pixels, std::move(entries)),
                    coeffs,
                    {}};
    problem.y = problem.a.apply(coeffs);
    if (cfg.image_snr_db > 0.0) {
      const double signal_rms =
          std::sqrt(kernels::sum_sq(problem.y.data(), problem.y.size()) /
                    static_cast<double>(m));
      const double nu = signal_rms * std::pow(10.0, -cfg.image_snr_db / 20.0);
      std::mt19937_64 noise_gen(trial_seed(cfg.seed, m, pixels, 1));
      std::normal_distribution<double> w(0.0, 1.0);
      for (double& yi : problem.y) yi += nu * w(noise_gen);
    }

    const InputChannelParams unused_input = BgmParams{0.5, {1.0}, {0.0}, {1.0}};
    const AwgnParams unused_output{1.0};
    for (SolverVariant variant :
         {SolverVariant::kPeBgm, SolverVariant::kPeLasso}) {
      std::vector<double> image_hat(pixels, 0.0);
      try {
        const RecoveryResult res =
            solve_variant(variant, problem, unused_input, unused_output, cfg);
        image_hat = basis->synthesize(res.x_hat);
      } catch (const std::exception&) {
        // keep the zero image; its PSNR records the failure
      }
      result.image_cells.push_back(
          {sigma, variant, psnr_db(image, image_hat)});
    }
  }
  return result;
}

SweepResult run_image_recovery_file(const std::string& image_path,
                                    const ExperimentConfig& cfg) {
  std::size_t side = 0;
  const std::vector<double> image = read_pgm(image_path, side);
  return run_image_recovery(image, side, cfg, nullptr);
}

void write_ptc_csv(std::ostream& os, const SweepResult& result) {
  os << "sigma,rho,variant,success_rate,trials,mean_iters\n";
  for (const PtcCellResult& cell : result.ptc_cells) {
    os << format_double(cell.sigma) << ',' << format_double(cell.rho) << ','
       << to_string(cell.variant) << ',' << format_double(cell.success_rate)
       << ',' << cell.trials << ',' << format_double(cell.mean_iters) << '\n';
  }
}

void write_snr_csv(std::ostream& os, const SweepResult& result) {
  os << "M,variant,mean_snr_db,std_snr_db,trials\n";
  for (const SnrCellResult& cell : result.snr_cells) {
    os << cell.m << ',' << to_string(cell.variant) << ','
       << format_double(cell.mean_snr_db) << ','
       << format_double(cell.std_snr_db) << ',' << cell.trials << '\n';
  }
}

void write_image_csv(std::ostream& os, const SweepResult& result) {
  os << "sigma,variant,psnr_db\n";
  for (const ImageCellResult& cell : result.image_cells) {
    os << format_double(cell.sigma) << ',' << to_string(cell.variant) << ','
       << format_double(cell.psnr_db) << '\n';
  }
}

SweepResult parse_ptc_csv(std::istream& is) {
  expect_header(is, "sigma,rho,variant,success_rate,trials,mean_iters");
  SweepResult result;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6) throw std::invalid_argument("bad csv record");
    result.ptc_cells.push_back({std::stod(f[0]), std::stod(f[1]),
                                solver_variant_from_string(f[2]),
                                std::stod(f[3]), std::stoi(f[4]),
                                std::stod(f[5])});
  }
  return result;
}

SweepResult parse_snr_csv(std::istream& is) {
  expect_header(is, "M,variant,mean_snr_db,std_snr_db,trials");
  SweepResult result;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 5) throw std::invalid_argument("bad csv record");
    result.snr_cells.push_back({static_cast<std::size_t>(std::stoull(f[0])),
                                solver_variant_from_string(f[1]),
                                std::stod(f[2]), std::stod(f[3]),
                                std::stoi(f[4])});
  }
  return result;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t n_threads = std::min(std::max<std::size_t>(workers, 1),
                                         count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto body = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pegamp
