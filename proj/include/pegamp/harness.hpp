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
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pegamp/gamp.hpp"
#include "pegamp/state_evolution.hpp"

// Experiment harness: seeded problem generation, recovery metrics, phase
// transition / SNR / image sweeps, and the text formats (config files, CSV
// results, matrix files, PGM images) used by the command-line tool.
namespace pegamp {

// ---------------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------------

enum class SignalFamily { kBernoulliGauss, kBernoulliExp };
SignalFamily signal_family_from_string(const std::string& name);  // bg | be
std::string to_string(SignalFamily family);

enum class SolverVariant { kPeBgm, kPeBem, kPeLasso, kOracle };
SolverVariant solver_variant_from_string(const std::string& name);
std::string to_string(SolverVariant variant);

struct ExperimentConfig {
  std::size_t n = 200;                 // signal dimension
  std::vector<double> sigma_grid{0.5}; // oversampling ratios M/N, in (0,1]
  std::vector<double> rho_grid{0.2};   // sparsity ratios S/M, in (0,1)
  int trials = 10;
  SignalFamily signal_family = SignalFamily::kBernoulliGauss;
  double noise_scale = 0.0;            // nu in y = A x + nu w
  std::vector<SolverVariant> variants{SolverVariant::kPeBgm,
                                      SolverVariant::kOracle};
  std::uint64_t seed = 1;
  std::size_t components = 3;          // mixture size for the PE channels
  std::size_t support = 0;    // fixed S for SNR sweeps (0: S = rho_grid[0]*M)
  double image_snr_db = 30.0; // measurement SNR target for image runs
                              // (<= 0 means noiseless)
  std::size_t workers = 1;    // worker threads for the trial loop
  SolverOptions solver{};

  // Grids must be non-empty and strictly increasing; throws
  // std::invalid_argument otherwise.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Problem generation
// ---------------------------------------------------------------------------

struct Problem {
  SensingOperator a;
  std::vector<double> x_true;
  std::vector<double> y;
};

// I.i.d. Gaussian matrix with every row mean-centered and scaled to unit
// l2 norm; deterministic per seed.  A row that collapses to zero under
// centering (e.g. cols = 1) throws std::runtime_error("degenerate row").
SensingOperator generate_matrix(std::size_t rows, std::size_t cols,
                                std::uint64_t seed);

// Sparse signal with `support_size` uniformly placed nonzeros drawn from the
// family (standard Gaussian or unit-rate exponential), measured through a
// generated matrix with additive noise y = A x + noise_scale * w.
// support_size outside [1, n] throws
// std::invalid_argument("infeasible sparsity").
Problem generate_problem(std::size_t n, std::size_t m,
                         std::size_t support_size, SignalFamily family,
                         double noise_scale, std::uint64_t seed);

// True generating parameters of a problem cell, for the oracle variant.
InputChannelParams true_input_params(SignalFamily family, std::size_t n,
                                     std::size_t support_size);
AwgnParams true_output_params(double noise_scale);

// Independent per-trial seeding: mixes the base seed with up to three cell
// keys so a trial's stream is unaffected by the rest of the grid.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t key1,
                         std::uint64_t key2, std::uint64_t key3);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline constexpr double kSnrCapDb = 300.0;  // stands in for +infinity

// Relative l2 error strictly below 1e-3.  An all-zero truth throws
// std::invalid_argument("undefined relative error").
bool success(std::span<const double> x_true, std::span<const double> x_hat);

// 20 log10(||x|| / ||x - x_hat||), capped at kSnrCapDb.
double snr_db(std::span<const double> x_true, std::span<const double> x_hat);

// Peak signal-to-noise ratio with the given peak (255 for 8-bit images),
// capped at kSnrCapDb.
double psnr_db(std::span<const double> img_true,
               std::span<const double> img_hat, double peak = 255.0);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct PtcCellResult {
  double sigma = 0.0;
  double rho = 0.0;
  SolverVariant variant = SolverVariant::kPeBgm;
  double success_rate = 0.0;
  int trials = 0;
  double mean_iters = 0.0;
};

struct SnrCellResult {
  std::size_t m = 0;
  SolverVariant variant = SolverVariant::kPeBgm;
  double mean_snr_db = 0.0;
  double std_snr_db = 0.0;
  int trials = 0;
};

struct ImageCellResult {
  double sigma = 0.0;
  SolverVariant variant = SolverVariant::kPeBgm;
  double psnr_db = 0.0;
};

struct SweepResult {
  std::vector<PtcCellResult> ptc_cells;
  std::vector<SnrCellResult> snr_cells;
  std::vector<ImageCellResult> image_cells;
};

// Runs one variant on a problem; the oracle variant uses the supplied true
// parameters, the PE variants ignore them and start from the default
// initialization.
RecoveryResult solve_variant(SolverVariant variant, const Problem& problem,
                             const InputChannelParams& oracle_input,
                             const AwgnParams& oracle_output,
                             const ExperimentConfig& cfg);

// Phase-transition sweep over sigma_grid x rho_grid: per cell and trial one
// problem instance is generated and every configured variant solves the same
// instance.  A trial that diverges counts as a failure; the sweep never
// aborts.  Deterministic per config.
SweepResult run_ptc_sweep(const ExperimentConfig& cfg);

// Measurement sweep at fixed support: per sigma, M = round(sigma*N), S =
// cfg.support (or rho_grid[0]*M when unset); reports mean/stddev recovery
// SNR per variant.
SweepResult run_snr_sweep(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Image experiment
// ---------------------------------------------------------------------------

// Orthonormal 2-D sparsifying transform on square images (swappable so
// other bases can replace the default cosine transform).
class SparsifyingBasis {
 public:
  virtual ~SparsifyingBasis() = default;
  virtual std::size_t side() const = 0;
  // pixels -> coefficients (length side*side, row-major)
  virtual std::vector<double> analyze(std::span<const double> image) const = 0;
  // coefficients -> pixels
  virtual std::vector<double> synthesize(
      std::span<const double> coefficients) const = 0;
};

// Orthonormal 2-D type-II discrete cosine transform.
class Dct2Basis final : public SparsifyingBasis {
 public:
  explicit Dct2Basis(std::size_t side);
  std::size_t side() const override { return side_; }
  std::vector<double> analyze(std::span<const double> image) const override;
  std::vector<double> synthesize(
      std::span<const double> coefficients) const override;

 private:
  std::size_t side_;
  std::vector<double> transform_;  // 1-D DCT matrix, row-major side x side
};

// Compressive recovery of a square grayscale image: the image's transform
// coefficients are sensed through a Gaussian matrix composed with the
// inverse transform, then recovered with the Gaussian-mixture PE solver and
// the Lasso pipeline; reports PSNR per sigma.  Noise is scaled so the
// measurements have cfg.image_snr_db of SNR.  Side above 64 throws
// std::invalid_argument("image too large").
SweepResult run_image_recovery(std::span<const double> image,
                               std::size_t side, const ExperimentConfig& cfg,
                               const SparsifyingBasis* basis = nullptr);
SweepResult run_image_recovery_file(const std::string& image_path,
                                    const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

// ASCII PGM (P2).  Reading enforces a square image; writing rounds and
// clips to [0, 255].
std::vector<double> read_pgm(const std::string& path, std::size_t& side);
void write_pgm(const std::string& path, std::span<const double> image,
               std::size_t side);

// Results CSV.  Columns are pinned:
//   PTC:   sigma,rho,variant,success_rate,trials,mean_iters
//   SNR:   M,variant,mean_snr_db,std_snr_db,trials
//   image: sigma,variant,psnr_db
// Writing then parsing reproduces the records exactly (doubles are printed
// round-trip safe).
void write_ptc_csv(std::ostream& os, const SweepResult& result);
void write_snr_csv(std::ostream& os, const SweepResult& result);
void write_image_csv(std::ostream& os, const SweepResult& result);
SweepResult parse_ptc_csv(std::istream& is);
SweepResult parse_snr_csv(std::istream& is);

// Plain-text matrix file: first line "rows cols", then row-major
// whitespace-separated values.  Vectors use the same format with cols = 1.
SensingOperator read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const SensingOperator& a);
std::vector<double> read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, std::span<const double> v);

// Flat key=value configuration ('#' starts a comment).  Keys mirror the
// ExperimentConfig and SolverOptions field names.
std::map<std::string, std::string> parse_config_file(const std::string& path);
ExperimentConfig experiment_config_from_map(
    const std::map<std::string, std::string>& kv);
SeConfig se_config_from_map(const std::map<std::string, std::string>& kv);

// JSON sidecar recording the resolved configuration and base seed.
void write_config_sidecar_json(const std::string& path,
                               const ExperimentConfig& cfg,
                               const std::string& command);

// Runs fn(0..count-1) on up to `workers` threads (sequential when
// workers <= 1); the caller owns result placement, one slot per index.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pegamp
