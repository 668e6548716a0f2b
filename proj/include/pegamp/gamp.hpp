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
#include <span>
#include <string>
#include <vector>

#include "pegamp/channels.hpp"
#include "pegamp/param_est.hpp"

// The generalized approximate message passing solver in scalar-variance
// form, with optional built-in MAP parameter estimation, an oracle mode that
// runs with fixed (known) parameters, and the two-phase Lasso pipeline that
// estimates its regularization level before switching to MAP messages.
namespace pegamp {

// Dense sensing matrix with the squared-norm caches used by the scalar
// variance updates.
struct SensingOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major rows x cols
  std::vector<double> column_sq_norms;
  std::vector<double> row_sq_norms;
  double frobenius_sq = 0.0;

  // Validates (rows, cols >= 1, matching length, finite entries) and builds
  // the caches.  Throws std::invalid_argument on violations.
  static SensingOperator from_dense(std::size_t rows, std::size_t cols,
                                    std::vector<double> entries);

  void apply(std::span<const double> x, std::span<double> out) const;    // A x
  void apply_t(std::span<const double> s, std::span<double> out) const;  // Aᵀ s

  // Allocating conveniences for the same products.
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_t(std::span<const double> s) const;
};

// Full per-iteration solver state (scalar variances).
struct GampState {
  std::vector<double> x_hat;
  double tau_x = 0.0;
  std::vector<double> z_hat;
  std::vector<double> q;
  double tau_q = 0.0;
  std::vector<double> s;
  double tau_s = 0.0;
  std::vector<double> r;
  double tau_r = 0.0;
  std::vector<double> s_prev;
  int iteration = 0;
};

struct SolverOptions {
  int max_iters = 200;
  double tol = 1e-6;      // relative change of x_hat between iterations
  double damping = 1.0;   // new <- damping*new + (1-damping)*old on x_hat, s
  bool estimate_parameters = true;  // false = oracle mode (fixed parameters)
  bool max_sum = false;   // MAP messages (Laplace input channel only)
  ParamEstOptions param_est{};

  void validate() const;
};

struct RecoveryResult {
  std::vector<double> x_hat;
  int iterations_used = 0;
  bool converged = false;
  InputChannelParams final_params_input;
  AwgnParams final_params_output;
  // Relative change of x_hat after each iteration; one entry per iteration.
  std::vector<double> residual_history;
  std::vector<double> tau_x_history;
};

// Message passing with per-iteration MAP parameter estimation.  Iterates
// output linear -> output nonlinear -> input linear -> input nonlinear ->
// parameter update, until the relative change of x_hat drops below opts.tol
// or the iteration budget is exhausted.  Non-finite state raises
// std::runtime_error("divergence at iteration <t>").
RecoveryResult run_pe_gamp(const SensingOperator& a,
                           std::span<const double> y,
                           const InputChannelParams& input_init,
                           const AwgnParams& output_init,
                           const SolverOptions& opts);

// Same iteration with the parameter-update step disabled; the supplied
// parameters are used unchanged throughout (the "oracle" baseline).
RecoveryResult run_oracle_gamp(const SensingOperator& a,
                               std::span<const double> y,
                               const InputChannelParams& true_input,
                               const AwgnParams& true_output,
                               const SolverOptions& opts);

// Two-phase Lasso: phase 1 runs sum-product message passing with a Laplace
// input channel and built-in estimation of (rate, noise variance); phase 2
// reruns with max-sum messages (soft thresholding) at those fixed values.
// The result carries the phase-1 parameter estimates.
RecoveryResult run_pe_lasso(const SensingOperator& a,
                            std::span<const double> y,
                            const SolverOptions& opts);

enum class InputChannelKind { kBgm, kBem, kLaplace };

InputChannelKind input_channel_kind_from_string(const std::string& name);
std::string to_string(InputChannelKind kind);

// Scale-aware default initial parameters: sparsity 0.1, uniform weights,
// zero means, and slab scales matched to the per-coefficient signal energy
// implied by ||y||^2, spread geometrically (x0.5 .. x2) across mixture
// components; Laplace rate 1.  Default noise variance 0.01*||y||^2/M.
InputChannelParams make_default_input_init(InputChannelKind kind,
                                           std::size_t components,
                                           const SensingOperator& a,
                                           std::span<const double> y);
AwgnParams make_default_output_init(const SensingOperator& a,
                                    std::span<const double> y);

}  // namespace pegamp
