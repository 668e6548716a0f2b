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
#include <iosfwd>
#include <vector>

#include "pegamp/channels.hpp"
#include "pegamp/param_est.hpp"

// Monte-Carlo state evolution for the Gaussian-mixture input / AWGN output
// sum-product configuration: predicts the solver's scalar trajectory
// (pseudo-variances, per-iteration MSE, parameter estimates) from the
// problem's statistical description alone, for comparison against empirical
// ensembles of full solves.  Matrix model: i.i.d. zero-mean Gaussian entries
// with unit-norm columns in expectation (variance 1/M).
namespace pegamp {

// Symmetric 2x2 second-moment matrix of a pair of scalar variables.
struct Moments2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

struct SeConfig {
  double beta = 2.0;             // N / M
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 1;
  BgmParams prior_true;          // generates the signal pool
  AwgnParams noise_true;         // generates the measurement noise
  BgmParams prior_init;          // initial parameter estimates
  AwgnParams noise_init;
  bool estimate_parameters = true;  // false = oracle (known parameters)
  // Inspection-only variant: use E[g_out] instead of E[g_out^2] in the
  // pseudo-measurement noise level xi_r.  The squared form is the default
  // (xi_r parameterizes a Gaussian variance).
  bool xi_r_no_square = false;
  int max_iters = 100;
  double mse_tol = 1e-6;         // stop once the MSE change drops below
  ParamEstOptions param_est{};

  void validate() const;  // requires mc_samples >= 10000
};

// Frozen Monte-Carlo sample pools; drawn once per run and reused across
// iterations (common random numbers keep the trajectory smooth).
struct SePools {
  std::vector<double> x;   // signal draws from the true prior
  std::vector<double> u1;  // standard normals for the (Z, Q) pair
  std::vector<double> u2;
  std::vector<double> w;   // measurement-noise normals
  std::vector<double> v;   // pseudo-measurement noise normals

  static SePools make(const BgmParams& prior_true, std::size_t count,
                      std::uint64_t seed);
};

// One iteration of the predicted trajectory.
struct SeState {
  double tau_x_bar = 0.0;
  double tau_q_bar = 0.0;
  double tau_r_bar = 0.0;
  double xi_r = 0.0;
  double alpha_r = 0.0;
  Moments2 kx;             // second moments of (signal, estimate)
  Moments2 kq;             // beta * kx, the (Z, Q) second moments
  double beta = 0.0;
  std::size_t mc_samples = 0;
  BgmParams prior_bar;     // current parameter estimates
  AwgnParams noise_bar;
  double mse = 0.0;        // E[(X - Xhat)^2]
  int iteration = 0;
};

// Iteration-0 state implied by the configuration (estimate = prior-init
// mean everywhere).
SeState se_init(const SeConfig& config, const SePools& pools);

// One full recursion: output update (tau_q = beta*tau_x, Kq = beta*Kx,
// sample (Z,Q), Y = Z + sqrt(theta)W, estimate tau_r / xi_r / alpha_r from
// g_out), input update (R = alpha_r X + V, Xhat = g_in(R), refresh tau_x,
// Kx, MSE), then the parameter update on the sampled pools.  A Kq that is
// not positive semi-definite beyond rounding correction raises
// std::runtime_error("invalid covariance").
SeState se_step(const SeState& state, const SeConfig& config,
                const SePools& pools);

// Full trajectory: iterates se_step until the MSE change drops below
// config.mse_tol or config.max_iters; deterministic for a given seed.
std::vector<SeState> se_run(const SeConfig& config);

// CSV with columns t,tau_x_bar,tau_r_bar,mse_pred,lambda1_bar,theta1_bar.
void write_se_trajectory_csv(std::ostream& os,
                             const std::vector<SeState>& trajectory);

}  // namespace pegamp
