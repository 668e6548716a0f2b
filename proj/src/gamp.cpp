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
#include "pegamp/gamp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pegamp/kernels.hpp"

namespace pegamp {

namespace {

// Scalar pseudo-variances are clamped here; the lower edge guards the
// noiseless limit where the estimated noise variance collapses to its box
// floor, the upper edge the first iterations of badly scaled problems.
constexpr double kTauLo = 1e-12;
constexpr double kTauHi = 1e12;

double clamp_tau(double tau) { return std::clamp(tau, kTauLo, kTauHi); }

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_finite_input(std::span<const double> y) {
  if (!all_finite(y)) throw std::invalid_argument("nonfinite entry");
}

RecoveryResult run_engine(const SensingOperator& a, std::span<const double> y,
                          InputChannelParams prior, AwgnParams theta,
                          const SolverOptions& opts) {
  opts.validate();
  validate(prior);
  theta.validate();
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  if (y.size() != m) throw std::invalid_argument("mismatched lengths");
  check_finite_input(y);

  GampState st;
  const PosteriorMoment init = prior_moments(prior);
  st.x_hat.assign(n, init.mean);
  st.tau_x = init.variance;
  st.z_hat.assign(m, 0.0);
  st.q.assign(m, 0.0);
  st.s.assign(m, 0.0);
  st.s_prev.assign(m, 0.0);
  st.r.assign(n, 0.0);

  RecoveryResult out;
  std::vector<double> ats(n);
  std::vector<double> x_new(n);
  const double frob = a.frobenius_sq;
  const double d = opts.damping;

  int iters = 0;
  bool converged = false;
  for (int t = 0; t < opts.max_iters; ++t) {
    st.iteration = t;

    // Output channel linear update: scalar tau_q and the Onsager-corrected
    // pseudo-measurement q.
    st.tau_q = clamp_tau(st.tau_x * frob / static_cast<double>(m));
    a.apply(st.x_hat, st.z_hat);
    for (std::size_t i = 0; i < m; ++i)
      st.q[i] = st.z_hat[i] - st.tau_q * st.s_prev[i];

    // Output channel nonlinear update; for AWGN tau_s is the same for every
    // row, and the max-sum and sum-product maps coincide.
    double tau_s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const PosteriorMoment g =
          opts.max_sum ? gout_awgn_max_sum(theta, st.q[i], st.tau_q, y[i])
                       : gout_awgn_sum_product(theta, st.q[i], st.tau_q, y[i]);
      st.s[i] = d * g.mean + (1.0 - d) * st.s_prev[i];
      tau_s = g.variance;
    }
    st.tau_s = tau_s;

    // Input channel linear update.
    st.tau_r = clamp_tau(static_cast<double>(n) / (st.tau_s * frob));
    a.apply_t(st.s, ats);
    for (std::size_t j = 0; j < n; ++j)
      st.r[j] = st.x_hat[j] + st.tau_r * ats[j];

    // Input channel nonlinear update; tau_x is the mean posterior variance.
    double var_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const PosteriorMoment g = opts.max_sum
                                    ? gin_max_sum(prior, st.r[j], st.tau_r)
                                    : gin_sum_product(prior, st.r[j], st.tau_r);
      x_new[j] = g.mean;
      var_sum += g.variance;
    }
    const double tau_x_new = var_sum / static_cast<double>(n);

    double diff_sq = 0.0;
    double base_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double xd = d * x_new[j] + (1.0 - d) * st.x_hat[j];
      const double delta = xd - st.x_hat[j];
      diff_sq += delta * delta;
      base_sq += st.x_hat[j] * st.x_hat[j];
      x_new[j] = xd;
    }
    const double residual =
        std::sqrt(diff_sq) / std::max(std::sqrt(base_sq), 1e-12);

    std::swap(st.x_hat, x_new);
    st.s_prev = st.s;
    st.tau_x = tau_x_new;
    iters = t + 1;
    out.residual_history.push_back(residual);
    out.tau_x_history.push_back(st.tau_x);

    if (!all_finite(st.x_hat) || !all_finite(st.s) || !all_finite(st.q) ||
        !all_finite(st.r) || !std::isfinite(st.tau_x))
      throw std::runtime_error("divergence at iteration " + std::to_string(t));

    if (opts.estimate_parameters) {
      const ParameterUpdate updated = update_all_parameters(
          prior, theta, st.r, st.tau_r, st.q, y, st.tau_q, opts.param_est);
      prior = updated.input;
      theta = updated.output;
    }

    if (residual < opts.tol) {
      converged = true;
      break;
    }
  }

  out.x_hat = std::move(st.x_hat);
  out.iterations_used = iters;
  out.converged = converged;
  out.final_params_input = std::move(prior);
  out.final_params_output = theta;
  return out;
}

}  // namespace

SensingOperator SensingOperator::from_dense(std::size_t rows,
                                            std::size_t cols,
                                            std::vector<double> entries) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty operator");
  if (entries.size() != rows * cols)
    throw std::invalid_argument("mismatched lengths");
  SensingOperator a;
  a.rows = rows;
  a.cols = cols;
  a.entries = std::move(entries);
  a.column_sq_norms.assign(cols, 0.0);
  a.row_sq_norms.assign(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a.entries.data() + i * cols;
    double row_sq = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row[j];
      if (!std::isfinite(e)) throw std::invalid_argument("nonfinite entry");
      row_sq += e * e;
      a.column_sq_norms[j] += e * e;
    }
    a.row_sq_norms[i] = row_sq;
    a.frobenius_sq += row_sq;
  }
  return a;
}

void SensingOperator::apply(std::span<const double> x,
                            std::span<double> out) const {
  kernels::matvec(entries.data(), rows, cols, x.data(), out.data());
}

void SensingOperator::apply_t(std::span<const double> s,
                              std::span<double> out) const {
  kernels::matvec_t(entries.data(), rows, cols, s.data(), out.data());
}

std::vector<double> SensingOperator::apply(std::span<const double> x) const {
  std::vector<double> out(rows, 0.0);
  apply(x, out);
  return out;
}

std::vector<double> SensingOperator::apply_t(std::span<const double> s) const {
  std::vector<double> out(cols, 0.0);
  apply_t(s, out);
  return out;
}

void SolverOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("nonpositive iteration budget");
  if (!(tol > 0.0)) throw std::invalid_argument("nonpositive tolerance");
  if (!(damping > 0.0) || !(damping <= 1.0))
    throw std::invalid_argument("damping out of (0,1]");
}

RecoveryResult run_pe_gamp(const SensingOperator& a, std::span<const double> y,
                           const InputChannelParams& input_init,
                           const AwgnParams& output_init,
                           const SolverOptions& opts) {
  return run_engine(a, y, input_init, output_init, opts);
}

RecoveryResult run_oracle_gamp(const SensingOperator& a,
                               std::span<const double> y,
                               const InputChannelParams& true_input,
                               const AwgnParams& true_output,
                               const SolverOptions& opts) {
  SolverOptions fixed = opts;
  fixed.estimate_parameters = false;
  return run_engine(a, y, true_input, true_output, fixed);
}

RecoveryResult run_pe_lasso(const SensingOperator& a,
                            std::span<const double> y,
                            const SolverOptions& opts) {
  // Phase 1: estimate the Laplace rate and the noise variance with
  // sum-product messages.
  SolverOptions phase1 = opts;
  phase1.max_sum = false;
  phase1.estimate_parameters = true;
  const RecoveryResult fit =
      run_engine(a, y, LaplaceParams{1.0}, make_default_output_init(a, y),
                 phase1);

  // Phase 2: MAP (soft-thresholding) messages at the estimated parameters.
  SolverOptions phase2 = opts;
  phase2.max_sum = true;
  phase2.estimate_parameters = false;
  return run_engine(a, y, fit.final_params_input, fit.final_params_output,
                    phase2);
}

InputChannelKind input_channel_kind_from_string(const std::string& name) {
  if (name == "bgm") return InputChannelKind::kBgm;
  if (name == "bem") return InputChannelKind::kBem;
  if (name == "laplace") return InputChannelKind::kLaplace;
  throw std::invalid_argument("unknown input channel: " + name);
}

std::string to_string(InputChannelKind kind) {
  switch (kind) {
    case InputChannelKind::kBgm:
      return "bgm";
    case InputChannelKind::kBem:
      return "bem";
    default:
      return "laplace";
  }
}

namespace {

// Geometric spread 2^u, u equally spaced over [-1, 1] (a single component
// gets 1); gives each mixture component a distinct initial scale.
std::vector<double> geometric_spread(std::size_t components) {
  std::vector<double> out(components, 1.0);
  if (components > 1) {
    for (std::size_t c = 0; c < components; ++c) {
      const double u = -1.0 + 2.0 * static_cast<double>(c) /
                                  static_cast<double>(components - 1);
      out[c] = std::exp2(u);
    }
  }
  return out;
}

}  // namespace

InputChannelParams make_default_input_init(InputChannelKind kind,
                                           std::size_t components,
                                           const SensingOperator& a,
                                           std::span<const double> y) {
  if (components == 0) throw std::invalid_argument("empty mixture");
  const double sparsity = 0.1;
  const std::vector<double> spread = geometric_spread(components);

  switch (kind) {
    case InputChannelKind::kBgm: {
      // Match the slab variance to the per-coefficient energy implied by
      // ||y||^2 under the initial sparsity guess: E||y||^2 = F * E[x_j^2]
      // with F the squared Frobenius norm, so each of the ~sparsity*N
      // nonzeros carries ||y||^2 / (F * sparsity).
      const double y_sq = kernels::sum_sq(y.data(), y.size());
      double base = y_sq / (a.frobenius_sq * sparsity);
      base = std::clamp(base, feasibility::kScaleLo, feasibility::kScaleHi);
      BgmParams p;
      p.sparsity = sparsity;
      p.weights.assign(components, 1.0 / static_cast<double>(components));
      p.means.assign(components, 0.0);
      p.variances.resize(components);
      for (std::size_t c = 0; c < components; ++c)
        p.variances[c] = std::clamp(base * spread[c], feasibility::kScaleLo,
                                    feasibility::kScaleHi);
      return p;
    }
    case InputChannelKind::kBem: {
      BemParams p;
      p.sparsity = sparsity;
      p.weights.assign(components, 1.0 / static_cast<double>(components));
      p.rates = spread;
      return p;
    }
    default:
      return LaplaceParams{1.0};
  }
}

AwgnParams make_default_output_init(const SensingOperator& a,
                                    std::span<const double> y) {
  const double y_sq = kernels::sum_sq(y.data(), y.size());
  const double theta = 0.01 * y_sq / static_cast<double>(a.rows);
  return AwgnParams{
      std::clamp(theta, feasibility::kScaleLo, feasibility::kScaleHi)};
}

}  // namespace pegamp
