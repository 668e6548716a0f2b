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
#include "pegamp/state_evolution.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace pegamp {

namespace {

// Tolerance for rounding-level violations of positive semi-definiteness in
// the sampled second-moment matrices (which are PSD in exact arithmetic).
constexpr double kPsdSlack = 1e-9;

struct Cholesky2 {
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;
};

// Correct rounding-level PSD violations and factor Kq = L L^T.  Violations
// beyond rounding are a logic error upstream and are refused.
Cholesky2 corrected_cholesky(Moments2 k) {
  if (!std::isfinite(k.xx) || !std::isfinite(k.xy) || !std::isfinite(k.yy))
    throw std::runtime_error("invalid covariance");
  const double scale = std::max({std::abs(k.xx), std::abs(k.yy), 1e-300});
  if (k.xx < -kPsdSlack * scale || k.yy < -kPsdSlack * scale)
    throw std::runtime_error("invalid covariance");
  k.xx = std::max(k.xx, 0.0);
  k.yy = std::max(k.yy, 0.0);
  const double bound = k.xx * k.yy;
  if (k.xy * k.xy > bound * (1.0 + kPsdSlack) + kPsdSlack * scale * scale)
    throw std::runtime_error("invalid covariance");
  if (k.xy * k.xy > bound)
    k.xy = (k.xy < 0.0 ? -1.0 : 1.0) * std::sqrt(bound);

  Cholesky2 c;
  c.l11 = std::sqrt(k.xx);
  if (c.l11 > 0.0) {
    c.l21 = k.xy / c.l11;
    c.l22 = std::sqrt(std::max(0.0, k.yy - c.l21 * c.l21));
  } else {
    c.l21 = 0.0;
    c.l22 = std::sqrt(k.yy);
  }
  return c;
}

}  // namespace

void SeConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("nonpositive beta");
  if (mc_samples < 10000)
    throw std::invalid_argument("insufficient mc samples");
  if (max_iters < 1)
    throw std::invalid_argument("nonpositive iteration budget");
  if (!(mse_tol > 0.0)) throw std::invalid_argument("nonpositive tolerance");
  prior_true.validate();
  noise_true.validate();
  prior_init.validate();
  noise_init.validate();
}

SePools SePools::make(const BgmParams& prior_true, std::size_t count,
                      std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  SePools pools;
  pools.x = sample_prior(InputChannelParams{prior_true}, count, gen());
  std::normal_distribution<double> std_normal(0.0, 1.0);
  pools.u1.resize(count);
  pools.u2.resize(count);
  pools.w.resize(count);
  pools.v.resize(count);
  for (std::size_t i = 0; i < count; ++i) pools.u1[i] = std_normal(gen);
  for (std::size_t i = 0; i < count; ++i) pools.u2[i] = std_normal(gen);
  for (std::size_t i = 0; i < count; ++i) pools.w[i] = std_normal(gen);
  for (std::size_t i = 0; i < count; ++i) pools.v[i] = std_normal(gen);
  return pools;
}

SeState se_init(const SeConfig& config, const SePools& pools) {
  config.validate();
  const std::size_t count = config.mc_samples;
  const PosteriorMoment init =
      prior_moments(InputChannelParams{config.prior_init});

  SeState st;
  st.beta = config.beta;
  st.mc_samples = count;
  st.prior_bar = config.prior_init;
  st.noise_bar = config.noise_init;
  st.tau_x_bar = init.variance;
  st.iteration = 0;

  // The iteration-0 estimate is the constant prior-init mean; second
  // moments and MSE follow from the signal pool.
  const double m0 = init.mean;
  double sum_x = 0.0;
  double sum_xx = 0.0;
  double sum_err = 0.0;
  for (double x : pools.x) {
    sum_x += x;
    sum_xx += x * x;
    const double e = x - m0;
    sum_err += e * e;
  }
  const double inv = 1.0 / static_cast<double>(count);
  st.kx.xx = sum_xx * inv;
  st.kx.xy = m0 * sum_x * inv;
  st.kx.yy = m0 * m0;
  st.mse = sum_err * inv;
  return st;
}

SeState se_step(const SeState& state, const SeConfig& config,
                const SePools& pools) {
  const std::size_t count = state.mc_samples;
  if (count == 0 || pools.x.size() != count)
    throw std::invalid_argument("mismatched lengths");

  SeState next = state;
  next.iteration = state.iteration + 1;

  // Output channel update.
  next.tau_q_bar = state.beta * state.tau_x_bar;
  next.kq = Moments2{state.beta * state.kx.xx, state.beta * state.kx.xy,
                     state.beta * state.kx.yy};
  const Cholesky2 chol = corrected_cholesky(next.kq);

  const double theta_bar = state.noise_bar.variance;
  const double sigma_noise = std::sqrt(config.noise_true.variance);
  const double denom = theta_bar + next.tau_q_bar;

  std::vector<double> q_pool(count);
  std::vector<double> y_pool(count);
  double sum_s = 0.0;
  double sum_s2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double z = chol.l11 * pools.u1[i];
    const double q = chol.l21 * pools.u1[i] + chol.l22 * pools.u2[i];
    const double y = z + sigma_noise * pools.w[i];
    q_pool[i] = q;
    y_pool[i] = y;
    const double s = (y - q) / denom;
    sum_s += s;
    sum_s2 += s * s;
  }
  const double inv = 1.0 / static_cast<double>(count);

  // -E[dq g_out] = 1/(theta+tau_q) is deterministic for Gaussian noise, so
  // tau_r needs no sampling; alpha_r = tau_r * E[dz g_out] likewise reduces
  // to exactly 1.
  next.tau_r_bar = denom;
  next.alpha_r = next.tau_r_bar / denom;
  next.xi_r = config.xi_r_no_square
                  ? next.tau_r_bar * next.tau_r_bar * (sum_s * inv)
                  : next.tau_r_bar * next.tau_r_bar * (sum_s2 * inv);
  if (!(next.xi_r >= 0.0)) throw std::runtime_error("invalid covariance");

  // Input channel update.
  const double noise_scale = std::sqrt(next.xi_r);
  std::vector<double> r_pool(count);
  double sum_var = 0.0;
  double sum_xx = 0.0;
  double sum_xh = 0.0;
  double sum_hh = 0.0;
  double sum_err = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = pools.x[i];
    const double r = next.alpha_r * x + noise_scale * pools.v[i];
    r_pool[i] = r;
    const PosteriorMoment g =
        gin_sum_product(state.prior_bar, r, next.tau_r_bar);
    sum_var += g.variance;
    sum_xx += x * x;
    sum_xh += x * g.mean;
    sum_hh += g.mean * g.mean;
    const double e = x - g.mean;
    sum_err += e * e;
  }
  next.tau_x_bar = sum_var * inv;
  next.kx = Moments2{sum_xx * inv, sum_xh * inv, sum_hh * inv};
  next.mse = sum_err * inv;

  // Parameter update on the same sample pools.
  if (config.estimate_parameters) {
    const InputChannelParams updated = update_input_parameters(
        InputChannelParams{state.prior_bar}, r_pool, next.tau_r_bar,
        config.param_est);
    next.prior_bar = std::get<BgmParams>(updated);
    next.noise_bar = update_output_parameters(
        state.noise_bar, q_pool, y_pool, next.tau_q_bar, config.param_est);
  }
  return next;
}

std::vector<SeState> se_run(const SeConfig& config) {
  config.validate();
  const SePools pools =
      SePools::make(config.prior_true, config.mc_samples, config.seed);
  std::vector<SeState> trajectory;
  trajectory.push_back(se_init(config, pools));
  for (int t = 1; t <= config.max_iters; ++t) {
    const SeState& prev = trajectory.back();
    SeState next = se_step(prev, config, pools);
    const double change = std::abs(next.mse - prev.mse);
    trajectory.push_back(std::move(next));
    if (change < config.mse_tol) break;
  }
  return trajectory;
}

void write_se_trajectory_csv(std::ostream& os,
                             const std::vector<SeState>& trajectory) {
  os << "t,tau_x_bar,tau_r_bar,mse_pred,lambda1_bar,theta1_bar\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os.precision(12);
  for (const SeState& st : trajectory) {
    os << st.iteration << ',' << st.tau_x_bar << ',' << st.tau_r_bar << ','
       << st.mse << ',' << st.prior_bar.sparsity << ','
       << st.noise_bar.variance << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace pegamp
