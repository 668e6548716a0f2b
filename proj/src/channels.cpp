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
#include "pegamp/channels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "pegamp/special_functions.hpp"

namespace pegamp {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
// log(pi / 2) / 2, the log prefactor of the rescaled Gaussian tail mass
// sqrt(pi tau / 2) appearing in the exponential-slab and Laplace channels.
constexpr double kHalfLogPiOver2 = 0.22579135264472743236;

void check_pseudo_variance(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("nonpositive pseudo-variance");
}

void check_weights(const std::vector<double>& weights) {
  if (weights.empty()) throw std::invalid_argument("empty mixture");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !(w <= 1.0))
      throw std::invalid_argument("weight out of [0,1]");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("weights do not sum to 1");
}

void check_sparsity(double sparsity) {
  if (!(sparsity >= 0.0) || !(sparsity <= 1.0))
    throw std::invalid_argument("sparsity out of [0,1]");
}

// Mixture mean/variance from branch responsibilities and per-branch moments;
// the spike branch contributes zero mean and zero variance.
PosteriorMoment combine_branches(std::span<const double> log_weights,
                                 std::span<const PosteriorMoment> slab) {
  const double lse = log_sum_exp(log_weights);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t c = 0; c < slab.size(); ++c) {
    const double rho = std::exp(log_weights[c + 1] - lse);
    mean += rho * slab[c].mean;
    second += rho * (slab[c].variance + slab[c].mean * slab[c].mean);
  }
  return {mean, std::max(0.0, second - mean * mean)};
}

}  // namespace

void BgmParams::validate() const {
  check_sparsity(sparsity);
  check_weights(weights);
  if (means.size() != weights.size() || variances.size() != weights.size())
    throw std::invalid_argument("mismatched mixture lengths");
  for (double m : means)
    if (!std::isfinite(m)) throw std::invalid_argument("nonfinite mean");
  for (double v : variances)
    if (!(v > 0.0)) throw std::invalid_argument("nonpositive variance");
}

void BemParams::validate() const {
  check_sparsity(sparsity);
  check_weights(weights);
  if (rates.size() != weights.size())
    throw std::invalid_argument("mismatched mixture lengths");
  for (double a : rates)
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("nonpositive rate");
}

void LaplaceParams::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("nonpositive rate");
}

void AwgnParams::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("nonpositive variance");
}

void validate(const InputChannelParams& prior) {
  std::visit([](const auto& p) { p.validate(); }, prior);
}

PosteriorMoment truncated_normal_moments(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("nonpositive variance");
  const double sigma = std::sqrt(variance);
  const double alpha = -mean / sigma;  // standardized truncation point
  if (alpha > 26.0 * kSqrt2) {
    // Deep in the tail the hazard rate H(alpha) approaches alpha and the
    // direct formulas below subtract nearly equal quantities.  Use the
    // asymptotic expansion of delta = H - alpha instead:
    //   delta ~ (1/a)(1 - 2/a^2 + 10/a^4 - 74/a^6 + 706/a^8 - 8162/a^10)
    // with mean = sigma * delta and var = variance * (1 - a*delta - delta^2),
    // where 1 - a*delta is accumulated directly from the series tail.
    const double ia2 = 1.0 / (alpha * alpha);
    const double delta =
        (1.0 +
         ia2 * (-2.0 +
                ia2 * (10.0 + ia2 * (-74.0 + ia2 * (706.0 - ia2 * 8162.0))))) /
        alpha;
    const double s =
        ia2 *
        (2.0 + ia2 * (-10.0 + ia2 * (74.0 + ia2 * (-706.0 + ia2 * 8162.0))));
    return {sigma * delta, std::max(0.0, variance * (s - delta * delta))};
  }
  // Hazard rate of the standard normal at alpha: phi(alpha) / Phi(-alpha),
  // written through erfcx so the exp(-alpha^2/2) factors cancel exactly.
  // erfcx overflows to +inf for very negative arguments, which correctly
  // collapses H to 0 (no truncation effect).
  const double h = std::sqrt(2.0 / M_PI) / erfcx(alpha / kSqrt2);
  const double out_mean = mean + sigma * h;
  const double out_var = variance * (1.0 + (alpha - h) * h);
  return {std::max(0.0, out_mean), std::max(0.0, out_var)};
}

namespace detail {

void bgm_branch_log_weights(const BgmParams& prior, double r, double tau_r,
                            std::span<double> out) {
  out[0] = std::log1p(-prior.sparsity) - r * r / (2.0 * tau_r);
  for (std::size_t c = 0; c < prior.components(); ++c) {
    const double vt = prior.variances[c] + tau_r;
    const double d = r - prior.means[c];
    out[c + 1] = std::log(prior.sparsity * prior.weights[c]) +
                 0.5 * std::log(tau_r / vt) - d * d / (2.0 * vt);
  }
}

void bem_branch_log_weights(const BemParams& prior, double r, double tau_r,
                            std::span<double> out) {
  out[0] = std::log1p(-prior.sparsity);
  const double half_log_tau = 0.5 * std::log(tau_r);
  const double sq = std::sqrt(2.0 * tau_r);
  for (std::size_t c = 0; c < prior.components(); ++c) {
    const double a = prior.rates[c];
    out[c + 1] = std::log(prior.sparsity * prior.weights[c]) + std::log(a) +
                 kHalfLogPiOver2 + half_log_tau +
                 log_erfcx((a * tau_r - r) / sq);
  }
}

void laplace_side_log_weights(const LaplaceParams& prior, double r,
                              double tau_r, double& lw_plus,
                              double& lw_minus) {
  const double sq = std::sqrt(2.0 * tau_r);
  lw_plus = log_erfcx((prior.rate * tau_r - r) / sq);
  lw_minus = log_erfcx((prior.rate * tau_r + r) / sq);
}

}  // namespace detail

PosteriorMoment gin_sum_product(const BgmParams& prior, double r,
                                double tau_r) {
  check_pseudo_variance(tau_r);
  const std::size_t c_count = prior.components();
  std::vector<double> lw(c_count + 1);
  detail::bgm_branch_log_weights(prior, r, tau_r, lw);
  std::vector<PosteriorMoment> slab(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    // Gaussian-Gaussian conjugacy: slab c posterior is Gaussian with
    // precision-weighted mean and harmonic variance.
    const double vt = prior.variances[c] + tau_r;
    slab[c].mean = (r * prior.variances[c] + prior.means[c] * tau_r) / vt;
    slab[c].variance = prior.variances[c] * tau_r / vt;
  }
  return combine_branches(lw, slab);
}

PosteriorMoment gin_sum_product(const BemParams& prior, double r,
                                double tau_r) {
  check_pseudo_variance(tau_r);
  const std::size_t c_count = prior.components();
  std::vector<double> lw(c_count + 1);
  detail::bem_branch_log_weights(prior, r, tau_r, lw);
  std::vector<PosteriorMoment> slab(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    // Completing the square against the exponential factor shifts the
    // Gaussian to r - rate*tau and truncates it to the positive half-line.
    slab[c] = truncated_normal_moments(r - prior.rates[c] * tau_r, tau_r);
  }
  PosteriorMoment out = combine_branches(lw, slab);
  out.mean = std::max(0.0, out.mean);
  return out;
}

PosteriorMoment gin_sum_product(const LaplaceParams& prior, double r,
                                double tau_r) {
  check_pseudo_variance(tau_r);
  double lw_plus = 0.0;
  double lw_minus = 0.0;
  detail::laplace_side_log_weights(prior, r, tau_r, lw_plus, lw_minus);
  const double lse = log_sum_exp({lw_plus, lw_minus});
  const double rho_plus = std::exp(lw_plus - lse);
  const double rho_minus = std::exp(lw_minus - lse);
  // Positive side: Gaussian shifted left by rate*tau, truncated to x >= 0.
  // Negative side: mirror image (substitute x -> -x), so its moments come
  // from the same truncated-Gaussian map with r reflected.
  const PosteriorMoment plus =
      truncated_normal_moments(r - prior.rate * tau_r, tau_r);
  const PosteriorMoment minus =
      truncated_normal_moments(-r - prior.rate * tau_r, tau_r);
  const double mean = rho_plus * plus.mean - rho_minus * minus.mean;
  const double second =
      rho_plus * (plus.variance + plus.mean * plus.mean) +
      rho_minus * (minus.variance + minus.mean * minus.mean);
  return {mean, std::max(0.0, second - mean * mean)};
}

PosteriorMoment gin_sum_product(const InputChannelParams& prior, double r,
                                double tau_r) {
  return std::visit(
      [&](const auto& p) { return gin_sum_product(p, r, tau_r); }, prior);
}

PosteriorMoment gin_max_sum_laplace(const LaplaceParams& prior, double r,
                                    double tau_r) {
  check_pseudo_variance(tau_r);
  const double threshold = prior.rate * tau_r;
  if (std::abs(r) <= threshold) return {0.0, 0.0};
  // Soft thresholding; the derivative of the proximal map is 1 above the
  // threshold, so the variance message passes tau_r through unchanged.
  return {(std::abs(r) - threshold) * (r > 0.0 ? 1.0 : -1.0), tau_r};
}

PosteriorMoment gin_max_sum(const InputChannelParams& prior, double r,
                            double tau_r) {
  if (const auto* laplace = std::get_if<LaplaceParams>(&prior))
    return gin_max_sum_laplace(*laplace, r, tau_r);
  // The spike-and-slab priors have their posterior mode pinned at zero, so a
  // max-sum denoiser would be degenerate.
  throw std::invalid_argument("channel unsupported for max-sum");
}

PosteriorMoment gout_awgn_sum_product(const AwgnParams& theta, double q,
                                      double tau_q, double y) {
  check_pseudo_variance(tau_q);
  const double total = theta.variance + tau_q;
  return {(y - q) / total, 1.0 / total};
}

PosteriorMoment gout_awgn_max_sum(const AwgnParams& theta, double q,
                                  double tau_q, double y) {
  // For a Gaussian likelihood the MAP and MMSE output maps coincide.
  return gout_awgn_sum_product(theta, q, tau_q, y);
}

PosteriorMoment prior_moments(const InputChannelParams& prior) {
  struct Visitor {
    PosteriorMoment operator()(const BgmParams& p) const {
      double mean = 0.0;
      double second = 0.0;
      for (std::size_t c = 0; c < p.components(); ++c) {
        mean += p.weights[c] * p.means[c];
        second += p.weights[c] *
                  (p.variances[c] + p.means[c] * p.means[c]);
      }
      mean *= p.sparsity;
      second *= p.sparsity;
      return {mean, std::max(0.0, second - mean * mean)};
    }
    PosteriorMoment operator()(const BemParams& p) const {
      double mean = 0.0;
      double second = 0.0;
      for (std::size_t c = 0; c < p.components(); ++c) {
        mean += p.weights[c] / p.rates[c];
        second += p.weights[c] * 2.0 / (p.rates[c] * p.rates[c]);
      }
      mean *= p.sparsity;
      second *= p.sparsity;
      return {mean, std::max(0.0, second - mean * mean)};
    }
    PosteriorMoment operator()(const LaplaceParams& p) const {
      return {0.0, 2.0 / (p.rate * p.rate)};
    }
  };
  return std::visit(Visitor{}, prior);
}

std::vector<double> sample_prior(const InputChannelParams& prior,
                                 std::size_t count, std::uint64_t seed) {
  validate(prior);
  std::vector<double> out(count);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  struct Visitor {
    std::vector<double>& out;
    std::mt19937_64& gen;
    std::normal_distribution<double>& std_normal;
    std::exponential_distribution<double>& unit_exp;
    std::uniform_real_distribution<double>& unif;

    void operator()(const BgmParams& p) {
      std::discrete_distribution<std::size_t> pick(p.weights.begin(),
                                                   p.weights.end());
      for (double& x : out) {
        if (unif(gen) >= p.sparsity) {
          x = 0.0;
          continue;
        }
        const std::size_t c = pick(gen);
        x = p.means[c] + std::sqrt(p.variances[c]) * std_normal(gen);
      }
    }
    void operator()(const BemParams& p) {
      std::discrete_distribution<std::size_t> pick(p.weights.begin(),
                                                   p.weights.end());
      for (double& x : out) {
        if (unif(gen) >= p.sparsity) {
          x = 0.0;
          continue;
        }
        const std::size_t c = pick(gen);
        x = unit_exp(gen) / p.rates[c];
      }
    }
    void operator()(const LaplaceParams& p) {
      for (double& x : out) {
        const double magnitude = unit_exp(gen) / p.rate;
        x = unif(gen) < 0.5 ? magnitude : -magnitude;
      }
    }
  };
  Visitor v{out, gen, std_normal, unit_exp, unif};
  std::visit(v, prior);
  return out;
}

}  // namespace pegamp
