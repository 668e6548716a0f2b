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

// Randomized invariant suites, one per module, shared between the unit tests
// and the acceptance run.  Each suite draws its cases from a PRNG seeded off
// the fixed master seed and reports how many property instances were checked
// and how many failed (with the first failing label kept for diagnosis).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pegamp/channels.hpp"
#include "pegamp/gamp.hpp"
#include "pegamp/harness.hpp"
#include "pegamp/kernels.hpp"
#include "pegamp/param_est.hpp"
#include "pegamp/special_functions.hpp"
#include "pegamp/state_evolution.hpp"

#include "support/quadrature.hpp"
#include "support/reference_erfcx.hpp"

namespace invariants {

inline constexpr std::uint64_t kMasterSeed = 20260814;

struct Report {
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};

inline void check(Report& report, bool ok, const std::string& label) {
  ++report.cases;
  if (!ok) {
    ++report.failures;
    if (report.first_failure.empty()) report.first_failure = label;
  }
}

inline bool close_rel(double got, double want, double rel,
                      double abs_floor = 0.0) {
  const double diff = std::abs(got - want);
  return diff <= abs_floor || diff <= rel * std::abs(want);
}

inline std::string describe(const char* what, double got, double want) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": got " << got << ", want " << want;
  return os.str();
}

// ---------------------------------------------------------------------------
// Random channel-parameter generators shared by several suites
// ---------------------------------------------------------------------------

inline pegamp::BgmParams random_bgm(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> comp_dist(1, 3);
  std::uniform_real_distribution<double> sparsity_dist(0.1, 0.9);
  std::uniform_real_distribution<double> mean_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> var_dist(0.2, 3.0);
  std::normal_distribution<double> logit_dist(0.0, 1.0);
  const std::size_t c = comp_dist(rng);
  std::vector<double> logits(c);
  for (double& l : logits) l = logit_dist(rng);
  pegamp::BgmParams params;
  params.sparsity = sparsity_dist(rng);
  params.weights = pegamp::softmax(logits);
  params.means.resize(c);
  params.variances.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    params.means[i] = mean_dist(rng);
    params.variances[i] = var_dist(rng);
  }
  return params;
}

inline pegamp::BemParams random_bem(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> comp_dist(1, 3);
  std::uniform_real_distribution<double> sparsity_dist(0.1, 0.9);
  std::uniform_real_distribution<double> rate_dist(0.2, 4.0);
  std::normal_distribution<double> logit_dist(0.0, 1.0);
  const std::size_t c = comp_dist(rng);
  std::vector<double> logits(c);
  for (double& l : logits) l = logit_dist(rng);
  pegamp::BemParams params;
  params.sparsity = sparsity_dist(rng);
  params.weights = pegamp::softmax(logits);
  params.rates.resize(c);
  for (std::size_t i = 0; i < c; ++i) params.rates[i] = rate_dist(rng);
  return params;
}

inline pegamp::LaplaceParams random_laplace(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate_dist(0.2, 4.0);
  return pegamp::LaplaceParams{rate_dist(rng)};
}

inline double random_tau(std::mt19937_64& rng, double lo = 1e-3,
                         double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Pseudo-data vector r = x + sqrt(tau) z with x drawn from the prior.
inline std::vector<double> random_r_vec(const pegamp::InputChannelParams& prior,
                                        std::size_t n, double tau_r,
                                        std::mt19937_64& rng) {
  std::vector<double> r = pegamp::sample_prior(prior, n, rng());
  std::normal_distribution<double> z(0.0, 1.0);
  for (double& v : r) v += std::sqrt(tau_r) * z(rng);
  return r;
}

// ---------------------------------------------------------------------------
// special_functions
// ---------------------------------------------------------------------------

inline Report special_functions(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);

  // erfcx is strictly decreasing on the whole line.
  std::uniform_real_distribution<double> x_dist(-26.0, 50.0);
  for (int i = 0; i < 120; ++i) {
    double x1 = x_dist(rng);
    double x2 = x_dist(rng);
    if (x1 == x2) continue;
    if (x1 > x2) std::swap(x1, x2);
    check(report, pegamp::erfcx(x1) > pegamp::erfcx(x2),
          "erfcx not strictly decreasing");
  }

  // Agreement with the high-precision reference table.
  for (int i = 0; i < reference::kErfcxTableSize; ++i) {
    const double x = reference::kErfcxTable[i].x;
    const double want = reference::kErfcxTable[i].value;
    const double got = pegamp::erfcx(x);
    const double rel = (std::abs(x) <= 5.0) ? 1e-12 : 1e-11;
    check(report, close_rel(got, want, rel),
          describe("erfcx reference mismatch", got, want));
  }

  // log_erfcx is the logarithm of erfcx wherever the latter is finite.
  std::uniform_real_distribution<double> pos_dist(-5.0, 30.0);
  for (int i = 0; i < 40; ++i) {
    const double x = pos_dist(rng);
    const double got = std::exp(pegamp::log_erfcx(x));
    const double want = pegamp::erfcx(x);
    check(report, close_rel(got, want, 1e-12),
          describe("exp(log_erfcx) mismatch", got, want));
  }

  // log_sum_exp is invariant under a common shift.
  std::uniform_int_distribution<std::size_t> len_dist(1, 12);
  std::normal_distribution<double> val_dist(0.0, 5.0);
  std::normal_distribution<double> shift_dist(0.0, 100.0);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> values(len_dist(rng));
    for (double& v : values) v = val_dist(rng);
    const double c = shift_dist(rng);
    const double base = pegamp::log_sum_exp(values);
    std::vector<double> shifted = values;
    for (double& v : shifted) v += c;
    const double moved = pegamp::log_sum_exp(shifted) - c;
    check(report,
          std::abs(base - moved) <= 1e-13 * std::max(1.0, std::abs(base)),
          describe("log_sum_exp shift variance", moved, base));
  }

  // gauss_log_pdf against a direct evaluation.
  std::uniform_real_distribution<double> var_dist(0.05, 10.0);
  for (int i = 0; i < 40; ++i) {
    const double x = val_dist(rng);
    const double m = val_dist(rng);
    const double v = var_dist(rng);
    const double got = pegamp::gauss_log_pdf(x, m, v);
    const double want = oracle::gauss_log_density(x, m, v);
    check(report, close_rel(got, want, 1e-12, 1e-13),
          describe("gauss_log_pdf mismatch", got, want));
  }

  return report;
}

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

inline Report kernels(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);

  std::vector<std::size_t> sizes;
  for (std::size_t n = 1; n <= 64; ++n) sizes.push_back(n);
  for (std::size_t n : {100, 127, 128, 129, 255, 256, 1000})
    sizes.push_back(n);

  for (std::size_t n : sizes) {
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);

    const double dot_ref = pegamp::kernels::dot_scalar(a.data(), b.data(), n);
    const double dot_got = pegamp::kernels::dot(a.data(), b.data(), n);
    check(report, std::abs(dot_got - dot_ref) <= 1e-12 * std::max(1.0, mag),
          describe("dot variant mismatch", dot_got, dot_ref));

    const double ss_ref = pegamp::kernels::sum_sq_scalar(a.data(), n);
    const double ss_got = pegamp::kernels::sum_sq(a.data(), n);
    check(report, close_rel(ss_got, ss_ref, 1e-12),
          describe("sum_sq variant mismatch", ss_got, ss_ref));

    const double alpha = g(rng);
    const double beta = g(rng);
    std::vector<double> z_ref(n);
    std::vector<double> z_got(n);
    pegamp::kernels::axpby_scalar(alpha, a.data(), beta, b.data(),
                                  z_ref.data(), n);
    pegamp::kernels::axpby(alpha, a.data(), beta, b.data(), z_got.data(), n);
    check(report, z_ref == z_got, "axpby variant mismatch");

    // Aliased forms: z overwrites x, then z overwrites y.
    std::vector<double> x_alias = a;
    pegamp::kernels::axpby(alpha, x_alias.data(), beta, b.data(),
                           x_alias.data(), n);
    check(report, x_alias == z_ref, "axpby x-alias mismatch");
    std::vector<double> y_alias = b;
    pegamp::kernels::axpby(alpha, a.data(), beta, y_alias.data(),
                           y_alias.data(), n);
    check(report, y_alias == z_ref, "axpby y-alias mismatch");
  }

  std::uniform_int_distribution<std::size_t> dim_dist(1, 33);
  for (int i = 0; i < 30; ++i) {
    const std::size_t m = dim_dist(rng);
    const std::size_t n = dim_dist(rng);
    std::vector<double> mat(m * n);
    std::vector<double> x(n);
    std::vector<double> s(m);
    for (double& v : mat) v = g(rng);
    for (double& v : x) v = g(rng);
    for (double& v : s) v = g(rng);

    std::vector<double> y_ref(m);
    std::vector<double> y_got(m);
    pegamp::kernels::matvec_scalar(mat.data(), m, n, x.data(), y_ref.data());
    pegamp::kernels::matvec(mat.data(), m, n, x.data(), y_got.data());
    bool ok = true;
    for (std::size_t row = 0; row < m; ++row)
      ok = ok && close_rel(y_got[row], y_ref[row], 1e-12, 1e-12);
    check(report, ok, "matvec variant mismatch");

    std::vector<double> t_ref(n);
    std::vector<double> t_got(n);
    pegamp::kernels::matvec_t_scalar(mat.data(), m, n, s.data(), t_ref.data());
    pegamp::kernels::matvec_t(mat.data(), m, n, s.data(), t_got.data());
    ok = true;
    for (std::size_t col = 0; col < n; ++col)
      ok = ok && close_rel(t_got[col], t_ref[col], 1e-12, 1e-12);
    check(report, ok, "matvec_t variant mismatch");
  }

  return report;
}

// ---------------------------------------------------------------------------
// channels
// ---------------------------------------------------------------------------

inline Report channels(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> r_dist(0.0, 2.5);

  const auto random_prior = [&](int which) -> pegamp::InputChannelParams {
    if (which == 0) return random_bgm(rng);
    if (which == 1) return random_bem(rng);
    return random_laplace(rng);
  };

  // Posterior variance is nonnegative and finite on random tuples.
  for (int which = 0; which < 3; ++which) {
    for (int i = 0; i < 70; ++i) {
      const pegamp::InputChannelParams prior = random_prior(which);
      const double r = r_dist(rng);
      const double tau = random_tau(rng);
      const pegamp::PosteriorMoment got = pegamp::gin_sum_product(prior, r, tau);
      check(report,
            std::isfinite(got.mean) && std::isfinite(got.variance) &&
                got.variance >= 0.0,
            "gin moment not finite/nonnegative");
    }
  }

  // Quadrature oracle equivalence on a random subset per channel.
  for (int which = 0; which < 3; ++which) {
    for (int i = 0; i < 25; ++i) {
      const pegamp::InputChannelParams prior = random_prior(which);
      const double r = r_dist(rng);
      const double tau = random_tau(rng);
      const pegamp::PosteriorMoment got = pegamp::gin_sum_product(prior, r, tau);
      const pegamp::PosteriorMoment want = oracle::posterior_moments(prior, r, tau);
      check(report, close_rel(got.mean, want.mean, 1e-7, 1e-9),
            describe("gin mean vs quadrature", got.mean, want.mean));
      check(report, close_rel(got.variance, want.variance, 1e-7, 1e-9),
            describe("gin variance vs quadrature", got.variance, want.variance));
    }
  }

  // Pure-Gaussian prior (sparsity 1, single component) reduces to the
  // conjugate update; the variance path may round through the second moment,
  // so the allowance scales with mean^2.
  std::uniform_real_distribution<double> mean_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> var_dist(0.2, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double mu = mean_dist(rng);
    const double v = var_dist(rng);
    const double r = r_dist(rng);
    const double tau = random_tau(rng);
    const pegamp::BgmParams prior{1.0, {1.0}, {mu}, {v}};
    const pegamp::PosteriorMoment got = pegamp::gin_sum_product(prior, r, tau);
    const double want_mean = (r * v + mu * tau) / (v + tau);
    const double want_var = v * tau / (v + tau);
    check(report, got.mean == want_mean,
          describe("pure-Gaussian mean", got.mean, want_mean));
    check(report,
          std::abs(got.variance - want_var) <=
              8.0 * std::numeric_limits<double>::epsilon() *
                  (want_var + want_mean * want_mean),
          describe("pure-Gaussian variance", got.variance, want_var));
  }

  // As the spike absorbs all mass the posterior mean decays monotonically
  // toward zero.
  for (int i = 0; i < 20; ++i) {
    double r = r_dist(rng);
    if (std::abs(r) < 0.1) r = 0.5;
    const double tau = random_tau(rng, 0.05, 5.0);
    const auto mean_at = [&](double sparsity) {
      const pegamp::BgmParams prior{sparsity, {1.0}, {0.0}, {1.0}};
      return std::abs(pegamp::gin_sum_product(prior, r, tau).mean);
    };
    const double m1 = mean_at(1e-1);
    const double m2 = mean_at(1e-3);
    const double m3 = mean_at(1e-6);
    check(report, m1 > m2, "spike decay not monotone (1e-1 vs 1e-3)");
    check(report, m2 > m3 && m3 < 1e-2, "spike decay not monotone (1e-3 vs 1e-6)");
  }

  // Output channel: -d s / d q equals tau_s (finite differences).
  std::uniform_real_distribution<double> theta_dist(0.01, 2.0);
  for (int i = 0; i < 60; ++i) {
    const pegamp::AwgnParams theta{theta_dist(rng)};
    const double q = r_dist(rng);
    const double y = r_dist(rng);
    const double tau_q = random_tau(rng, 1e-2, 5.0);
    const double h = 1e-5;
    const pegamp::PosteriorMoment at = pegamp::gout_awgn_sum_product(theta, q, tau_q, y);
    const double s_hi = pegamp::gout_awgn_sum_product(theta, q + h, tau_q, y).mean;
    const double s_lo = pegamp::gout_awgn_sum_product(theta, q - h, tau_q, y).mean;
    const double fd = -(s_hi - s_lo) / (2.0 * h);
    check(report, close_rel(fd, at.variance, 1e-6, 1e-9),
          describe("gout curvature vs finite difference", fd, at.variance));
  }

  // Truncated-normal moments against direct quadrature of the restricted
  // density.
  for (int i = 0; i < 30; ++i) {
    const double m = 4.0 * mean_dist(rng);
    const double v = var_dist(rng);
    const pegamp::PosteriorMoment got = pegamp::truncated_normal_moments(m, v);
    const double sd = std::sqrt(v);
    const double peak = std::max(0.0, m);
    const oracle::BranchMoments branch = oracle::integrate_branch(
        [=](double x) { return oracle::gauss_log_density(x, m, v); }, 0.0,
        peak + 15.0 * sd, peak);
    check(report, close_rel(got.mean, branch.mean, 1e-9, 1e-12),
          describe("truncated-normal mean", got.mean, branch.mean));
    const double want_var = branch.second - branch.mean * branch.mean;
    check(report, close_rel(got.variance, want_var, 1e-8, 1e-12),
          describe("truncated-normal variance", got.variance, want_var));
  }

  return report;
}

// ---------------------------------------------------------------------------
// param_est
// ---------------------------------------------------------------------------

namespace detail {

// Centered finite difference of the evidence value under a parameter bump
// applied by `apply` (which receives +h / -h).
template <typename Params, typename Apply, typename Eval>
inline bool gradient_matches_fd(Report& report, const Params& params,
                                const Apply& apply, const Eval& eval,
                                double analytic, double h, double value_scale,
                                const char* label) {
  Params hi = params;
  Params lo = params;
  apply(hi, h);
  apply(lo, -h);
  const double fd = (eval(hi) - eval(lo)) / (2.0 * h);
  // The floor covers the finite difference's own roundoff: the evidence is
  // accumulated to ~1e-15 relative, magnified by 1/h.
  const double floor = 1e-8 * (1.0 + std::abs(value_scale));
  const bool ok = std::abs(analytic - fd) <=
                  1e-5 * std::max(std::abs(analytic), std::abs(fd)) + floor;
  check(report, ok, describe(label, analytic, fd));
  return ok;
}

}  // namespace detail

// One randomized gradient-vs-FD instance per call; `which` cycles through
// the channels and their parameters.  Shared with the acceptance run, which
// needs 200 instances under its own counter.
inline void param_gradient_case(Report& report, std::mt19937_64& rng,
                                int which) {
  using pegamp::ParameterSelector;
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t n = 40;
  const double tau = random_tau(rng, 0.05, 2.0);

  if (which % 10 < 4) {  // Gaussian-mixture channel
    const pegamp::BgmParams params = random_bgm(rng);
    const std::vector<double> r =
        random_r_vec(pegamp::InputChannelParams{params}, n, tau, rng);
    const auto eval = [&](const pegamp::BgmParams& p) {
      return pegamp::evidence_and_grad_bgm(p, ParameterSelector::sparsity(), r,
                                           tau)
          .value;
    };
    std::uniform_int_distribution<std::size_t> comp(0, params.components() - 1);
    const std::size_t c = comp(rng);
    const int sub = which % 4;
    if (sub == 0) {
      const auto got = pegamp::evidence_and_grad_bgm(
          params, ParameterSelector::sparsity(), r, tau);
      detail::gradient_matches_fd(
          report, params,
          [](pegamp::BgmParams& p, double h) { p.sparsity += h; }, eval,
          got.gradient, 1e-6, got.value, "bgm sparsity gradient vs fd");
    } else if (sub == 1) {
      const auto got = pegamp::evidence_and_grad_bgm(
          params, ParameterSelector::mean(c), r, tau);
      detail::gradient_matches_fd(
          report, params,
          [c](pegamp::BgmParams& p, double h) { p.means[c] += h; }, eval,
          got.gradient, 1e-6, got.value, "bgm mean gradient vs fd");
    } else if (sub == 2) {
      const auto got = pegamp::evidence_and_grad_bgm(
          params, ParameterSelector::variance(c), r, tau);
      detail::gradient_matches_fd(
          report, params,
          [c](pegamp::BgmParams& p, double h) { p.variances[c] += h; }, eval,
          got.gradient, 1e-6 * params.variances[c], got.value,
          "bgm variance gradient vs fd");
    } else {
      const auto got = pegamp::evidence_and_grad_bgm(
          params, ParameterSelector::weight(c), r, tau);
      const auto bump_logit = [c](pegamp::BgmParams& p, double h) {
        std::vector<double> logits(p.weights.size());
        for (std::size_t i = 0; i < logits.size(); ++i)
          logits[i] = std::log(p.weights[i]);
        logits[c] += h;
        p.weights = pegamp::softmax(logits);
      };
      detail::gradient_matches_fd(report, params, bump_logit, eval,
                                  got.gradient, 1e-6, got.value,
                                  "bgm weight-logit gradient vs fd");
    }
  } else if (which % 10 < 7) {  // exponential-mixture channel
    const pegamp::BemParams params = random_bem(rng);
    const std::vector<double> r =
        random_r_vec(pegamp::InputChannelParams{params}, n, tau, rng);
    const auto eval = [&](const pegamp::BemParams& p) {
      return pegamp::evidence_and_grad_bem(p, ParameterSelector::sparsity(), r,
                                           tau)
          .value;
    };
    std::uniform_int_distribution<std::size_t> comp(0, params.components() - 1);
    const std::size_t c = comp(rng);
    const int sub = which % 3;
    if (sub == 0) {
      const auto got = pegamp::evidence_and_grad_bem(
          params, ParameterSelector::sparsity(), r, tau);
      detail::gradient_matches_fd(
          report, params,
          [](pegamp::BemParams& p, double h) { p.sparsity += h; }, eval,
          got.gradient, 1e-6, got.value, "bem sparsity gradient vs fd");
    } else if (sub == 1) {
      const auto got = pegamp::evidence_and_grad_bem(
          params, ParameterSelector::rate(c), r, tau);
      detail::gradient_matches_fd(
          report, params,
          [c](pegamp::BemParams& p, double h) { p.rates[c] += h; }, eval,
          got.gradient, 1e-6 * params.rates[c], got.value,
          "bem rate gradient vs fd");
    } else {
      const auto got = pegamp::evidence_and_grad_bem(
          params, ParameterSelector::weight(c), r, tau);
      const auto bump_logit = [c](pegamp::BemParams& p, double h) {
        std::vector<double> logits(p.weights.size());
        for (std::size_t i = 0; i < logits.size(); ++i)
          logits[i] = std::log(p.weights[i]);
        logits[c] += h;
        p.weights = pegamp::softmax(logits);
      };
      detail::gradient_matches_fd(report, params, bump_logit, eval,
                                  got.gradient, 1e-6, got.value,
                                  "bem weight-logit gradient vs fd");
    }
  } else if (which % 10 < 9) {  // Laplace channel
    const pegamp::LaplaceParams params = random_laplace(rng);
    const std::vector<double> r =
        random_r_vec(pegamp::InputChannelParams{params}, n, tau, rng);
    const auto got = pegamp::evidence_and_grad_laplace(params, r, tau);
    detail::gradient_matches_fd(
        report, params,
        [](pegamp::LaplaceParams& p, double h) { p.rate += h; },
        [&](const pegamp::LaplaceParams& p) {
          return pegamp::evidence_and_grad_laplace(p, r, tau).value;
        },
        got.gradient, 1e-6 * params.rate, got.value,
        "laplace rate gradient vs fd");
  } else {  // output noise variance
    std::uniform_real_distribution<double> theta_dist(0.05, 2.0);
    const pegamp::AwgnParams params{theta_dist(rng)};
    const double tau_q = random_tau(rng, 0.05, 2.0);
    const std::size_t m = 40;
    std::vector<double> q(m);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = z(rng);
      y[i] = q[i] + std::sqrt(params.variance + tau_q) * z(rng);
    }
    const auto got = pegamp::evidence_and_grad_awgn(params, q, y, tau_q);
    detail::gradient_matches_fd(
        report, params,
        [](pegamp::AwgnParams& p, double h) { p.variance += h; },
        [&](const pegamp::AwgnParams& p) {
          return pegamp::evidence_and_grad_awgn(p, q, y, tau_q).value;
        },
        got.gradient, 1e-6 * params.variance, got.value,
        "awgn variance gradient vs fd");
  }
}

inline Report param_est(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);

  for (int i = 0; i < 200; ++i) param_gradient_case(report, rng, i);

  // Line searches never decrease the objective and stay inside the box.
  const pegamp::ParamEstOptions opts;
  for (int i = 0; i < 60; ++i) {
    const pegamp::BgmParams params = random_bgm(rng);
    const double tau = random_tau(rng, 0.05, 2.0);
    const std::vector<double> r =
        random_r_vec(pegamp::InputChannelParams{params}, 30, tau, rng);
    const double lo = pegamp::feasibility::kSparsityLo;
    const double hi = pegamp::feasibility::kSparsityHi;
    const auto objective = [&](double s) {
      pegamp::BgmParams p = params;
      p.sparsity = s;
      return pegamp::evidence_and_grad_bgm(
          p, pegamp::ParameterSelector::sparsity(), r, tau);
    };
    const double start = params.sparsity;
    const double out = pegamp::line_search_maximize(
        objective, start, lo, hi, pegamp::make_line_search_config(lo, hi, opts));
    check(report, out >= lo && out <= hi, "line search left the box");
    check(report, objective(out).value >= objective(start).value - 1e-12,
          "line search decreased the objective");
  }

  // softmax: strictly positive entries summing to one.
  std::uniform_real_distribution<double> logit_dist(-20.0, 20.0);
  std::uniform_int_distribution<std::size_t> len_dist(1, 6);
  for (int i = 0; i < 40; ++i) {
    std::vector<double> logits(len_dist(rng));
    for (double& l : logits) l = logit_dist(rng);
    const std::vector<double> w = pegamp::softmax(logits);
    double sum = 0.0;
    bool positive = true;
    for (double v : w) {
      sum += v;
      positive = positive && v > 0.0;
    }
    check(report, positive, "softmax entry not positive");
    check(report, std::abs(sum - 1.0) <= 1e-10,
          describe("softmax sum", sum, 1.0));
  }

  // Full updates return parameters strictly inside their feasibility boxes.
  for (int i = 0; i < 20; ++i) {
    const int which = i % 3;
    pegamp::InputChannelParams prior;
    if (which == 0) prior = random_bgm(rng);
    else if (which == 1) prior = random_bem(rng);
    else prior = random_laplace(rng);
    const double tau = random_tau(rng, 0.05, 2.0);
    const std::vector<double> r = random_r_vec(prior, 40, tau, rng);
    std::vector<double> q(30);
    std::vector<double> y(30);
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      q[j] = z(rng);
      y[j] = q[j] + 0.3 * z(rng);
    }
    const pegamp::ParameterUpdate update = pegamp::update_all_parameters(
        prior, pegamp::AwgnParams{0.2}, r, tau, q, y, tau);
    namespace fb = pegamp::feasibility;
    bool inside = update.output.variance > fb::kScaleLo &&
                  update.output.variance < fb::kScaleHi;
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, pegamp::BgmParams>) {
            inside = inside && p.sparsity > fb::kSparsityLo &&
                     p.sparsity < fb::kSparsityHi;
            for (double m : p.means)
              inside = inside && m > fb::kMeanLo && m < fb::kMeanHi;
            for (double v : p.variances)
              inside = inside && v > fb::kScaleLo && v < fb::kScaleHi;
            for (double w : p.weights) inside = inside && w > 0.0 && w < 1.0;
          } else if constexpr (std::is_same_v<T, pegamp::BemParams>) {
            inside = inside && p.sparsity > fb::kSparsityLo &&
                     p.sparsity < fb::kSparsityHi;
            for (double a : p.rates)
              inside = inside && a > fb::kScaleLo && a < fb::kScaleHi;
            for (double w : p.weights) inside = inside && w > 0.0 && w < 1.0;
          } else {
            inside = inside && p.rate > fb::kScaleLo && p.rate < fb::kScaleHi;
          }
        },
        update.input);
    check(report, inside, "updated parameters left the feasibility box");
  }

  return report;
}

// ---------------------------------------------------------------------------
// gamp_core
// ---------------------------------------------------------------------------

inline Report gamp(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);

  const auto finite = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };

  // Random small problems: the state stays finite (or the engine raises its
  // divergence error), pseudo-variances stay nonnegative.
  std::uniform_int_distribution<std::size_t> n_dist(30, 80);
  std::uniform_real_distribution<double> sigma_dist(0.4, 0.9);
  std::uniform_real_distribution<double> rho_dist(0.1, 0.4);
  std::uniform_real_distribution<double> noise_dist(0.0, 0.1);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = n_dist(rng);
    const std::size_t m =
        std::max<std::size_t>(2, static_cast<std::size_t>(sigma_dist(rng) * n));
    const std::size_t s =
        std::max<std::size_t>(1, static_cast<std::size_t>(rho_dist(rng) * m));
    const pegamp::SignalFamily family = (i % 2 == 0)
                                            ? pegamp::SignalFamily::kBernoulliGauss
                                            : pegamp::SignalFamily::kBernoulliExp;
    const double noise_scale = noise_dist(rng);
    const pegamp::Problem problem =
        pegamp::generate_problem(n, m, s, family, noise_scale, rng());
    pegamp::SolverOptions opts;
    opts.max_iters = 60;
    const bool estimate = i % 3 == 0;
    try {
      const pegamp::RecoveryResult res =
          estimate
              ? pegamp::run_pe_gamp(
                    problem.a, problem.y,
                    pegamp::make_default_input_init(
                        family == pegamp::SignalFamily::kBernoulliGauss
                            ? pegamp::InputChannelKind::kBgm
                            : pegamp::InputChannelKind::kBem,
                        3, problem.a, problem.y),
                    pegamp::make_default_output_init(problem.a, problem.y), opts)
              : pegamp::run_oracle_gamp(
                    problem.a, problem.y,
                    pegamp::true_input_params(family, n, s),
                    pegamp::true_output_params(noise_scale), opts);
      check(report, finite(res.x_hat), "x_hat not finite");
      bool tau_ok = true;
      for (double t : res.tau_x_history)
        tau_ok = tau_ok && std::isfinite(t) && t >= 0.0;
      check(report, tau_ok, "tau_x history not finite/nonnegative");
      check(report, finite(res.residual_history), "residual history not finite");
    } catch (const std::runtime_error& e) {
      // A clean divergence report satisfies the finiteness-or-error contract.
      check(report,
            std::string(e.what()).find("divergence at iteration") == 0,
            std::string("unexpected runtime error: ") + e.what());
      check(report, true, "divergence reported");
      check(report, true, "divergence reported");
    }
  }

  // Noiseless, well-conditioned problems are solved to a small residual.
  for (int i = 0; i < 25; ++i) {
    const std::size_t n = 60;
    const std::size_t m = 36;
    const std::size_t s = 6;
    const pegamp::Problem problem = pegamp::generate_problem(
        n, m, s, pegamp::SignalFamily::kBernoulliGauss, 0.0, rng());
    pegamp::SolverOptions opts;
    const pegamp::RecoveryResult res = pegamp::run_oracle_gamp(
        problem.a, problem.y,
        pegamp::true_input_params(pegamp::SignalFamily::kBernoulliGauss, n, s),
        pegamp::true_output_params(0.0), opts);
    const std::vector<double> z = problem.a.apply(res.x_hat);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      num += (problem.y[j] - z[j]) * (problem.y[j] - z[j]);
      den += problem.y[j] * problem.y[j];
    }
    check(report, std::sqrt(num) <= 1e-3 * std::sqrt(den),
          describe("noiseless residual", std::sqrt(num),
                   1e-3 * std::sqrt(den)));
  }

  // Same seed, same bits.
  for (int i = 0; i < 6; ++i) {
    const std::uint64_t problem_seed = rng();
    const pegamp::Problem problem = pegamp::generate_problem(
        50, 30, 5, pegamp::SignalFamily::kBernoulliGauss, 0.05, problem_seed);
    const pegamp::Problem again = pegamp::generate_problem(
        50, 30, 5, pegamp::SignalFamily::kBernoulliGauss, 0.05, problem_seed);
    pegamp::SolverOptions opts;
    opts.max_iters = 40;
    const auto run = [&](const pegamp::Problem& p) {
      return pegamp::run_pe_gamp(
          p.a, p.y,
          pegamp::make_default_input_init(pegamp::InputChannelKind::kBgm, 3,
                                          p.a, p.y),
          pegamp::make_default_output_init(p.a, p.y), opts);
    };
    check(report, run(problem).x_hat == run(again).x_hat,
          "seeded rerun not bit-identical");
  }

  // With A = I the converged oracle estimate is a fixed point of the scalar
  // denoiser: at stationarity s = (y - x_hat)/theta, tau_q = tau_x,
  // tau_r = theta + tau_q and r = x_hat + tau_r s.
  for (int i = 0; i < 8; ++i) {
    const std::size_t n = 40;
    std::vector<double> identity(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) identity[j * n + j] = 1.0;
    const pegamp::SensingOperator a =
        pegamp::SensingOperator::from_dense(n, n, identity);
    const pegamp::BgmParams prior = random_bgm(rng);
    const double theta = 0.25;
    const std::vector<double> x =
        pegamp::sample_prior(pegamp::InputChannelParams{prior}, n, rng());
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + std::sqrt(theta) * z(rng);
    pegamp::SolverOptions opts;
    opts.max_iters = 800;
    opts.tol = 1e-14;
    const pegamp::RecoveryResult res = pegamp::run_oracle_gamp(
        a, y, pegamp::InputChannelParams{prior}, pegamp::AwgnParams{theta},
        opts);
    const double tau_r = theta + res.tau_x_history.back();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = res.x_hat[j] + tau_r * (y[j] - res.x_hat[j]) / theta;
      const double again =
          pegamp::gin_sum_product(pegamp::InputChannelParams{prior}, r, tau_r)
              .mean;
      worst = std::max(worst, std::abs(again - res.x_hat[j]));
    }
    check(report, worst <= 1e-8, describe("identity fixed point", worst, 0.0));
  }

  return report;
}

// ---------------------------------------------------------------------------
// state_evolution
// ---------------------------------------------------------------------------

inline Report state_evolution(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);

  std::uniform_real_distribution<double> beta_dist(1.2, 4.0);
  std::uniform_real_distribution<double> sparsity_dist(0.05, 0.4);
  std::uniform_real_distribution<double> theta_dist(1e-4, 0.1);
  for (int i = 0; i < 20; ++i) {
    pegamp::SeConfig config;
    config.beta = beta_dist(rng);
    config.mc_samples = 10000;
    config.seed = rng();
    config.prior_true = pegamp::BgmParams{sparsity_dist(rng), {1.0}, {0.0}, {1.0}};
    config.noise_true = pegamp::AwgnParams{theta_dist(rng)};
    config.prior_init = config.prior_true;
    config.noise_init = config.noise_true;
    config.estimate_parameters = i % 4 == 0;
    config.max_iters = 4;
    config.mse_tol = 1e-12;
    const std::vector<pegamp::SeState> traj = pegamp::se_run(config);
    for (std::size_t t = 1; t < traj.size(); ++t) {
      const pegamp::SeState& s = traj[t];
      check(report,
            close_rel(s.tau_q_bar, config.beta * s.tau_x_bar, 1e-12) ||
                s.tau_q_bar == config.beta * s.tau_x_bar,
            "tau_q_bar != beta * tau_x_bar");
      check(report,
            s.kq.xx == config.beta * s.kx.xx &&
                s.kq.xy == config.beta * s.kx.xy &&
                s.kq.yy == config.beta * s.kx.yy,
            "kq != beta * kx");
      check(report,
            std::isfinite(s.mse) && s.mse >= 0.0 && s.tau_r_bar > 0.0,
            "se state not finite/positive");
    }
  }

  // The output score's mean slope is exactly the reported curvature for the
  // Gaussian likelihood.
  std::normal_distribution<double> z(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const pegamp::AwgnParams theta{theta_dist(rng) + 0.01};
    const double tau_q = random_tau(rng, 0.05, 2.0);
    const double h = 1e-6;
    double slope_sum = 0.0;
    const int samples = 200;
    for (int k = 0; k < samples; ++k) {
      const double q = z(rng);
      const double y = q + std::sqrt(theta.variance + tau_q) * z(rng);
      const double s_hi =
          pegamp::gout_awgn_sum_product(theta, q + h, tau_q, y).mean;
      const double s_lo =
          pegamp::gout_awgn_sum_product(theta, q - h, tau_q, y).mean;
      slope_sum += -(s_hi - s_lo) / (2.0 * h);
    }
    const double want = 1.0 / (theta.variance + tau_q);
    check(report, close_rel(slope_sum / samples, want, 1e-6),
          describe("mc output slope", slope_sum / samples, want));
  }

  // An all-zero prior stays at zero error.
  for (int i = 0; i < 5; ++i) {
    pegamp::SeConfig config;
    config.beta = 2.0;
    config.mc_samples = 10000;
    config.seed = rng();
    config.prior_true = pegamp::BgmParams{0.0, {1.0}, {0.0}, {1.0}};
    config.noise_true = pegamp::AwgnParams{1e-6};
    config.prior_init = config.prior_true;
    config.noise_init = config.noise_true;
    config.estimate_parameters = false;
    config.max_iters = 3;
    const std::vector<pegamp::SeState> traj = pegamp::se_run(config);
    bool zero = true;
    for (const pegamp::SeState& s : traj) zero = zero && s.mse <= 1e-12;
    check(report, zero, "zero-sparsity trajectory has nonzero mse");
  }

  // Determinism of the full trajectory.
  for (int i = 0; i < 3; ++i) {
    pegamp::SeConfig config;
    config.beta = 2.0;
    config.mc_samples = 10000;
    config.seed = 1234 + i;
    config.prior_true = pegamp::BgmParams{0.1, {1.0}, {0.0}, {1.0}};
    config.noise_true = pegamp::AwgnParams{1e-3};
    config.prior_init = config.prior_true;
    config.noise_init = config.noise_true;
    config.estimate_parameters = false;
    config.max_iters = 3;
    const std::vector<pegamp::SeState> a = pegamp::se_run(config);
    const std::vector<pegamp::SeState> b = pegamp::se_run(config);
    bool same = a.size() == b.size();
    for (std::size_t t = 0; same && t < a.size(); ++t)
      same = a[t].mse == b[t].mse && a[t].tau_r_bar == b[t].tau_r_bar;
    check(report, same, "se trajectory not deterministic");
  }

  {
    pegamp::SeConfig config;
    config.mc_samples = 5000;
    config.prior_true = pegamp::BgmParams{0.1, {1.0}, {0.0}, {1.0}};
    config.prior_init = config.prior_true;
    bool threw = false;
    try {
      config.validate();
    } catch (const std::invalid_argument& e) {
      threw = std::string(e.what()) == "insufficient mc samples";
    }
    check(report, threw, "undersized sample pool accepted");
  }

  return report;
}

// ---------------------------------------------------------------------------
// harness
// ---------------------------------------------------------------------------

inline Report harness(std::uint64_t seed) {
  Report report;
  std::mt19937_64 rng(seed);

  // Matrix generator: unit-norm zero-mean rows, caches consistent.
  std::uniform_int_distribution<std::size_t> m_dist(2, 40);
  std::uniform_int_distribution<std::size_t> n_dist(2, 60);
  for (int i = 0; i < 25; ++i) {
    const std::size_t m = m_dist(rng);
    const std::size_t n = n_dist(rng);
    const pegamp::SensingOperator a = pegamp::generate_matrix(m, n, rng());
    bool rows_ok = true;
    for (std::size_t row = 0; row < m; ++row) {
      double norm_sq = 0.0;
      double mean = 0.0;
      for (std::size_t col = 0; col < n; ++col) {
        const double v = a.entries[row * n + col];
        norm_sq += v * v;
        mean += v;
      }
      rows_ok = rows_ok && std::abs(norm_sq - 1.0) <= 1e-12 &&
                std::abs(mean / n) <= 1e-12;
    }
    check(report, rows_ok, "generated row not centered/unit-norm");
    bool cache_ok = std::abs(a.frobenius_sq - double(m)) <= 1e-10;
    for (std::size_t col = 0; col < n; ++col) {
      double direct = 0.0;
      for (std::size_t row = 0; row < m; ++row) {
        const double v = a.entries[row * n + col];
        direct += v * v;
      }
      cache_ok = cache_ok && close_rel(a.column_sq_norms[col], direct, 1e-12,
                                       1e-15);
    }
    check(report, cache_ok, "column/frobenius caches inconsistent");
    const pegamp::SensingOperator again = pegamp::generate_matrix(m, n, 77);
    const pegamp::SensingOperator once = pegamp::generate_matrix(m, n, 77);
    check(report, again.entries == once.entries,
          "matrix generation not deterministic");
  }

  // Problem generator: exact support size, noiseless consistency, family
  // sign convention.
  for (int i = 0; i < 30; ++i) {
    const std::size_t n = 50;
    const std::size_t m = 30;
    const std::size_t s = 1 + i % 10;
    const pegamp::SignalFamily family =
        (i % 2 == 0) ? pegamp::SignalFamily::kBernoulliGauss
                     : pegamp::SignalFamily::kBernoulliExp;
    const pegamp::Problem problem =
        pegamp::generate_problem(n, m, s, family, 0.0, rng());
    std::size_t nonzeros = 0;
    bool sign_ok = true;
    for (double v : problem.x_true) {
      if (v != 0.0) ++nonzeros;
      if (family == pegamp::SignalFamily::kBernoulliExp)
        sign_ok = sign_ok && v >= 0.0;
    }
    check(report, nonzeros == s, "support size mismatch");
    check(report, sign_ok, "exponential signal with negative entry");
    const std::vector<double> z = problem.a.apply(problem.x_true);
    double diff = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j)
      diff = std::max(diff, std::abs(z[j] - problem.y[j]));
    check(report, diff <= 1e-12, "noiseless measurements differ from A x");
  }

  // Per-trial seeding: changing any key or the base changes the stream.
  for (int i = 0; i < 40; ++i) {
    const std::uint64_t base = rng();
    const std::uint64_t k1 = rng() % 100;
    const std::uint64_t k2 = rng() % 100;
    const std::uint64_t k3 = rng() % 100;
    const std::uint64_t s0 = pegamp::trial_seed(base, k1, k2, k3);
    check(report,
          s0 != pegamp::trial_seed(base + 1, k1, k2, k3) &&
              s0 != pegamp::trial_seed(base, k1 + 1, k2, k3) &&
              s0 != pegamp::trial_seed(base, k1, k2 + 1, k3) &&
              s0 != pegamp::trial_seed(base, k1, k2, k3 + 1),
          "trial seed collision under key perturbation");
  }

  // Metrics: threshold behavior and caps.
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 15; ++i) {
    std::vector<double> x(20);
    for (double& v : x) v = g(rng);
    check(report, pegamp::success(x, x) && pegamp::snr_db(x, x) == 300.0,
          "perfect recovery not capped/successful");
    std::vector<double> close = x;
    std::vector<double> far = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
      close[j] *= 1.0 + 5e-4;
      far[j] *= 1.0 + 2e-3;
    }
    check(report, pegamp::success(x, close), "5e-4 error not a success");
    check(report, !pegamp::success(x, far), "2e-3 error counted as success");
  }

  // CSV round trips reproduce the records exactly.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    pegamp::SweepResult result;
    const pegamp::SolverVariant variants[] = {
        pegamp::SolverVariant::kPeBgm, pegamp::SolverVariant::kPeBem,
        pegamp::SolverVariant::kPeLasso, pegamp::SolverVariant::kOracle};
    for (int cell = 0; cell < 4; ++cell) {
      pegamp::PtcCellResult ptc;
      ptc.sigma = unit(rng);
      ptc.rho = unit(rng);
      ptc.variant = variants[cell];
      ptc.success_rate = unit(rng);
      ptc.trials = 1 + int(rng() % 50);
      ptc.mean_iters = 200.0 * unit(rng);
      result.ptc_cells.push_back(ptc);
      pegamp::SnrCellResult snr;
      snr.m = 1 + rng() % 500;
      snr.variant = variants[cell];
      snr.mean_snr_db = 40.0 * (unit(rng) - 0.25);
      snr.std_snr_db = 5.0 * unit(rng);
      snr.trials = 1 + int(rng() % 50);
      result.snr_cells.push_back(snr);
    }
    std::stringstream ptc_io;
    pegamp::write_ptc_csv(ptc_io, result);
    const pegamp::SweepResult ptc_back = pegamp::parse_ptc_csv(ptc_io);
    bool same = ptc_back.ptc_cells.size() == result.ptc_cells.size();
    for (std::size_t c = 0; same && c < result.ptc_cells.size(); ++c) {
      const auto& want = result.ptc_cells[c];
      const auto& got = ptc_back.ptc_cells[c];
      same = got.sigma == want.sigma && got.rho == want.rho &&
             got.variant == want.variant &&
             got.success_rate == want.success_rate &&
             got.trials == want.trials && got.mean_iters == want.mean_iters;
    }
    check(report, same, "ptc csv round trip not exact");
    std::stringstream snr_io;
    pegamp::write_snr_csv(snr_io, result);
    const pegamp::SweepResult snr_back = pegamp::parse_snr_csv(snr_io);
    same = snr_back.snr_cells.size() == result.snr_cells.size();
    for (std::size_t c = 0; same && c < result.snr_cells.size(); ++c) {
      const auto& want = result.snr_cells[c];
      const auto& got = snr_back.snr_cells[c];
      same = got.m == want.m && got.variant == want.variant &&
             got.mean_snr_db == want.mean_snr_db &&
             got.std_snr_db == want.std_snr_db && got.trials == want.trials;
    }
    check(report, same, "snr csv round trip not exact");
  }

  // PGM round trip on integer-valued images.
  for (int i = 0; i < 8; ++i) {
    const std::size_t side = 1 + rng() % 16;
    std::vector<double> image(side * side);
    for (double& v : image) v = double(rng() % 256);
    const std::string path = "/tmp/pegamp_invariant_" + std::to_string(seed) +
                             "_" + std::to_string(i) + ".pgm";
    pegamp::write_pgm(path, image, side);
    std::size_t side_back = 0;
    const std::vector<double> back = pegamp::read_pgm(path, side_back);
    std::remove(path.c_str());
    check(report, side_back == side && back == image,
          "pgm round trip not exact");
  }

  // Config maps resolve to the matching fields; unknown keys are rejected.
  for (int i = 0; i < 10; ++i) {
    const std::size_t n = 100 + rng() % 400;
    const int trials = 1 + int(rng() % 30);
    const std::map<std::string, std::string> kv{
        {"n", std::to_string(n)},
        {"trials", std::to_string(trials)},
        {"sigma_grid", "0.25,0.5"},
        {"signal_family", i % 2 == 0 ? "bg" : "be"},
        {"variants", "pe_bgm,oracle"},
        {"damping", "0.8"}};
    const pegamp::ExperimentConfig cfg = pegamp::experiment_config_from_map(kv);
    check(report,
          cfg.n == n && cfg.trials == trials && cfg.sigma_grid.size() == 2 &&
              cfg.solver.damping == 0.8 &&
              cfg.signal_family == (i % 2 == 0
                                        ? pegamp::SignalFamily::kBernoulliGauss
                                        : pegamp::SignalFamily::kBernoulliExp),
          "config map did not resolve");
  }
  for (int i = 0; i < 5; ++i) {
    bool threw = false;
    try {
      pegamp::experiment_config_from_map({{"no_such_key_" + std::to_string(i),
                                           "1"}});
    } catch (const std::invalid_argument& e) {
      threw = std::string(e.what()).rfind("unknown config key", 0) == 0;
    }
    check(report, threw, "unknown config key accepted");
  }

  // Cosine basis: perfect reconstruction and unitary norm.
  for (const std::size_t side : {1u, 2u, 3u, 4u, 8u, 16u}) {
    const pegamp::Dct2Basis basis(side);
    std::vector<double> image(side * side);
    for (double& v : image) v = g(rng);
    const std::vector<double> coeffs = basis.analyze(image);
    const std::vector<double> back = basis.synthesize(coeffs);
    double diff = 0.0;
    double norm_img = 0.0;
    double norm_coef = 0.0;
    for (std::size_t j = 0; j < image.size(); ++j) {
      diff = std::max(diff, std::abs(back[j] - image[j]));
      norm_img += image[j] * image[j];
      norm_coef += coeffs[j] * coeffs[j];
    }
    check(report, diff <= 1e-10, "cosine basis not invertible");
    check(report, close_rel(norm_coef, norm_img, 1e-10, 1e-12),
          "cosine basis not norm-preserving");
  }

  // parallel_for covers each index exactly once regardless of worker count.
  for (const std::size_t workers : {1u, 2u, 4u}) {
    std::vector<int> hits(97, 0);
    pegamp::parallel_for(hits.size(), workers,
                         [&](std::size_t idx) { hits[idx] += int(idx); });
    bool ok = true;
    for (std::size_t idx = 0; idx < hits.size(); ++idx)
      ok = ok && hits[idx] == int(idx);
    check(report, ok, "parallel_for missed or repeated an index");
  }

  return report;
}

}  // namespace invariants
