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
#include "pegamp/param_est.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pegamp/special_functions.hpp"

namespace pegamp {

namespace {

constexpr double kLog2Const = 0.69314718055994530942;
// log(pi/2) / 2; combined with (1/2) log(tau) it forms the log of the
// sqrt(pi*tau/2) tail-mass prefactor of the erfcx-based channels.
constexpr double kHalfLogPiOver2 = 0.22579135264472743236;

void check_pseudo_variance(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("nonpositive pseudo-variance");
}

// Stable log(e^a + e^b) for exactly two terms (the hot two-branch case).
double lse2(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Logits reproducing the given weights through softmax, shifted so the
// largest is 0 and clamped into the logit feasibility box.  Zero (or
// astronomically small) weights are floored at the box edge rather than
// rejected, so a component that collapsed can be revived by later updates.
std::vector<double> weight_logits(const std::vector<double>& weights) {
  std::vector<double> logits(weights.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < weights.size(); ++c) {
    logits[c] = std::log(weights[c]);
    top = std::max(top, logits[c]);
  }
  for (double& l : logits)
    l = std::clamp(l - top, feasibility::kLogitLo, feasibility::kLogitHi);
  return logits;
}

// ---------------------------------------------------------------------------
// Cached evidence contexts.  Each context is built once per update pass from
// a frozen parameter snapshot; the per-parameter eval methods then cost O(N)
// (or O(N*C) for weights) per objective evaluation, which is what keeps the
// per-iteration line searches cheap.  The public evidence_and_grad_* entry
// points run through the same eval methods, so the searched objective and
// the externally observable one are numerically identical.
// ---------------------------------------------------------------------------

// Gaussian-mixture input channel.  Evidence per point:
//   log[(1-λ)κ₁ + λ Σ_c w_c κ₂(c)],
//   κ₁ = e^{-r²/(2τ)},  κ₂(c) = sqrt(τ/(v_c+τ)) e^{-(r-μ_c)²/(2(v_c+τ))}.
struct BgmContext {
  BgmParams p;
  double tau;
  std::vector<double> r;
  std::size_t n, cc;
  std::vector<double> la;     // log κ₁ per point
  std::vector<double> lk;     // log κ₂(c) per point, layout [j*cc + c]
  std::vector<double> lb;     // log Σ_c w_c κ₂(c) per point
  std::vector<double> shift;  // per-point exponent shift (max branch log)
  std::vector<double> p0l;    // shifted spike branch (1-λ)κ₁
  std::vector<double> pl;     // shifted λ κ₂(c) (weight left out), [j*cc + c]
  std::vector<double> rest;   // branch-c complement of the evidence
                              // denominator, layout [c*n + j]

  BgmContext(const BgmParams& params, std::span<const double> r_vec,
             double tau_r)
      : p(params), tau(tau_r), r(r_vec.begin(), r_vec.end()),
        n(r.size()), cc(p.components()) {
    la.resize(n);
    lk.resize(n * cc);
    lb.resize(n);
    shift.resize(n);
    p0l.resize(n);
    pl.resize(n * cc);
    rest.assign(cc * n, 0.0);
    const double lsp = std::log(p.sparsity);
    const double l1msp = std::log1p(-p.sparsity);
    std::vector<double> half(cc), inv2(cc), lw(cc);
    for (std::size_t c = 0; c < cc; ++c) {
      const double vt = p.variances[c] + tau;
      half[c] = 0.5 * std::log(tau / vt);
      inv2[c] = 0.5 / vt;
      lw[c] = std::log(p.weights[c]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      la[j] = -r[j] * r[j] / (2.0 * tau);
      const double lw0 = l1msp + la[j];
      double top = lw0;
      double lbj = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cc; ++c) {
        const double d = r[j] - p.means[c];
        const double lkc = half[c] - d * d * inv2[c];
        lk[j * cc + c] = lkc;
        lbj = lse2(lbj, lw[c] + lkc);
        top = std::max(top, lsp + lw[c] + lkc);
      }
      lb[j] = lbj;
      shift[j] = top;
      p0l[j] = std::exp(lw0 - top);
      for (std::size_t c = 0; c < cc; ++c)
        pl[j * cc + c] = std::exp(lsp + lk[j * cc + c] - top);
      for (std::size_t c = 0; c < cc; ++c) {
        double rc = p0l[j];
        for (std::size_t k = 0; k < cc; ++k)
          if (k != c) rc += p.weights[k] * pl[j * cc + k];
        rest[c * n + j] = rc;
      }
    }
  }

  EvidenceGradient eval_sparsity(double sp) const {
    const double l0 = std::log1p(-sp);
    const double l1 = std::log(sp);
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = l0 + la[j];
      const double vj = lse2(a, l1 + lb[j]);
      const double rho0 = std::exp(a - vj);
      out.value += vj;
      out.gradient += (1.0 - rho0) / sp - rho0 / (1.0 - sp);
    }
    return out;
  }

  // Objective in the logit of weight c, the other logits held at base.
  EvidenceGradient eval_weight_logit(const std::vector<double>& base,
                                     std::size_t c, double omega) const {
    std::vector<double> logits = base;
    logits[c] = omega;
    const std::vector<double> w = softmax(logits);
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      double den = p0l[j];
      for (std::size_t k = 0; k < cc; ++k) den += w[k] * pl[j * cc + k];
      out.value += shift[j] + std::log(den);
      const double rho0 = p0l[j] / den;
      const double rhoc = w[c] * pl[j * cc + c] / den;
      out.gradient += rhoc - w[c] * (1.0 - rho0);
    }
    return out;
  }

  EvidenceGradient eval_mean(std::size_t c, double mu) const {
    const double vt = p.variances[c] + tau;
    const double halfc = 0.5 * std::log(tau / vt);
    const double base = std::log(p.sparsity * p.weights[c]);
    const double* rc = rest.data() + c * n;
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = r[j] - mu;
      const double t = std::exp(base + halfc - d * d / (2.0 * vt) - shift[j]);
      const double den = rc[j] + t;
      out.value += shift[j] + std::log(den);
      out.gradient += (t / den) * d / vt;
    }
    return out;
  }

  EvidenceGradient eval_variance(std::size_t c, double v) const {
    const double vt = v + tau;
    const double halfc = 0.5 * std::log(tau / vt);
    const double base = std::log(p.sparsity * p.weights[c]);
    const double mu = p.means[c];
    const double* rc = rest.data() + c * n;
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = r[j] - mu;
      const double t = std::exp(base + halfc - d * d / (2.0 * vt) - shift[j]);
      const double den = rc[j] + t;
      out.value += shift[j] + std::log(den);
      out.gradient +=
          (t / den) * (-0.5 / vt + d * d / (2.0 * vt * vt));
    }
    return out;
  }
};

// Exponential-mixture input channel.  Evidence per point:
//   log κ₁ + log[(1-λ) + λ Σ_c w_c κ₂(c)],
//   κ₂(c) = a_c sqrt(πτ/2) erfcx((a_c τ - r)/sqrt(2τ)),
// with the common κ₁ = e^{-r²/(2τ)} factored out of every branch.
struct BemContext {
  BemParams p;
  double tau;
  std::vector<double> r;
  std::size_t n, cc;
  double khalf;               // log sqrt(πτ/2)
  double sqrt2tau;
  std::vector<double> la;     // log κ₁ per point
  std::vector<double> lk;     // log κ₂(c), [j*cc + c]
  std::vector<double> lb;     // log Σ_c w_c κ₂(c)
  std::vector<double> shift;  // per-point exponent shift
  std::vector<double> p0l;    // shifted spike branch (1-λ)
  std::vector<double> pl;     // shifted λ κ₂(c) (weight left out)
  std::vector<double> rest;   // [c*n + j]

  BemContext(const BemParams& params, std::span<const double> r_vec,
             double tau_r)
      : p(params), tau(tau_r), r(r_vec.begin(), r_vec.end()),
        n(r.size()), cc(p.components()) {
    khalf = kHalfLogPiOver2 + 0.5 * std::log(tau);
    sqrt2tau = std::sqrt(2.0 * tau);
    la.resize(n);
    lk.resize(n * cc);
    lb.resize(n);
    shift.resize(n);
    p0l.resize(n);
    pl.resize(n * cc);
    rest.assign(cc * n, 0.0);
    const double lsp = std::log(p.sparsity);
    const double lw0 = std::log1p(-p.sparsity);
    std::vector<double> lw(cc), lrate(cc);
    for (std::size_t c = 0; c < cc; ++c) {
      lw[c] = std::log(p.weights[c]);
      lrate[c] = std::log(p.rates[c]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      la[j] = -r[j] * r[j] / (2.0 * tau);
      double top = lw0;
      double lbj = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cc; ++c) {
        const double lkc =
            lrate[c] + khalf +
            log_erfcx((p.rates[c] * tau - r[j]) / sqrt2tau);
        lk[j * cc + c] = lkc;
        lbj = lse2(lbj, lw[c] + lkc);
        top = std::max(top, lsp + lw[c] + lkc);
      }
      lb[j] = lbj;
      shift[j] = top;
      p0l[j] = std::exp(lw0 - top);
      for (std::size_t c = 0; c < cc; ++c)
        pl[j * cc + c] = std::exp(lsp + lk[j * cc + c] - top);
      for (std::size_t c = 0; c < cc; ++c) {
        double rc = p0l[j];
        for (std::size_t k = 0; k < cc; ++k)
          if (k != c) rc += p.weights[k] * pl[j * cc + k];
        rest[c * n + j] = rc;
      }
    }
  }

  EvidenceGradient eval_sparsity(double sp) const {
    const double l0 = std::log1p(-sp);
    const double l1 = std::log(sp);
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      const double denom_log = lse2(l0, l1 + lb[j]);
      const double rho0 = std::exp(l0 - denom_log);
      out.value += la[j] + denom_log;
      out.gradient += (1.0 - rho0) / sp - rho0 / (1.0 - sp);
    }
    return out;
  }

  EvidenceGradient eval_weight_logit(const std::vector<double>& base,
                                     std::size_t c, double omega) const {
    std::vector<double> logits = base;
    logits[c] = omega;
    const std::vector<double> w = softmax(logits);
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      double den = p0l[j];
      for (std::size_t k = 0; k < cc; ++k) den += w[k] * pl[j * cc + k];
      out.value += la[j] + shift[j] + std::log(den);
      const double rho0 = p0l[j] / den;
      const double rhoc = w[c] * pl[j * cc + c] / den;
      out.gradient += rhoc - w[c] * (1.0 - rho0);
    }
    return out;
  }

  EvidenceGradient eval_rate(std::size_t c, double a) const {
    const double lswa = std::log(p.sparsity * p.weights[c]) +
                        std::log(a * tau);  // log(λ w_c a τ)
    const double base = std::log(p.sparsity * p.weights[c]);
    const double loga = std::log(a);
    const double* rc = rest.data() + c * n;
    EvidenceGradient out;
    for (std::size_t j = 0; j < n; ++j) {
      const double lkc =
          loga + khalf + log_erfcx((a * tau - r[j]) / sqrt2tau);
      const double t = std::exp(base + lkc - shift[j]);
      const double den = rc[j] + t;
      out.value += la[j] + shift[j] + std::log(den);
      // d κ₂/da = κ₂ (1/a + aτ - r) - aτ; the second piece enters through
      // λ w_c a τ over the full (unshifted) denominator.
      out.gradient += (t / den) * (1.0 / a + a * tau - r[j]) -
                      std::exp(lswa - shift[j]) / den;
    }
    return out;
  }
};

// Laplace input channel.  Evidence per point:
//   log κ₁ + log(κ₂ + κ₃) - log 2,
//   κ₂/κ₃ = λ sqrt(πτ/2) erfcx((λτ ∓ r)/sqrt(2τ)).
struct LaplaceContext {
  double tau;
  std::vector<double> r;
  double khalf;
  double sqrt2tau;
  std::vector<double> la;

  LaplaceContext(std::span<const double> r_vec, double tau_r)
      : tau(tau_r), r(r_vec.begin(), r_vec.end()) {
    khalf = kHalfLogPiOver2 + 0.5 * std::log(tau);
    sqrt2tau = std::sqrt(2.0 * tau);
    la.resize(r.size());
    for (std::size_t j = 0; j < r.size(); ++j)
      la[j] = -r[j] * r[j] / (2.0 * tau);
  }

  EvidenceGradient eval_rate(double lam) const {
    const double loglam = std::log(lam);
    const double lt = lam * tau;
    // 2λτ / (κ₂+κ₃) with the λ sqrt(πτ/2) prefactor cancelled in the log.
    const double lcorr = std::log(2.0 * tau) - khalf;
    EvidenceGradient out;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double l2 = log_erfcx((lt - r[j]) / sqrt2tau);
      const double l3 = log_erfcx((lt + r[j]) / sqrt2tau);
      const double ls = lse2(l2, l3);
      out.value += la[j] + loglam + khalf + ls - kLog2Const;
      const double rho2 = std::exp(l2 - ls);
      const double rho3 = std::exp(l3 - ls);
      out.gradient += rho2 * (1.0 / lam + lt - r[j]) +
                      rho3 * (1.0 / lam + lt + r[j]) -
                      std::exp(lcorr - ls);
    }
    return out;
  }
};

// AWGN output channel.  Evidence Σ_i [-(1/2)log(θ+τq) - (y-q)²/(2(θ+τq))];
// only the residual sum of squares and the count survive precomputation, so
// every evaluation is O(1).
struct AwgnContext {
  double tau;
  double ssr = 0.0;
  double count = 0.0;

  AwgnContext(std::span<const double> q_vec, std::span<const double> y_vec,
              double tau_q)
      : tau(tau_q), count(static_cast<double>(q_vec.size())) {
    for (std::size_t i = 0; i < q_vec.size(); ++i) {
      const double d = y_vec[i] - q_vec[i];
      ssr += d * d;
    }
  }

  EvidenceGradient eval_theta(double theta) const {
    const double vt = theta + tau;
    return {-0.5 * count * std::log(vt) - ssr / (2.0 * vt),
            ssr / (2.0 * vt * vt) - count / (2.0 * vt)};
  }
};

void throw_if_degenerate(const EvidenceGradient& eg) {
  if (std::isnan(eg.value) || std::isnan(eg.gradient))
    throw std::runtime_error("degenerate evidence");
}

void check_component(std::size_t c, std::size_t count) {
  if (c >= count) throw std::invalid_argument("selector component out of range");
}

void check_box(bool ok) {
  if (!ok) throw std::invalid_argument("out of feasibility box");
}

// Wraps a direct-space objective into log-space for the scale parameters
// (chain rule on the gradient).
EvidenceObjective log_space(std::function<EvidenceGradient(double)> direct) {
  return [direct = std::move(direct)](double u) {
    const double x = std::exp(u);
    EvidenceGradient eg = direct(x);
    return EvidenceGradient{eg.value, eg.gradient * x};
  };
}

}  // namespace

void LineSearchConfig::validate() const {
  if (!(shrink > 0.0) || !(shrink < 1.0))
    throw std::invalid_argument("shrink out of (0,1)");
  if (!(step_up > 0.0)) throw std::invalid_argument("nonpositive step_up");
  if (!(step_down < 0.0)) throw std::invalid_argument("nonnegative step_down");
  if (max_outer_iters <= 0)
    throw std::invalid_argument("nonpositive iteration budget");
  if (!(convergence_tol > 0.0))
    throw std::invalid_argument("nonpositive tolerance");
}

LineSearchConfig make_line_search_config(double lo, double hi,
                                         const ParamEstOptions& opts) {
  if (!(lo < hi)) throw std::invalid_argument("invalid box");
  const double width = hi - lo;
  LineSearchConfig cfg;
  cfg.shrink = opts.shrink;
  cfg.step_up = opts.step_fraction * width;
  cfg.step_down = -opts.step_fraction * width;
  cfg.max_outer_iters = opts.max_outer_iters;
  cfg.convergence_tol = opts.tol_fraction * width;
  cfg.validate();
  return cfg;
}

double line_search_maximize(const EvidenceObjective& objective, double start,
                            double lo, double hi,
                            const LineSearchConfig& cfg) {
  cfg.validate();
  if (!(lo < hi)) throw std::invalid_argument("invalid box");
  const double margin = 1e-12 * (hi - lo);
  const double blo = lo + margin;
  const double bhi = hi - margin;
  const auto clamp = [&](double v) { return std::clamp(v, blo, bhi); };

  double x = clamp(start);
  EvidenceGradient hx = objective(x);
  if (!std::isfinite(hx.value)) throw std::runtime_error("invalid start");

  // The probe lengths shrink in place and stay shrunk for the rest of the
  // invocation, so each overshoot permanently refines the scale on which
  // later moves are made.
  double step_up = cfg.step_up;
  double step_down = cfg.step_down;
  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    const double g = hx.gradient;
    if (g == 0.0 || !std::isfinite(g)) break;
    double* step = g > 0.0 ? &step_up : &step_down;
    bool accepted = false;
    double moved = 0.0;
    // Shrink the probe until the objective stops decreasing; accept only
    // non-decreasing moves so the iterate sequence is monotone in h.
    while (true) {
      const double cand = clamp(x + *step);
      const EvidenceGradient hc = objective(cand);
      if (hc.value >= hx.value) {
        moved = std::abs(cand - x);
        x = cand;
        hx = hc;
        accepted = true;
        break;
      }
      *step *= cfg.shrink;
      if (std::abs(*step) < cfg.convergence_tol) break;
    }
    if (!accepted) break;  // no improving step at any scale: keep x
    if (moved < cfg.convergence_tol) break;
  }
  return x;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("empty reduction");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    z += out[i];
  }
  for (double& w : out) w /= z;
  return out;
}

EvidenceGradient evidence_and_grad_bgm(const BgmParams& params,
                                       ParameterSelector which,
                                       std::span<const double> r_vec,
                                       double tau_r) {
  params.validate();
  check_pseudo_variance(tau_r);
  const BgmContext ctx(params, r_vec, tau_r);
  EvidenceGradient out;
  switch (which.kind) {
    case ParameterSelector::Kind::kSparsity:
      out = ctx.eval_sparsity(params.sparsity);
      break;
    case ParameterSelector::Kind::kWeight: {
      check_component(which.component, params.components());
      const std::vector<double> logits = weight_logits(params.weights);
      out = ctx.eval_weight_logit(logits, which.component,
                                  logits[which.component]);
      break;
    }
    case ParameterSelector::Kind::kMean:
      check_component(which.component, params.components());
      out = ctx.eval_mean(which.component, params.means[which.component]);
      break;
    case ParameterSelector::Kind::kVariance:
      check_component(which.component, params.components());
      out = ctx.eval_variance(which.component,
                              params.variances[which.component]);
      break;
    default:
      throw std::invalid_argument("selector not applicable to channel");
  }
  throw_if_degenerate(out);
  return out;
}

EvidenceGradient evidence_and_grad_bem(const BemParams& params,
                                       ParameterSelector which,
                                       std::span<const double> r_vec,
                                       double tau_r) {
  params.validate();
  check_pseudo_variance(tau_r);
  const BemContext ctx(params, r_vec, tau_r);
  EvidenceGradient out;
  switch (which.kind) {
    case ParameterSelector::Kind::kSparsity:
      out = ctx.eval_sparsity(params.sparsity);
      break;
    case ParameterSelector::Kind::kWeight: {
      check_component(which.component, params.components());
      const std::vector<double> logits = weight_logits(params.weights);
      out = ctx.eval_weight_logit(logits, which.component,
                                  logits[which.component]);
      break;
    }
    case ParameterSelector::Kind::kRate:
      check_component(which.component, params.components());
      out = ctx.eval_rate(which.component, params.rates[which.component]);
      break;
    default:
      throw std::invalid_argument("selector not applicable to channel");
  }
  throw_if_degenerate(out);
  return out;
}

EvidenceGradient evidence_and_grad_laplace(const LaplaceParams& params,
                                           std::span<const double> r_vec,
                                           double tau_r) {
  params.validate();
  check_pseudo_variance(tau_r);
  const LaplaceContext ctx(r_vec, tau_r);
  const EvidenceGradient out = ctx.eval_rate(params.rate);
  throw_if_degenerate(out);
  return out;
}

EvidenceGradient evidence_and_grad_awgn(const AwgnParams& params,
                                        std::span<const double> q_vec,
                                        std::span<const double> y_vec,
                                        double tau_q) {
  if (!(params.variance > 0.0))
    throw std::invalid_argument("out of feasibility box");
  check_pseudo_variance(tau_q);
  if (q_vec.size() != y_vec.size())
    throw std::invalid_argument("mismatched lengths");
  const AwgnContext ctx(q_vec, y_vec, tau_q);
  const EvidenceGradient out = ctx.eval_theta(params.variance);
  throw_if_degenerate(out);
  return out;
}

namespace {

BgmParams update_bgm(const BgmParams& p, std::span<const double> r_vec,
                     double tau_r, const ParamEstOptions& opts) {
  check_box(p.sparsity >= feasibility::kSparsityLo &&
            p.sparsity <= feasibility::kSparsityHi);
  for (double m : p.means)
    check_box(m >= feasibility::kMeanLo && m <= feasibility::kMeanHi);
  for (double v : p.variances)
    check_box(v >= feasibility::kScaleLo && v <= feasibility::kScaleHi);

  const BgmContext ctx(p, r_vec, tau_r);
  BgmParams out = p;

  const LineSearchConfig cfg_sp = make_line_search_config(
      feasibility::kSparsityLo, feasibility::kSparsityHi, opts);
  out.sparsity = line_search_maximize(
      [&](double v) { return ctx.eval_sparsity(v); }, p.sparsity,
      feasibility::kSparsityLo, feasibility::kSparsityHi, cfg_sp);

  const std::vector<double> logits = weight_logits(p.weights);
  std::vector<double> new_logits = logits;
  const LineSearchConfig cfg_w = make_line_search_config(
      feasibility::kLogitLo, feasibility::kLogitHi, opts);
  for (std::size_t c = 0; c < p.components(); ++c) {
    new_logits[c] = line_search_maximize(
        [&](double om) { return ctx.eval_weight_logit(logits, c, om); },
        logits[c], feasibility::kLogitLo, feasibility::kLogitHi, cfg_w);
  }
  out.weights = softmax(new_logits);

  const LineSearchConfig cfg_m = make_line_search_config(
      feasibility::kMeanLo, feasibility::kMeanHi, opts);
  for (std::size_t c = 0; c < p.components(); ++c) {
    out.means[c] = line_search_maximize(
        [&](double mu) { return ctx.eval_mean(c, mu); }, p.means[c],
        feasibility::kMeanLo, feasibility::kMeanHi, cfg_m);
  }

  const double llo = std::log(feasibility::kScaleLo);
  const double lhi = std::log(feasibility::kScaleHi);
  const LineSearchConfig cfg_v = make_line_search_config(llo, lhi, opts);
  for (std::size_t c = 0; c < p.components(); ++c) {
    const double u = line_search_maximize(
        log_space([&](double v) { return ctx.eval_variance(c, v); }),
        std::log(p.variances[c]), llo, lhi, cfg_v);
    out.variances[c] = std::exp(u);
  }
  return out;
}

BemParams update_bem(const BemParams& p, std::span<const double> r_vec,
                     double tau_r, const ParamEstOptions& opts) {
  check_box(p.sparsity >= feasibility::kSparsityLo &&
            p.sparsity <= feasibility::kSparsityHi);
  for (double a : p.rates)
    check_box(a >= feasibility::kScaleLo && a <= feasibility::kScaleHi);

  const BemContext ctx(p, r_vec, tau_r);
  BemParams out = p;

  const LineSearchConfig cfg_sp = make_line_search_config(
      feasibility::kSparsityLo, feasibility::kSparsityHi, opts);
  out.sparsity = line_search_maximize(
      [&](double v) { return ctx.eval_sparsity(v); }, p.sparsity,
      feasibility::kSparsityLo, feasibility::kSparsityHi, cfg_sp);

  const std::vector<double> logits = weight_logits(p.weights);
  std::vector<double> new_logits = logits;
  const LineSearchConfig cfg_w = make_line_search_config(
      feasibility::kLogitLo, feasibility::kLogitHi, opts);
  for (std::size_t c = 0; c < p.components(); ++c) {
    new_logits[c] = line_search_maximize(
        [&](double om) { return ctx.eval_weight_logit(logits, c, om); },
        logits[c], feasibility::kLogitLo, feasibility::kLogitHi, cfg_w);
  }
  out.weights = softmax(new_logits);

  const double llo = std::log(feasibility::kScaleLo);
  const double lhi = std::log(feasibility::kScaleHi);
  const LineSearchConfig cfg_a = make_line_search_config(llo, lhi, opts);
  for (std::size_t c = 0; c < p.components(); ++c) {
    const double u = line_search_maximize(
        log_space([&](double a) { return ctx.eval_rate(c, a); }),
        std::log(p.rates[c]), llo, lhi, cfg_a);
    out.rates[c] = std::exp(u);
  }
  return out;
}

LaplaceParams update_laplace(const LaplaceParams& p,
                             std::span<const double> r_vec, double tau_r,
                             const ParamEstOptions& opts) {
  check_box(p.rate >= feasibility::kScaleLo &&
            p.rate <= feasibility::kScaleHi);
  const LaplaceContext ctx(r_vec, tau_r);
  const double llo = std::log(feasibility::kScaleLo);
  const double lhi = std::log(feasibility::kScaleHi);
  const LineSearchConfig cfg = make_line_search_config(llo, lhi, opts);
  const double u = line_search_maximize(
      log_space([&](double lam) { return ctx.eval_rate(lam); }),
      std::log(p.rate), llo, lhi, cfg);
  return LaplaceParams{std::exp(u)};
}

}  // namespace

InputChannelParams update_input_parameters(const InputChannelParams& prior,
                                           std::span<const double> r_vec,
                                           double tau_r,
                                           const ParamEstOptions& opts) {
  validate(prior);
  check_pseudo_variance(tau_r);
  return std::visit(
      [&](const auto& p) -> InputChannelParams {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BgmParams>)
          return update_bgm(p, r_vec, tau_r, opts);
        else if constexpr (std::is_same_v<P, BemParams>)
          return update_bem(p, r_vec, tau_r, opts);
        else
          return update_laplace(p, r_vec, tau_r, opts);
      },
      prior);
}

AwgnParams update_output_parameters(const AwgnParams& theta,
                                    std::span<const double> q_vec,
                                    std::span<const double> y_vec,
                                    double tau_q,
                                    const ParamEstOptions& opts) {
  theta.validate();
  check_pseudo_variance(tau_q);
  if (q_vec.size() != y_vec.size())
    throw std::invalid_argument("mismatched lengths");
  check_box(theta.variance >= feasibility::kScaleLo &&
            theta.variance <= feasibility::kScaleHi);
  const AwgnContext ctx(q_vec, y_vec, tau_q);
  const double llo = std::log(feasibility::kScaleLo);
  const double lhi = std::log(feasibility::kScaleHi);
  const LineSearchConfig cfg = make_line_search_config(llo, lhi, opts);
  const double u = line_search_maximize(
      log_space([&](double th) { return ctx.eval_theta(th); }),
      std::log(theta.variance), llo, lhi, cfg);
  return AwgnParams{std::exp(u)};
}

ParameterUpdate update_all_parameters(const InputChannelParams& prior,
                                      const AwgnParams& theta,
                                      std::span<const double> r_vec,
                                      double tau_r,
                                      std::span<const double> q_vec,
                                      std::span<const double> y_vec,
                                      double tau_q,
                                      const ParamEstOptions& opts) {
  // Validation errors (invalid or out-of-box parameters) propagate; runtime
  // failures inside a search leave the previous estimates in place so one
  // bad update cannot corrupt the solve.
  validate(prior);
  theta.validate();
  try {
    return ParameterUpdate{
        update_input_parameters(prior, r_vec, tau_r, opts),
        update_output_parameters(theta, q_vec, y_vec, tau_q, opts)};
  } catch (const std::runtime_error&) {
    return ParameterUpdate{prior, theta};
  }
}

}  // namespace pegamp
