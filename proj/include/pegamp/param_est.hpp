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
#include <functional>
#include <span>
#include <vector>

#include "pegamp/channels.hpp"

// Maximum-a-posteriori estimation of the channel parameters from the current
// message-passing state.  Each parameter is improved by a derivative-guided
// line search on its marginal log-evidence, holding every other parameter at
// its previous value; flat parameter priors are assumed, so the prior term is
// a dropped constant.
namespace pegamp {

// Feasibility boxes.  Every estimated parameter is kept inside these; scale
// parameters (variances, rates, noise variance) are searched in log space
// over the box, mixture weights through bounded logits.
namespace feasibility {
inline constexpr double kSparsityLo = 1e-6;
inline constexpr double kSparsityHi = 1.0 - 1e-6;
inline constexpr double kMeanLo = -1e3;
inline constexpr double kMeanHi = 1e3;
inline constexpr double kScaleLo = 1e-8;
inline constexpr double kScaleHi = 1e8;
inline constexpr double kLogitLo = -20.0;
inline constexpr double kLogitHi = 20.0;
}  // namespace feasibility

// Hyperparameters of one line search, in absolute units of the searched
// coordinate.
struct LineSearchConfig {
  double shrink = 0.5;          // geometric step reduction factor
  double step_up = 0.05;        // initial probe step when the gradient is > 0
  double step_down = -0.05;     // initial probe step when the gradient is < 0
  int max_outer_iters = 20;
  double convergence_tol = 1e-6;  // stop once an accepted move is smaller

  // Throws std::invalid_argument on violated invariants (shrink outside
  // (0,1), step_up <= 0, step_down >= 0, nonpositive iteration budget or
  // tolerance).
  void validate() const;
};

// Box-relative knobs from which per-parameter LineSearchConfigs are derived;
// one set serves every box because steps and tolerances scale with the box
// width.
struct ParamEstOptions {
  double shrink = 0.5;
  double step_fraction = 0.05;   // initial step = fraction * (hi - lo)
  double tol_fraction = 1e-6;    // convergence tol = fraction * (hi - lo)
  int max_outer_iters = 20;
};

LineSearchConfig make_line_search_config(double lo, double hi,
                                         const ParamEstOptions& opts = {});

// Log-evidence of the data under the channel (up to parameter-independent
// constants) together with its derivative in the selected parameter.
struct EvidenceGradient {
  double value = 0.0;
  double gradient = 0.0;
};

// Identifies which parameter of a channel an evidence gradient refers to.
// Mixture weights are differentiated in logit space (through the softmax
// reparameterization), everything else in its natural coordinate.
struct ParameterSelector {
  enum class Kind { kSparsity, kWeight, kMean, kVariance, kRate };

  Kind kind = Kind::kSparsity;
  std::size_t component = 0;

  static ParameterSelector sparsity() { return {Kind::kSparsity, 0}; }
  static ParameterSelector weight(std::size_t c) { return {Kind::kWeight, c}; }
  static ParameterSelector mean(std::size_t c) { return {Kind::kMean, c}; }
  static ParameterSelector variance(std::size_t c) {
    return {Kind::kVariance, c};
  }
  static ParameterSelector rate(std::size_t c) { return {Kind::kRate, c}; }
};

// Evidence value Σ_j log p(r_j | params, tau_r) (common additive constants
// dropped consistently across parameter values) and its derivative in the
// selected parameter, evaluated at `params`.  Mixture arithmetic runs in the
// log domain; a NaN result throws std::runtime_error("degenerate evidence").
// tau_r <= 0 throws std::invalid_argument("nonpositive pseudo-variance");
// a selector that does not apply to the channel throws
// std::invalid_argument.
EvidenceGradient evidence_and_grad_bgm(const BgmParams& params,
                                       ParameterSelector which,
                                       std::span<const double> r_vec,
                                       double tau_r);
EvidenceGradient evidence_and_grad_bem(const BemParams& params,
                                       ParameterSelector which,
                                       std::span<const double> r_vec,
                                       double tau_r);
// The Laplace channel has a single parameter (its rate), so no selector.
EvidenceGradient evidence_and_grad_laplace(const LaplaceParams& params,
                                           std::span<const double> r_vec,
                                           double tau_r);
// Noise-variance evidence Σ_i [-(1/2)log(θ+τq) - (y_i-q_i)^2/(2(θ+τq))].
// theta.variance <= 0 throws std::invalid_argument("out of feasibility
// box"); mismatched vector lengths throw std::invalid_argument.
EvidenceGradient evidence_and_grad_awgn(const AwgnParams& params,
                                        std::span<const double> q_vec,
                                        std::span<const double> y_vec,
                                        double tau_q);

using EvidenceObjective = std::function<EvidenceGradient(double)>;

// Derivative-guided ascent on a scalar objective over [lo, hi]: probe in the
// gradient's sign direction with the configured step, geometrically shrink
// the step while the objective would decrease, accept only non-decreasing
// moves, and stop on a zero gradient, a move smaller than convergence_tol,
// or the iteration budget.  The result satisfies h(result) >= h(start) and
// lies inside the box.  Throws std::invalid_argument("invalid box") when
// lo >= hi and std::runtime_error("invalid start") when the objective is
// non-finite at the start.
double line_search_maximize(const EvidenceObjective& objective, double start,
                            double lo, double hi, const LineSearchConfig& cfg);

// Numerically stable softmax; the result sums to 1 with every entry > 0.
std::vector<double> softmax(std::span<const double> logits);

// One MAP update pass over all parameters of the input channel: one line
// search per parameter (sparsity, each weight logit, each mean or rate, each
// variance), every search started from and frozen at the incoming estimates,
// results applied together.  Parameters outside their feasibility boxes
// throw std::invalid_argument("out of feasibility box") before any work.
InputChannelParams update_input_parameters(const InputChannelParams& prior,
                                           std::span<const double> r_vec,
                                           double tau_r,
                                           const ParamEstOptions& opts = {});

// MAP update of the noise variance from the output-side residuals.
AwgnParams update_output_parameters(const AwgnParams& theta,
                                    std::span<const double> q_vec,
                                    std::span<const double> y_vec,
                                    double tau_q,
                                    const ParamEstOptions& opts = {});

struct ParameterUpdate {
  InputChannelParams input;
  AwgnParams output;
};

// Updates input and output channel parameters from one frozen snapshot of
// the message-passing state.  Atomic: if any inner search fails at runtime,
// the incoming parameters are returned unchanged.  Invalid inputs (channel
// invariants or feasibility boxes violated) throw before any update.
ParameterUpdate update_all_parameters(const InputChannelParams& prior,
                                      const AwgnParams& theta,
                                      std::span<const double> r_vec,
                                      double tau_r,
                                      std::span<const double> q_vec,
                                      std::span<const double> y_vec,
                                      double tau_q,
                                      const ParamEstOptions& opts = {});

}  // namespace pegamp
