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
#include <cmath>
#include <stdexcept>

#include "pegamp/harness.hpp"
#include "pegamp/kernels.hpp"

namespace pegamp {
namespace {

double diff_sq_norm(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("mismatched lengths");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return sq;
}

}  // namespace

bool success(std::span<const double> x_true, std::span<const double> x_hat) {
  const double ref_sq = kernels::sum_sq(x_true.data(), x_true.size());
  if (!(ref_sq > 0.0))
    throw std::invalid_argument("undefined relative error");
  const double err_sq = diff_sq_norm(x_true, x_hat);
  return std::sqrt(err_sq / ref_sq) < 1e-3;
}

double snr_db(std::span<const double> x_true, std::span<const double> x_hat) {
  const double ref_sq = kernels::sum_sq(x_true.data(), x_true.size());
  if (!(ref_sq > 0.0))
    throw std::invalid_argument("undefined relative error");
  const double err_sq = diff_sq_norm(x_true, x_hat);
  if (!(err_sq > 0.0)) return kSnrCapDb;
  const double value = 10.0 * std::log10(ref_sq / err_sq);
  return std::min(value, kSnrCapDb);
}

double psnr_db(std::span<const double> img_true,
               std::span<const double> img_hat, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("nonpositive peak");
  if (img_true.empty()) throw std::invalid_argument("empty reduction");
  const double err_sq = diff_sq_norm(img_true, img_hat);
  if (!(err_sq > 0.0)) return kSnrCapDb;
  const double mse = err_sq / static_cast<double>(img_true.size());
  const double value = 10.0 * std::log10(peak * peak / mse);
  return std::min(value, kSnrCapDb);
}

}  // namespace pegamp
