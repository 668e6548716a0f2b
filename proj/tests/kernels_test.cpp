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
#include <vector>

#include <doctest.h>

#include "pegamp/kernels.hpp"
#include "support/invariants.hpp"

TEST_CASE("scalar kernels on hand-checked values") {
  const std::vector<double> a{1.0, -2.0, 3.0};
  const std::vector<double> b{4.0, 0.5, -1.0};
  CHECK(pegamp::kernels::dot_scalar(a.data(), b.data(), 3) == 0.0);
  CHECK(pegamp::kernels::sum_sq_scalar(a.data(), 3) == 14.0);

  std::vector<double> z(3);
  pegamp::kernels::axpby_scalar(2.0, a.data(), -1.0, b.data(), z.data(), 3);
  CHECK(z == std::vector<double>{-2.0, -4.5, 7.0});

  // 2x3 matrix [[1,0,2],[0,1,-1]].
  const std::vector<double> mat{1.0, 0.0, 2.0, 0.0, 1.0, -1.0};
  std::vector<double> y(2);
  pegamp::kernels::matvec_scalar(mat.data(), 2, 3, a.data(), y.data());
  CHECK(y == std::vector<double>{7.0, -5.0});
  std::vector<double> t(3);
  const std::vector<double> s{1.0, 2.0};
  pegamp::kernels::matvec_t_scalar(mat.data(), 2, 3, s.data(), t.data());
  CHECK(t == std::vector<double>{1.0, 2.0, 0.0});
}

TEST_CASE("dispatched kernels agree with the scalar reference") {
  // simd_active() only reports which path was selected; equivalence is the
  // real contract and holds on either path.
  const bool simd = pegamp::kernels::simd_active();
  INFO("simd variants active: " << simd);
  const invariants::Report report =
      invariants::kernels(invariants::kMasterSeed + 1);
  INFO(report.first_failure);
  CHECK(report.failures == 0);
  CHECK(report.cases >= 200);
}

TEST_CASE("zero-length inputs are well-defined") {
  CHECK(pegamp::kernels::dot(nullptr, nullptr, 0) == 0.0);
  CHECK(pegamp::kernels::sum_sq(nullptr, 0) == 0.0);
}
