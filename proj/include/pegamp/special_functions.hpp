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
#include <initializer_list>
#include <span>

namespace pegamp {

// Scaled complementary error function exp(x^2)*erfc(x).
//
// Strictly positive and strictly decreasing. Large positive arguments go
// through an inverse-square rational tail, so the result never overflows for
// any finite x. For x below about -26.63 the true value exceeds the largest
// double; +infinity is returned and callers are expected to guard (the
// posterior-weight code works in log space through log_erfcx instead).
// Relative accuracy is ~1e-16 (rational Chebyshev fits, see the .cpp).
double erfcx(double x);

// log(erfcx(x)), finite for every finite x. For x <= -26 the correction
// erfc(-x) is below 1e-295, so log(2) + x^2 is exact to double precision.
double log_erfcx(double x);

// log(sum_i exp(v_i)) with max-subtraction. Exact -infinity when every input
// is -infinity. Throws std::invalid_argument("empty reduction") on an empty
// span.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(std::initializer_list<double> values);

// log N(x; mean, variance). Throws std::invalid_argument("nonpositive
// variance") unless variance > 0.
double gauss_log_pdf(double x, double mean, double variance);

}  // namespace pegamp
