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

// Dense vector/matrix kernels on the solver's hot path. Every kernel has a
// scalar reference implementation plus (on x86-64) an AVX2+FMA variant; the
// public entry points dispatch once at startup based on what the CPU
// supports. The two variants are equivalence-tested against each other.
namespace pegamp::kernels {

// True when the dispatcher selected the AVX2 variants on this machine.
bool simd_active();

double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);

// y = A x, A row-major M x N
void matvec(const double* a, std::size_t m, std::size_t n, const double* x,
            double* y);

// out = A^T s, A row-major M x N
void matvec_t(const double* a, std::size_t m, std::size_t n, const double* s,
              double* out);

// z_i = alpha*x_i + beta*y_i (z may alias x or y)
void axpby(double alpha, const double* x, double beta, const double* y,
           double* z, std::size_t n);

// Scalar reference versions, always available (used as the dispatch fallback
// and as the ground truth in the equivalence tests).
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_sq_scalar(const double* a, std::size_t n);
void matvec_scalar(const double* a, std::size_t m, std::size_t n,
                   const double* x, double* y);
void matvec_t_scalar(const double* a, std::size_t m, std::size_t n,
                     const double* s, double* out);
void axpby_scalar(double alpha, const double* x, double beta, const double* y,
                  double* z, std::size_t n);

}  // namespace pegamp::kernels
