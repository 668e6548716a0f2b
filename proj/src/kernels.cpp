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
#include "pegamp/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PEGAMP_HAVE_X86 1
#include <immintrin.h>
#elif defined(__ARM_NEON)
#define PEGAMP_HAVE_NEON 1
#include <arm_neon.h>
#endif

namespace pegamp::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void matvec_scalar(const double* a, std::size_t m, std::size_t n,
                   const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_scalar(a + i * n, x, n);
}

void matvec_t_scalar(const double* a, std::size_t m, std::size_t n,
                     const double* s, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  // Row-major traversal keeps the matrix access contiguous.
  for (std::size_t i = 0; i < m; ++i) {
    const double si = s[i];
    const double* row = a + i * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += si * row[j];
  }
}

void axpby_scalar(double alpha, const double* x, double beta, const double* y,
                  double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = alpha * x[i] + beta * y[i];
}

// ---------------------------------------------------------------------------
// AVX2 + FMA kernels (x86-64).  Compiled with a per-function target attribute
// so the rest of the binary stays baseline; only executed after the runtime
// CPU check below passes.
// ---------------------------------------------------------------------------

#if defined(PEGAMP_HAVE_X86)

__attribute__((target("avx2,fma"))) static double horizontal_sum(__m256d v) {
  alignas(32) double tmp[4];
  _mm256_store_pd(tmp, v);
  return (tmp[0] + tmp[1]) + (tmp[2] + tmp[3]);
}

__attribute__((target("avx2,fma"))) static double dot_avx2(const double* a,
                                                           const double* b,
                                                           std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_fmadd_pd(va, vb, acc);
  }
  double total = horizontal_sum(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

__attribute__((target("avx2,fma"))) static double sum_sq_avx2(const double* a,
                                                              std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double total = horizontal_sum(acc);
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

__attribute__((target("avx2,fma"))) static void matvec_avx2(
    const double* a, std::size_t m, std::size_t n, const double* x,
    double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_avx2(a + i * n, x, n);
}

__attribute__((target("avx2,fma"))) static void matvec_t_avx2(
    const double* a, std::size_t m, std::size_t n, const double* s,
    double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const __m256d vs = _mm256_set1_pd(s[i]);
    const double* row = a + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d vr = _mm256_loadu_pd(row + j);
      const __m256d vo = _mm256_loadu_pd(out + j);
      _mm256_storeu_pd(out + j, _mm256_fmadd_pd(vs, vr, vo));
    }
    for (; j < n; ++j) out[j] += s[i] * row[j];
  }
}

__attribute__((target("avx2,fma"))) static void axpby_avx2(
    double alpha, const double* x, double beta, const double* y, double* z,
    std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(z + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), vx));
  }
  for (; i < n; ++i) z[i] = alpha * x[i] + beta * y[i];
}

static bool detect_simd() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#elif defined(PEGAMP_HAVE_NEON)

// ---------------------------------------------------------------------------
// NEON kernels (AArch64).  NEON is architecturally guaranteed on AArch64, so
// detection is a compile-time fact.
// ---------------------------------------------------------------------------

static double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

static double sum_sq_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    acc = vfmaq_f64(acc, va, va);
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

static void matvec_neon(const double* a, std::size_t m, std::size_t n,
                        const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_neon(a + i * n, x, n);
}

static void matvec_t_neon(const double* a, std::size_t m, std::size_t n,
                          const double* s, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const float64x2_t vs = vdupq_n_f64(s[i]);
    const double* row = a + i * n;
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      vst1q_f64(out + j, vfmaq_f64(vld1q_f64(out + j), vs, vld1q_f64(row + j)));
    }
    for (; j < n; ++j) out[j] += s[i] * row[j];
  }
}

static void axpby_neon(double alpha, const double* x, double beta,
                       const double* y, double* z, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t vb = vdupq_n_f64(beta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(z + i, vfmaq_f64(vx, vb, vld1q_f64(y + i)));
  }
  for (; i < n; ++i) z[i] = alpha * x[i] + beta * y[i];
}

static bool detect_simd() { return true; }

#else

static bool detect_simd() { return false; }

#endif

// One-time dispatch: resolved on first use, no per-call branching cost beyond
// a predictable boolean test.
static const bool kSimd = detect_simd();

bool simd_active() { return kSimd; }

double dot(const double* a, const double* b, std::size_t n) {
#if defined(PEGAMP_HAVE_X86)
  if (kSimd) return dot_avx2(a, b, n);
#elif defined(PEGAMP_HAVE_NEON)
  if (kSimd) return dot_neon(a, b, n);
#endif
  return dot_scalar(a, b, n);
}

double sum_sq(const double* a, std::size_t n) {
#if defined(PEGAMP_HAVE_X86)
  if (kSimd) return sum_sq_avx2(a, n);
#elif defined(PEGAMP_HAVE_NEON)
  if (kSimd) return sum_sq_neon(a, n);
#endif
  return sum_sq_scalar(a, n);
}

void matvec(const double* a, std::size_t m, std::size_t n, const double* x,
            double* y) {
#if defined(PEGAMP_HAVE_X86)
  if (kSimd) return matvec_avx2(a, m, n, x, y);
#elif defined(PEGAMP_HAVE_NEON)
  if (kSimd) return matvec_neon(a, m, n, x, y);
#endif
  matvec_scalar(a, m, n, x, y);
}

void matvec_t(const double* a, std::size_t m, std::size_t n, const double* s,
              double* out) {
#if defined(PEGAMP_HAVE_X86)
  if (kSimd) return matvec_t_avx2(a, m, n, s, out);
#elif defined(PEGAMP_HAVE_NEON)
  if (kSimd) return matvec_t_neon(a, m, n, s, out);
#endif
  matvec_t_scalar(a, m, n, s, out);
}

void axpby(double alpha, const double* x, double beta, const double* y,
           double* z, std::size_t n) {
#if defined(PEGAMP_HAVE_X86)
  if (kSimd) return axpby_avx2(alpha, x, beta, y, z, n);
#elif defined(PEGAMP_HAVE_NEON)
  if (kSimd) return axpby_neon(alpha, x, beta, y, z, n);
#endif
  axpby_scalar(alpha, x, beta, y, z, n);
}

}  // namespace pegamp::kernels
