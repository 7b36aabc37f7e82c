#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "bcgwr/simd.hpp"

namespace bcgwr::simd {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d sum2 = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
}

double weighted_ssr_avx2(const double* w, const double* y, const double* mu, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d r0 = _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(mu + i));
    const __m256d r1 = _mm256_sub_pd(_mm256_loadu_pd(y + i + 4), _mm256_loadu_pd(mu + i + 4));
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r0), r0, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), r1), r1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(mu + i));
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r), r, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double r = y[i] - mu[i];
    acc += w[i] * r * r;
  }
  return acc;
}

double weighted_ssr_shift_avx2(const double* w, const double* r, const double* x, double delta,
                               std::size_t n) {
  const __m256d vd = _mm256_set1_pd(delta);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d t0 = _mm256_fnmadd_pd(vd, _mm256_loadu_pd(x + i), _mm256_loadu_pd(r + i));
    const __m256d t1 =
        _mm256_fnmadd_pd(vd, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(r + i + 4));
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), t0), t0, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), t1), t1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_fnmadd_pd(vd, _mm256_loadu_pd(x + i), _mm256_loadu_pd(r + i));
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), t), t, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double t = r[i] - delta * x[i];
    acc += w[i] * t * t;
  }
  return acc;
}

double weighted_sq_avx2(const double* w, const double* r, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d r0 = _mm256_loadu_pd(r + i);
    const __m256d r1 = _mm256_loadu_pd(r + i + 4);
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r0), r0, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), r1), r1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d r0 = _mm256_loadu_pd(r + i);
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r0), r0, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += w[i] * r[i] * r[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{weighted_ssr_avx2, weighted_ssr_shift_avx2, weighted_sq_avx2, axpy_avx2,
                         dot_avx2, "avx2"};
  return k;
}

}  // namespace bcgwr::simd

#endif  // x86_64
