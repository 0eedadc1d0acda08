#include "sdbbm/kernels.hpp"

#ifdef SDBBM_HAVE_AVX2_KERNELS

#include <immintrin.h>

#if defined(__GNUC__) || defined(__clang__)
#define SDBBM_TARGET_AVX2 __attribute__((target("avx2,fma")))
#else
#define SDBBM_TARGET_AVX2
#endif

namespace sdbbm::kernels::avx2 {

namespace {

SDBBM_TARGET_AVX2
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// [x0,x1,x2,x3] -> [x3,x2,x1,x0]
SDBBM_TARGET_AVX2
inline __m256d reverse(__m256d v) { return _mm256_permute4x64_pd(v, 0x1B); }

}  // namespace

SDBBM_TARGET_AVX2
double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  if (k + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    k += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

SDBBM_TARGET_AVX2
double dot_rev(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k),
                           reverse(_mm256_loadu_pd(b + n - 4 - k)), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4),
                           reverse(_mm256_loadu_pd(b + n - 8 - k)), acc1);
  }
  if (k + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k),
                           reverse(_mm256_loadu_pd(b + n - 4 - k)), acc0);
    k += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[n - 1 - k];
  return acc;
}

SDBBM_TARGET_AVX2
double sum_squares(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    __m256d v0 = _mm256_loadu_pd(x + k);
    __m256d v1 = _mm256_loadu_pd(x + k + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  if (k + 4 <= n) {
    __m256d v = _mm256_loadu_pd(x + k);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
    k += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += x[k] * x[k];
  return acc;
}

SDBBM_TARGET_AVX2
double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign_mask, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = lanes[0];
  for (int i = 1; i < 4; ++i) out = out < lanes[i] ? lanes[i] : out;
  for (; k < n; ++k) {
    double d = a[k] - b[k];
    if (d < 0) d = -d;
    if (d > out) out = d;
  }
  return out;
}

}  // namespace sdbbm::kernels::avx2

#endif  // SDBBM_HAVE_AVX2_KERNELS
