// Compiled with -mavx2 -ffp-contract=off; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "ssf/simd/kernels.hpp"

namespace ssf::simd {
namespace {

inline double hsum(__m256d v) {
  // (l0 + l2) + (l1 + l3), the same association as the scalar reference
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double abs_sum_avx2(const double* a, std::size_t n) {
  const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(a + i), kAbsMask));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double complex_abs_sum_avx2(const double* z, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(z + 2 * i);      // r0 i0 r1 i1
    const __m256d v1 = _mm256_loadu_pd(z + 2 * i + 4);  // r2 i2 r3 i3
    const __m256d sq0 = _mm256_mul_pd(v0, v0);
    const __m256d sq1 = _mm256_mul_pd(v1, v1);
    // hadd gives (r0^2+i0^2, r2^2+i2^2, r1^2+i1^2, r3^2+i3^2)
    const __m256d mixed = _mm256_hadd_pd(sq0, sq1);
    const __m256d ordered = _mm256_permute4x64_pd(mixed, 0b11011000);
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(ordered));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    s += std::sqrt(re * re + im * im);
  }
  return s;
}

double weighted_count_above_avx2(const double* x, const double* w, std::size_t n, double t) {
  const __m256d tv = _mm256_set1_pd(t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), tv, _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(w + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] > t ? w[i] : 0.0;
  return s;
}

void h_alpha_avx2(const double* x, double alpha, double* out, std::size_t n) {
  const double a2 = alpha * alpha;
  const __m256d a2v = _mm256_set1_pd(a2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d q = _mm256_add_pd(a2v, _mm256_mul_pd(v, v));
    _mm256_storeu_pd(out + i, _mm256_div_pd(v, _mm256_sqrt_pd(q)));
  }
  for (; i < n; ++i) out[i] = x[i] / std::sqrt(a2 + x[i] * x[i]);
}

void h_alpha_derivative_avx2(const double* x, double alpha, double* out, std::size_t n) {
  const double a2 = alpha * alpha;
  const __m256d a2v = _mm256_set1_pd(a2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d q = _mm256_add_pd(a2v, _mm256_mul_pd(v, v));
    _mm256_storeu_pd(out + i, _mm256_div_pd(a2v, _mm256_mul_pd(q, _mm256_sqrt_pd(q))));
  }
  for (; i < n; ++i) {
    const double q = a2 + x[i] * x[i];
    out[i] = a2 / (q * std::sqrt(q));
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{Isa::avx2,
                                 dot_avx2,
                                 abs_sum_avx2,
                                 complex_abs_sum_avx2,
                                 weighted_count_above_avx2,
                                 h_alpha_avx2,
                                 h_alpha_derivative_avx2};
  return table;
}

}  // namespace ssf::simd
