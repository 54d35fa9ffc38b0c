#include <cmath>

#include "ssf/simd/kernels.hpp"

namespace ssf::simd {
namespace {

// Reductions use four interleaved accumulators so that the summation order
// matches the AVX2 lane layout.

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] += a[i + l] * b[i + l];
  }
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double abs_sum_scalar(const double* a, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] += std::fabs(a[i + l]);
  }
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double complex_abs_sum_scalar(const double* z, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double re = z[2 * (i + l)];
      const double im = z[2 * (i + l) + 1];
      acc[l] += std::sqrt(re * re + im * im);
    }
  }
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    s += std::sqrt(re * re + im * im);
  }
  return s;
}

double weighted_count_above_scalar(const double* x, const double* w, std::size_t n, double t) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] += x[i + l] > t ? w[i + l] : 0.0;
  }
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s += x[i] > t ? w[i] : 0.0;
  return s;
}

void h_alpha_scalar(const double* x, double alpha, double* out, std::size_t n) {
  const double a2 = alpha * alpha;
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] / std::sqrt(a2 + x[i] * x[i]);
}

void h_alpha_derivative_scalar(const double* x, double alpha, double* out, std::size_t n) {
  const double a2 = alpha * alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = a2 + x[i] * x[i];
    out[i] = a2 / (q * std::sqrt(q));
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar,
                                 dot_scalar,
                                 abs_sum_scalar,
                                 complex_abs_sum_scalar,
                                 weighted_count_above_scalar,
                                 h_alpha_scalar,
                                 h_alpha_derivative_scalar};
  return table;
}

}  // namespace ssf::simd
