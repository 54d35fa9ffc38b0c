#pragma once

// Data-parallel inner loops used across the toolkit.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant. The active table is chosen once at first use from CPUID and can be
// pinned with the SSF_SIMD environment variable ("scalar" or "avx2"). The two
// variants agree bit-for-bit on element-wise kernels; reductions agree to
// rounding of the summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace ssf::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i |a[i]|
  double (*abs_sum)(const double* a, std::size_t n);
  // sum_i |z_i| for interleaved (re, im) pairs; n counts complex values
  double (*complex_abs_sum)(const double* z, std::size_t n);
  // sum_i w[i] * [x[i] > t]
  double (*weighted_count_above)(const double* x, const double* w, std::size_t n, double t);
  // out[i] = x[i] / sqrt(alpha^2 + x[i]^2)
  void (*h_alpha)(const double* x, double alpha, double* out, std::size_t n);
  // out[i] = alpha^2 / ((alpha^2 + x[i]^2) * sqrt(alpha^2 + x[i]^2))
  void (*h_alpha_derivative)(const double* x, double alpha, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

const KernelTable& active_kernels();

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double abs_sum(std::span<const double> a) {
  return active_kernels().abs_sum(a.data(), a.size());
}

inline double complex_abs_sum(std::span<const double> interleaved) {
  return active_kernels().complex_abs_sum(interleaved.data(), interleaved.size() / 2);
}

inline double weighted_count_above(std::span<const double> x, std::span<const double> w,
                                   double t) {
  return active_kernels().weighted_count_above(x.data(), w.data(), x.size(), t);
}

inline void h_alpha(std::span<const double> x, double alpha, std::span<double> out) {
  active_kernels().h_alpha(x.data(), alpha, out.data(), x.size());
}

inline void h_alpha_derivative(std::span<const double> x, double alpha, std::span<double> out) {
  active_kernels().h_alpha_derivative(x.data(), alpha, out.data(), x.size());
}

}  // namespace ssf::simd
