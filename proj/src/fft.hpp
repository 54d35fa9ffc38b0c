#pragma once

// Thin RAII layer over FFTW. Planning is serialized; execution is reentrant.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ssf::detail {

/// X_k = Σ_j x_j exp(−2πi jk/N) for k = 0..N/2.
std::vector<std::complex<double>> real_forward(std::span<const double> x);

/// x_j = (1/N) Σ_k X_k exp(2πi jk/N) from the N/2+1 non-negative frequencies.
std::vector<double> real_inverse(std::span<const std::complex<double>> spectrum, std::size_t n);

}  // namespace ssf::detail
