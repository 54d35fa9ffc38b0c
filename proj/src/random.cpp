#include "ssf/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ssf/spectral.hpp"

namespace ssf {

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

std::int64_t RandomStream::integer(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("RandomStream::integer: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(engine_() % span);
}

namespace {

Matrix hermitian_gaussian(RandomStream& rng, Eigen::Index n, double scale) {
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = scale * rng.normal();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(i, j) = scale * Complex(re, im) / std::numbers::sqrt2;
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

HermitianOperator shift_to_floor(const HermitianOperator& a, double floor) {
  return a.shifted(floor - spectral_decompose(a).min_eigenvalue());
}

}  // namespace

HermitianOperator random_hermitian(const TraceAlgebra& alg, std::uint64_t seed, double scale) {
  RandomStream rng(seed);
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) blocks.push_back(hermitian_gaussian(rng, static_cast<Eigen::Index>(b.dim), scale));
  return HermitianOperator(alg, std::move(blocks));
}

HermitianOperator random_positive(const TraceAlgebra& alg, std::size_t rank, std::uint64_t seed, double scale,
                                  std::size_t avoid_last) {
  if (scale < 0.0) throw std::invalid_argument("random_positive: scale must be >= 0");
  RandomStream rng(seed);
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) {
    const auto n = static_cast<Eigen::Index>(b.dim);
    const auto live = static_cast<Eigen::Index>(b.dim > avoid_last ? b.dim - avoid_last : 0);
    const auto r = static_cast<Eigen::Index>(std::min<std::size_t>(rank, static_cast<std::size_t>(live)));
    Matrix g = Matrix::Zero(n, r);
    for (Eigen::Index i = 0; i < live; ++i) {
      for (Eigen::Index j = 0; j < r; ++j) {
        const double re = rng.normal();
        const double im = rng.normal();
        g(i, j) = Complex(re, im) / std::numbers::sqrt2;
      }
    }
    blocks.push_back(g * g.adjoint());
  }
  HermitianOperator w(alg, std::move(blocks));
  const double tr = w.trace();
  if (tr == 0.0 || scale == 0.0) return HermitianOperator::zero(alg);
  return w.scaled(scale / tr);
}

HermitianOperator wide_spectrum(const TraceAlgebra& alg, double magnitude, std::uint64_t seed, std::size_t far,
                                double scale) {
  RandomStream rng(seed);
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const std::size_t d = alg.dim(k);
    if (d <= far) throw std::invalid_argument("wide_spectrum: every block needs more than `far` coordinates");
    const auto n = static_cast<Eigen::Index>(d);
    const auto live = static_cast<Eigen::Index>(d - far);
    Matrix m = Matrix::Zero(n, n);
    m.topLeftCorner(live, live) = hermitian_gaussian(rng, live, scale);
    for (Eigen::Index i = live; i < n; ++i) m(i, i) = ((i - live) % 2 == 0) ? magnitude : -magnitude;
    blocks.push_back(std::move(m));
  }
  return HermitianOperator(alg, std::move(blocks));
}

HermitianOperator random_arrowhead(const TraceAlgebra& alg, std::uint64_t seed, double floor) {
  RandomStream rng(seed);
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) {
    const auto n = static_cast<Eigen::Index>(b.dim);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = rng.normal();
    for (Eigen::Index j = 1; j < n; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      // geometric decay keeps the far coordinates weakly coupled
      m(0, j) = Complex(re, im) * std::pow(0.7, static_cast<double>(j)) / std::numbers::sqrt2;
      m(j, 0) = std::conj(m(0, j));
    }
    blocks.push_back(std::move(m));
  }
  return shift_to_floor(HermitianOperator(alg, std::move(blocks)), floor);
}

HermitianOperator random_band(const TraceAlgebra& alg, std::size_t band, std::uint64_t seed, double floor) {
  RandomStream rng(seed);
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) {
    const auto n = static_cast<Eigen::Index>(b.dim);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = rng.normal();
      for (Eigen::Index j = i + 1; j < n && j <= i + static_cast<Eigen::Index>(band); ++j) {
        const double re = rng.normal();
        const double im = rng.normal();
        m(i, j) = Complex(re, im) / std::numbers::sqrt2;
        m(j, i) = std::conj(m(i, j));
      }
    }
    blocks.push_back(std::move(m));
  }
  return shift_to_floor(HermitianOperator(alg, std::move(blocks)), floor);
}

}  // namespace ssf
