#pragma once

#include <cstdint>
#include <random>

#include "ssf/algebra.hpp"

namespace ssf {

/// The documented random stream: mt19937_64 seeded with `seed`; uniforms are
/// (x >> 11)·2⁻⁵³ and normals come in Box–Muller pairs
/// (sqrt(−2 ln(1 − u₁)) cos 2πu₂, sqrt(−2 ln(1 − u₁)) sin 2πu₂).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Diagonal entries N(0,1)·scale, off-diagonal (N + iN)/√2·scale, filled row
/// by row over the upper triangle, block by block.
HermitianOperator random_hermitian(const TraceAlgebra& alg, std::uint64_t seed, double scale = 1.0);

/// V = scale · W/τ(W) with W = GG*, G a complex Gaussian dim × rank matrix per
/// block whose last `avoid_last` rows are zero. τ(V) = ‖V‖₁ = scale.
HermitianOperator random_positive(const TraceAlgebra& alg, std::size_t rank, std::uint64_t seed, double scale = 1.0,
                                  std::size_t avoid_last = 0);

/// Random Hermitian part (entries scaled by `scale`) on the leading
/// coordinates of each block and decoupled diagonal entries ±magnitude on the
/// last `far` coordinates (alternating, starting with +).
HermitianOperator wide_spectrum(const TraceAlgebra& alg, double magnitude, std::uint64_t seed, std::size_t far = 2,
                                double scale = 1.0);

/// Positive semidefinite arrowhead: diagonal plus a dense first row/column,
/// shifted so the smallest eigenvalue equals `floor`.
HermitianOperator random_arrowhead(const TraceAlgebra& alg, std::uint64_t seed, double floor = 0.1);

/// Positive semidefinite band matrix of half-bandwidth `band`, shifted so the
/// smallest eigenvalue equals `floor`.
HermitianOperator random_band(const TraceAlgebra& alg, std::size_t band, std::uint64_t seed, double floor = 0.1);

}  // namespace ssf
