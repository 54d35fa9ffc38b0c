#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace ssf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// One summand of the block-diagonal algebra: a full matrix algebra of size
/// `dim` whose trace is scaled by `scale`.
struct Block {
  std::size_t dim = 0;
  double scale = 1.0;
  bool operator==(const Block&) const = default;
};

/// Finite model of a semifinite trace algebra: block-diagonal matrices with
/// trace τ(X) = Σ_k scale_k · tr(X_k). Fractional scales give non-integer
/// valued distribution functions.
class TraceAlgebra {
 public:
  /// Throws std::invalid_argument on an empty block list, a zero dimension or
  /// a non-positive / non-finite scale.
  explicit TraceAlgebra(std::vector<Block> blocks);

  static TraceAlgebra single(std::size_t dim, double scale = 1.0);

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t dim(std::size_t k) const { return blocks_[k].dim; }
  double scale(std::size_t k) const { return blocks_[k].scale; }
  std::size_t total_dimension() const;
  /// τ(1)
  double total_trace() const;

  bool operator==(const TraceAlgebra&) const = default;

 private:
  std::vector<Block> blocks_;
};

/// A general (not necessarily self-adjoint) element of a TraceAlgebra.
class BlockMatrix {
 public:
  /// Throws std::invalid_argument when block shapes do not match the algebra.
  BlockMatrix(TraceAlgebra algebra, std::vector<Matrix> blocks);

  static BlockMatrix zero(const TraceAlgebra& algebra);
  static BlockMatrix identity(const TraceAlgebra& algebra);

  const TraceAlgebra& algebra() const { return algebra_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }

  Complex trace() const;
  BlockMatrix adjoint() const;
  /// ‖X‖₂ = τ(X*X)^{1/2}
  double hs_norm() const;
  /// ‖X‖₁ = τ(|X|), from singular values of each block.
  double trace_norm() const;

  friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b);
  friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b);
  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);
  friend BlockMatrix operator*(Complex c, const BlockMatrix& a);

 private:
  TraceAlgebra algebra_;
  std::vector<Matrix> blocks_;
};

/// Self-adjoint element of a TraceAlgebra. Blocks are stored exactly
/// symmetrized: (M + M*)/2 with a real diagonal.
class HermitianOperator {
 public:
  HermitianOperator(TraceAlgebra algebra, std::vector<Matrix> blocks);
  explicit HermitianOperator(const BlockMatrix& m);

  static HermitianOperator zero(const TraceAlgebra& algebra);
  static HermitianOperator identity(const TraceAlgebra& algebra);
  /// Diagonal operator; `values` runs over all blocks in order.
  static HermitianOperator diagonal(const TraceAlgebra& algebra, const std::vector<double>& values);

  const TraceAlgebra& algebra() const { return m_.algebra(); }
  const std::vector<Matrix>& blocks() const { return m_.blocks(); }
  const Matrix& block(std::size_t k) const { return m_.block(k); }
  const BlockMatrix& matrix() const { return m_; }

  double trace() const { return m_.trace().real(); }
  double hs_norm() const { return m_.hs_norm(); }
  /// Largest absolute entry; a cheap scale for tolerances.
  double max_abs_entry() const;

  HermitianOperator operator-() const;
  HermitianOperator scaled(double c) const;
  /// A + c·1
  HermitianOperator shifted(double c) const;
  /// pAp for a self-adjoint p.
  HermitianOperator compressed_by(const HermitianOperator& p) const;
  /// A^m for m >= 0 by repeated multiplication.
  HermitianOperator power(int m) const;

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
  friend BlockMatrix operator*(const HermitianOperator& a, const HermitianOperator& b) {
    return a.m_ * b.m_;
  }

 private:
  static Matrix symmetrize(const Matrix& m);
  BlockMatrix m_;
};

/// [A, p] = Ap − pA
BlockMatrix commutator(const HermitianOperator& a, const HermitianOperator& p);

/// τ(Xᵐ q) (τ(Xᵐ) without q) by repeated products accumulated in extended
/// precision; identical inputs give identical results on every path.
double trace_power(const HermitianOperator& x, int m, const HermitianOperator* q = nullptr);

/// Throws std::invalid_argument naming `what` when algebras differ.
void require_same_algebra(const HermitianOperator& a, const HermitianOperator& b, const char* what);

}  // namespace ssf
