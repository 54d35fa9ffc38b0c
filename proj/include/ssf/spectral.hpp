#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "ssf/algebra.hpp"
#include "ssf/step_function.hpp"

namespace ssf {

namespace tolerance {
/// Eigenvalues with |λ| <= rank·‖A‖∞ count as zero for support and rank.
inline constexpr double rank = 1e-10;
/// Reconstruction / unitarity tolerance per unit of block dimension.
inline constexpr double eig_per_dim = 1e-12;
/// Breakpoints closer than merge·(spectral diameter) are merged.
inline constexpr double merge = 1e-12;
/// Breakpoint tolerance for step-function equality, relative to diameter.
inline constexpr double breakpoint = 1e-8;
/// Step values are sums of block weights; routes may add them in different
/// orders, so values match within this multiple of max(1, |value|).
inline constexpr double value = 1e-12;
}  // namespace tolerance

struct BlockSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // columns are eigenvectors
  double weight = 1.0;          // the block's trace scale
};

struct WeightedEigenvalue {
  double value;
  double weight;
  std::size_t block;
};

/// Per-block eigendecomposition A_k = U_k Λ_k U_k*.
class SpectralDecomposition {
 public:
  SpectralDecomposition(TraceAlgebra algebra, std::vector<BlockSpectrum> blocks);

  const TraceAlgebra& algebra() const { return algebra_; }
  const std::vector<BlockSpectrum>& blocks() const { return blocks_; }

  /// f(A) = Σ_k U_k f(Λ_k) U_k*.
  template <class F>
  HermitianOperator apply(F&& f) const {
    std::vector<Matrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) {
      Eigen::VectorXd fv(b.eigenvalues.size());
      for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(b.eigenvalues(i));
      out.push_back(b.eigenvectors * fv.cast<Complex>().asDiagonal() * b.eigenvectors.adjoint());
    }
    return HermitianOperator(algebra_, std::move(out));
  }

  /// τ(f(A)) = Σ_k scale_k Σ_i f(λ_{k,i}).
  template <class F>
  double trace_of(F&& f) const {
    double s = 0.0;
    for (const auto& b : blocks_) {
      double bs = 0.0;
      for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) bs += f(b.eigenvalues(i));
      s += b.weight * bs;
    }
    return s;
  }

  /// All eigenvalues with their trace weights, ascending by value.
  std::vector<WeightedEigenvalue> weighted_spectrum() const;

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  /// ‖A‖∞ = max |λ|
  double norm_inf() const;
  /// max λ − min λ
  double diameter() const;

 private:
  TraceAlgebra algebra_;
  std::vector<BlockSpectrum> blocks_;
};

/// Throws std::runtime_error naming the block if the eigensolver fails.
SpectralDecomposition spectral_decompose(const HermitianOperator& a);

struct PosNegParts {
  HermitianOperator positive;
  HermitianOperator negative;
};

/// A₊ = ∫ λ⁺ dE, A₋ = ∫ λ⁻ dE; A = A₊ − A₋.
PosNegParts pos_neg_parts(const HermitianOperator& a);

struct SupportProjection {
  HermitianOperator projection;
  double trace;  // τ(supp A)
};

/// Projection onto eigenvectors with |λ| > rank·‖A‖∞ (ties count as zero).
SupportProjection support_projection(const HermitianOperator& a);
double support_trace(const SpectralDecomposition& s);

/// n_A(t) = τ(E_A(t, ∞)): weighted count of eigenvalues strictly above t.
StepFunction counting_function(const HermitianOperator& a);
StepFunction counting_function(const SpectralDecomposition& s);

/// μ(t; A) = inf{s ≥ 0 : n_{|A|}(s) ≤ t} for t ≥ 0: the decreasing
/// rearrangement of weighted |eigenvalues|. Zero for t < 0 and t ≥ τ(1).
StepFunction singular_value_function(const HermitianOperator& a);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (τ|A|^p)^{1/p}; p = kInfinity gives max |λ|. Throws std::domain_error for p < 1.
double schatten_norm(const HermitianOperator& a, double p);
double schatten_norm(const SpectralDecomposition& s, double p);

/// ‖Ap − pA‖₂ in the weighted trace.
double commutator_hs_norm(const HermitianOperator& a, const HermitianOperator& p);

/// Spectrum within tol of {0, 1}.
bool is_projection(const HermitianOperator& p, double tol = 1e-9);

/// p ≤ q for projections: qp = p within tol.
bool projection_leq(const HermitianOperator& p, const HermitianOperator& q, double tol = 1e-9);

/// Coordinate projection onto the first `rank_per_block[k]` basis vectors of block k.
HermitianOperator coordinate_projection(const TraceAlgebra& algebra,
                                        const std::vector<std::size_t>& rank_per_block);

/// min λ(A − B) ≥ −rank·max(1, ‖A − B‖∞)
bool dominates(const HermitianOperator& a, const HermitianOperator& b);

}  // namespace ssf
