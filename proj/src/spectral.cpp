#include "ssf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ssf/simd/kernels.hpp"

namespace ssf {

SpectralDecomposition::SpectralDecomposition(TraceAlgebra algebra, std::vector<BlockSpectrum> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {}

std::vector<WeightedEigenvalue> SpectralDecomposition::weighted_spectrum() const {
  std::vector<WeightedEigenvalue> out;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    for (Eigen::Index i = 0; i < blocks_[k].eigenvalues.size(); ++i) {
      out.push_back({blocks_[k].eigenvalues(i), blocks_[k].weight, k});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const WeightedEigenvalue& a, const WeightedEigenvalue& b) { return a.value < b.value; });
  return out;
}

double SpectralDecomposition::min_eigenvalue() const {
  double m = kInfinity;
  for (const auto& b : blocks_) m = std::min(m, b.eigenvalues.minCoeff());
  return m;
}

double SpectralDecomposition::max_eigenvalue() const {
  double m = -kInfinity;
  for (const auto& b : blocks_) m = std::max(m, b.eigenvalues.maxCoeff());
  return m;
}

double SpectralDecomposition::norm_inf() const {
  return std::max(std::fabs(min_eigenvalue()), std::fabs(max_eigenvalue()));
}

double SpectralDecomposition::diameter() const { return max_eigenvalue() - min_eigenvalue(); }

SpectralDecomposition spectral_decompose(const HermitianOperator& a) {
  std::vector<BlockSpectrum> blocks;
  blocks.reserve(a.blocks().size());
  for (std::size_t k = 0; k < a.blocks().size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.block(k));
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("spectral_decompose: eigensolver did not converge on block " +
                               std::to_string(k));
    }
    blocks.push_back({solver.eigenvalues(), solver.eigenvectors(), a.algebra().scale(k)});
  }
  return SpectralDecomposition(a.algebra(), std::move(blocks));
}

PosNegParts pos_neg_parts(const HermitianOperator& a) {
  const auto s = spectral_decompose(a);
  return {s.apply([](double x) { return x > 0.0 ? x : 0.0; }),
          s.apply([](double x) { return x < 0.0 ? -x : 0.0; })};
}

namespace {

double zero_threshold(const SpectralDecomposition& s) { return tolerance::rank * s.norm_inf(); }

}  // namespace

double support_trace(const SpectralDecomposition& s) {
  const double thr = zero_threshold(s);
  return s.trace_of([thr](double x) { return std::fabs(x) > thr ? 1.0 : 0.0; });
}

SupportProjection support_projection(const HermitianOperator& a) {
  const auto s = spectral_decompose(a);
  const double thr = zero_threshold(s);
  auto indicator = [thr](double x) { return std::fabs(x) > thr ? 1.0 : 0.0; };
  return {s.apply(indicator), s.trace_of(indicator)};
}

StepFunction counting_function(const SpectralDecomposition& s) {
  // Values are recomputed from per-block integer counts on every interval so
  // that equal counts give bit-identical values.
  std::vector<std::vector<double>> sorted(s.blocks().size());
  std::vector<double> locations;
  for (std::size_t k = 0; k < s.blocks().size(); ++k) {
    const auto& ev = s.blocks()[k].eigenvalues;
    sorted[k].assign(ev.data(), ev.data() + ev.size());
    locations.insert(locations.end(), sorted[k].begin(), sorted[k].end());
  }
  auto count_above = [&](double t) {
    double v = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      const auto above = sorted[k].end() - std::upper_bound(sorted[k].begin(), sorted[k].end(), t);
      v += s.blocks()[k].weight * static_cast<double>(above);
    }
    return v;
  };
  const double tol = tolerance::merge * s.diameter();
  return StepFunction::from_sorted_clusters(locations, count_above, s.algebra().total_trace(), tol);
}

StepFunction counting_function(const HermitianOperator& a) { return counting_function(spectral_decompose(a)); }

StepFunction singular_value_function(const HermitianOperator& a) {
  const auto s = spectral_decompose(a);
  std::vector<std::pair<double, double>> mags;  // (|λ|, weight)
  for (const auto& e : s.weighted_spectrum()) mags.emplace_back(std::fabs(e.value), e.weight);
  std::stable_sort(mags.begin(), mags.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<double> bps{0.0};
  std::vector<double> vals{0.0};
  double t = 0.0;
  std::size_t i = 0;
  while (i < mags.size()) {
    const double level = mags[i].first;
    double len = 0.0;
    while (i < mags.size() && mags[i].first == level) len += mags[i++].second;
    if (level != vals.back()) {
      if (t != bps.back()) bps.push_back(t);
      vals.push_back(level);
    }
    t += len;
  }
  if (vals.back() != 0.0) {
    bps.push_back(t);
    vals.push_back(0.0);
  }
  if (vals.size() == 1) return StepFunction(0.0);
  return StepFunction(std::move(bps), std::move(vals));
}

double schatten_norm(const SpectralDecomposition& s, double p) {
  if (!(p >= 1.0)) throw std::domain_error("schatten_norm: p must be >= 1 (or infinity)");
  if (std::isinf(p)) return s.norm_inf();
  double total = 0.0;
  for (const auto& b : s.blocks()) {
    const std::span<const double> ev(b.eigenvalues.data(), static_cast<std::size_t>(b.eigenvalues.size()));
    double bs = 0.0;
    if (p == 1.0) {
      bs = simd::abs_sum(ev);
    } else if (p == 2.0) {
      bs = simd::dot(ev, ev);
    } else {
      for (double x : ev) bs += std::pow(std::fabs(x), p);
    }
    total += b.weight * bs;
  }
  if (p == 1.0) return total;
  if (p == 2.0) return std::sqrt(total);
  return std::pow(total, 1.0 / p);
}

double schatten_norm(const HermitianOperator& a, double p) {
  if (!(p >= 1.0)) throw std::domain_error("schatten_norm: p must be >= 1 (or infinity)");
  return schatten_norm(spectral_decompose(a), p);
}

double commutator_hs_norm(const HermitianOperator& a, const HermitianOperator& p) {
  require_same_algebra(a, p, "commutator_hs_norm");
  return commutator(a, p).hs_norm();
}

bool is_projection(const HermitianOperator& p, double tol) {
  const auto s = spectral_decompose(p);
  for (const auto& b : s.blocks()) {
    for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) {
      const double x = b.eigenvalues(i);
      if (std::fabs(x) > tol && std::fabs(x - 1.0) > tol) return false;
    }
  }
  return true;
}

bool projection_leq(const HermitianOperator& p, const HermitianOperator& q, double tol) {
  require_same_algebra(p, q, "projection_leq");
  const BlockMatrix diff = q * p - p.matrix();
  for (const auto& b : diff.blocks()) {
    if (b.size() > 0 && b.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

HermitianOperator coordinate_projection(const TraceAlgebra& algebra,
                                        const std::vector<std::size_t>& rank_per_block) {
  if (rank_per_block.size() != algebra.block_count()) {
    throw std::invalid_argument("coordinate_projection: one rank per block is required");
  }
  std::vector<double> diag;
  for (std::size_t k = 0; k < algebra.block_count(); ++k) {
    if (rank_per_block[k] > algebra.dim(k)) {
      throw std::invalid_argument("coordinate_projection: rank exceeds block " + std::to_string(k));
    }
    for (std::size_t i = 0; i < algebra.dim(k); ++i) diag.push_back(i < rank_per_block[k] ? 1.0 : 0.0);
  }
  return HermitianOperator::diagonal(algebra, diag);
}

bool dominates(const HermitianOperator& a, const HermitianOperator& b) {
  const auto v = spectral_decompose(a - b);
  double scale = 1.0;
  for (const auto& blk : a.blocks()) scale = std::max(scale, blk.norm());
  for (const auto& blk : b.blocks()) scale = std::max(scale, blk.norm());
  return v.min_eigenvalue() >= -tolerance::rank * scale;
}

}  // namespace ssf
