#include "ssf/algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssf {

TraceAlgebra::TraceAlgebra(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("TraceAlgebra: at least one block is required");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].dim == 0) {
      throw std::invalid_argument("TraceAlgebra: block " + std::to_string(k) + " has dimension 0");
    }
    if (!(blocks_[k].scale > 0.0) || !std::isfinite(blocks_[k].scale)) {
      throw std::invalid_argument("TraceAlgebra: block " + std::to_string(k) +
                                  " needs a positive finite trace scale");
    }
  }
}

TraceAlgebra TraceAlgebra::single(std::size_t dim, double scale) {
  return TraceAlgebra({Block{dim, scale}});
}

std::size_t TraceAlgebra::total_dimension() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.dim;
  return n;
}

double TraceAlgebra::total_trace() const {
  double t = 0.0;
  for (const auto& b : blocks_) t += b.scale * static_cast<double>(b.dim);
  return t;
}

BlockMatrix::BlockMatrix(TraceAlgebra algebra, std::vector<Matrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (blocks_.size() != algebra_.block_count()) {
    throw std::invalid_argument("BlockMatrix: expected " + std::to_string(algebra_.block_count()) +
                                " blocks, got " + std::to_string(blocks_.size()));
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(algebra_.dim(k));
    if (blocks_[k].rows() != n || blocks_[k].cols() != n) {
      throw std::invalid_argument("BlockMatrix: block " + std::to_string(k) + " is not " +
                                  std::to_string(n) + "x" + std::to_string(n));
    }
  }
}

BlockMatrix BlockMatrix::zero(const TraceAlgebra& algebra) {
  std::vector<Matrix> b;
  for (const auto& blk : algebra.blocks()) {
    b.push_back(Matrix::Zero(static_cast<Eigen::Index>(blk.dim), static_cast<Eigen::Index>(blk.dim)));
  }
  return BlockMatrix(algebra, std::move(b));
}

BlockMatrix BlockMatrix::identity(const TraceAlgebra& algebra) {
  std::vector<Matrix> b;
  for (const auto& blk : algebra.blocks()) {
    b.push_back(Matrix::Identity(static_cast<Eigen::Index>(blk.dim), static_cast<Eigen::Index>(blk.dim)));
  }
  return BlockMatrix(algebra, std::move(b));
}

Complex BlockMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (std::size_t k = 0; k < blocks_.size(); ++k) t += algebra_.scale(k) * blocks_[k].trace();
  return t;
}

BlockMatrix BlockMatrix::adjoint() const {
  std::vector<Matrix> b;
  b.reserve(blocks_.size());
  for (const auto& m : blocks_) b.push_back(m.adjoint());
  return BlockMatrix(algebra_, std::move(b));
}

double BlockMatrix::hs_norm() const {
  double s = 0.0;
  for (std::size_t k = 0; k < blocks_.size(); ++k) s += algebra_.scale(k) * blocks_[k].squaredNorm();
  return std::sqrt(s);
}

double BlockMatrix::trace_norm() const {
  double s = 0.0;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    Eigen::JacobiSVD<Matrix> svd(blocks_[k]);
    s += algebra_.scale(k) * svd.singularValues().sum();
  }
  return s;
}

namespace {

void require_same(const TraceAlgebra& a, const TraceAlgebra& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": operands live in different algebras");
}

}  // namespace

BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
  require_same(a.algebra_, b.algebra_, "operator+");
  std::vector<Matrix> r;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) r.push_back(a.blocks_[k] + b.blocks_[k]);
  return BlockMatrix(a.algebra_, std::move(r));
}

BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
  require_same(a.algebra_, b.algebra_, "operator-");
  std::vector<Matrix> r;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) r.push_back(a.blocks_[k] - b.blocks_[k]);
  return BlockMatrix(a.algebra_, std::move(r));
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
  require_same(a.algebra_, b.algebra_, "operator*");
  std::vector<Matrix> r;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) r.push_back(a.blocks_[k] * b.blocks_[k]);
  return BlockMatrix(a.algebra_, std::move(r));
}

BlockMatrix operator*(Complex c, const BlockMatrix& a) {
  std::vector<Matrix> r;
  for (const auto& m : a.blocks_) r.push_back(c * m);
  return BlockMatrix(a.algebra_, std::move(r));
}

Matrix HermitianOperator::symmetrize(const Matrix& m) {
  Matrix s = (m + m.adjoint()) * 0.5;
  for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, i) = Complex(s(i, i).real(), 0.0);
  return s;
}

HermitianOperator::HermitianOperator(TraceAlgebra algebra, std::vector<Matrix> blocks)
    : m_(std::move(algebra), std::move(blocks)) {
  std::vector<Matrix> sym;
  sym.reserve(m_.blocks().size());
  for (const auto& b : m_.blocks()) sym.push_back(symmetrize(b));
  m_ = BlockMatrix(m_.algebra(), std::move(sym));
}

HermitianOperator::HermitianOperator(const BlockMatrix& m) : HermitianOperator(m.algebra(), m.blocks()) {}

HermitianOperator HermitianOperator::zero(const TraceAlgebra& algebra) {
  return HermitianOperator(BlockMatrix::zero(algebra));
}

HermitianOperator HermitianOperator::identity(const TraceAlgebra& algebra) {
  return HermitianOperator(BlockMatrix::identity(algebra));
}

HermitianOperator HermitianOperator::diagonal(const TraceAlgebra& algebra, const std::vector<double>& values) {
  if (values.size() != algebra.total_dimension()) {
    throw std::invalid_argument("HermitianOperator::diagonal: expected " +
                                std::to_string(algebra.total_dimension()) + " values, got " +
                                std::to_string(values.size()));
  }
  std::vector<Matrix> b;
  std::size_t offset = 0;
  for (const auto& blk : algebra.blocks()) {
    const auto n = static_cast<Eigen::Index>(blk.dim);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = values[offset + static_cast<std::size_t>(i)];
    offset += blk.dim;
    b.push_back(std::move(m));
  }
  return HermitianOperator(algebra, std::move(b));
}

double HermitianOperator::max_abs_entry() const {
  double m = 0.0;
  for (const auto& b : blocks()) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

HermitianOperator HermitianOperator::operator-() const { return scaled(-1.0); }

HermitianOperator HermitianOperator::scaled(double c) const {
  return HermitianOperator(Complex(c, 0.0) * m_);
}

HermitianOperator HermitianOperator::shifted(double c) const {
  return HermitianOperator(m_ + Complex(c, 0.0) * BlockMatrix::identity(algebra()));
}

HermitianOperator HermitianOperator::compressed_by(const HermitianOperator& p) const {
  require_same(algebra(), p.algebra(), "compressed_by");
  return HermitianOperator(p.m_ * m_ * p.m_);
}

HermitianOperator HermitianOperator::power(int m) const {
  if (m < 0) throw std::domain_error("power: exponent must be non-negative");
  BlockMatrix r = BlockMatrix::identity(algebra());
  for (int i = 0; i < m; ++i) r = r * m_;
  return HermitianOperator(r);
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(a.m_ + b.m_);
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(a.m_ - b.m_);
}

double trace_power(const HermitianOperator& x, int m, const HermitianOperator* q) {
  if (m < 0) throw std::domain_error("trace_power: exponent must be non-negative");
  if (q) require_same_algebra(x, *q, "trace_power");
  using WideMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  long double total = 0.0L;
  for (std::size_t k = 0; k < x.algebra().block_count(); ++k) {
    const WideMatrix xk = x.block(k).cast<std::complex<long double>>();
    WideMatrix r = WideMatrix::Identity(xk.rows(), xk.cols());
    for (int i = 0; i < m; ++i) r = r * xk;
    if (q) r = r * q->block(k).cast<std::complex<long double>>();
    total += static_cast<long double>(x.algebra().scale(k)) * r.trace().real();
  }
  return static_cast<double>(total);
}

BlockMatrix commutator(const HermitianOperator& a, const HermitianOperator& p) {
  return a * p - p * a;
}

void require_same_algebra(const HermitianOperator& a, const HermitianOperator& b, const char* what) {
  require_same(a.algebra(), b.algebra(), what);
}

}  // namespace ssf
