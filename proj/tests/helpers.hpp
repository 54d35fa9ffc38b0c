#pragma once

#include <initializer_list>
#include <vector>

#include "ssf/algebra.hpp"

namespace testing {

inline ssf::HermitianOperator diag(std::initializer_list<double> v, double scale = 1.0) {
  return ssf::HermitianOperator::diagonal(ssf::TraceAlgebra::single(v.size(), scale), std::vector<double>(v));
}

inline ssf::HermitianOperator dense(std::initializer_list<std::initializer_list<double>> rows, double scale = 1.0) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  ssf::Matrix m(n, n);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index k = 0;
    for (double x : r) m(i, k++) = x;
    ++i;
  }
  return ssf::HermitianOperator(ssf::TraceAlgebra::single(static_cast<std::size_t>(n), scale), {m});
}

}  // namespace testing
