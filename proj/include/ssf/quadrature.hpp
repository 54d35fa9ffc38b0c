#pragma once

#include <functional>
#include <string_view>
#include <vector>

namespace ssf {

enum class QuadratureRule { gauss_legendre, adaptive_simpson };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::gauss_legendre;
  int nodes = 64;             // Gauss–Legendre node count, >= 2
  double target = 1e-9;       // error target relative to 1 + |value|, > 0
  bool fallback = true;       // Gauss–Legendre misses the target -> adaptive Simpson
  int max_evaluations = 20000;

  /// Throws std::invalid_argument for nodes < 2, target <= 0 or a non-positive cap.
  void validate() const;
};

std::string_view rule_name(QuadratureRule r);

struct GaussLegendreRule {
  std::vector<double> nodes;    // in (0, 1), ascending
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss–Legendre rule mapped to [0, 1] (Newton iteration on P_n).
GaussLegendreRule gauss_legendre(int n);

/// Vector-valued integrand on [0, 1]: one component per integrated function.
using VectorIntegrand = std::function<std::vector<double>(double)>;

struct QuadratureResult {
  std::vector<double> values;
  double error;  // largest component error estimate
  int evaluations;
  QuadratureRule rule;
};

/// Gauss–Legendre with the error estimated against the half-size rule; falls
/// back to adaptive Simpson when any component misses the target. Throws
/// std::runtime_error with the achieved estimate when the evaluation cap is hit.
QuadratureResult integrate_unit_interval(const VectorIntegrand& f, std::size_t components,
                                         const QuadratureSpec& spec);

}  // namespace ssf
