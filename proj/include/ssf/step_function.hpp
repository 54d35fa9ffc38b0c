#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssf {

/// Right-continuous piecewise-constant function on the real line.
///
/// With breakpoints b_0 < ... < b_{k-1}, values()[0] holds on (-inf, b_0),
/// values()[j + 1] on [b_j, b_{j+1}) and values()[k] on [b_{k-1}, inf).
class StepFunction {
 public:
  /// The constant function `value`.
  explicit StepFunction(double value = 0.0);

  /// Throws std::invalid_argument unless breakpoints are finite and strictly
  /// increasing and values.size() == breakpoints.size() + 1.
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  /// Builds from possibly unsorted (location, value-after) events; breakpoints
  /// within `merge_tol` of the first point of their cluster are merged and the
  /// value after the cluster is kept.
  static StepFunction from_sorted_clusters(const std::vector<double>& locations,
                                           const std::function<double(double)>& value_after,
                                           double left_tail, double merge_tol);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double left_tail() const { return values_.front(); }
  double right_tail() const { return values_.back(); }
  std::size_t interval_count() const { return breakpoints_.size() + 1; }

  double operator()(double t) const;

  bool compactly_supported() const { return left_tail() == 0.0 && right_tail() == 0.0; }
  bool is_zero() const { return breakpoints_.empty() && values_.front() == 0.0; }

  /// Closed hull of the set where the function is nonzero; empty for ξ ≡ 0.
  std::optional<std::pair<double, double>> support() const;

  /// Sum over bounded intervals of value * length. Throws std::domain_error
  /// when a tail value is nonzero.
  double integral() const;
  double l1_norm() const;
  double linf_norm() const;
  double min_value() const;
  double max_value() const;

  /// Integral over [a, b]; b may be +inf when the right tail is 0, a may be
  /// -inf when the left tail is 0.
  double integral_over(double a, double b) const;

  /// Sum over bounded intervals [l, r) of value * (F(r) - F(l)), i.e. the
  /// exact integral of F' against this function given an antiderivative F.
  /// Throws std::domain_error when a tail value is nonzero.
  double integrate_derivative(const std::function<double(double)>& antiderivative) const;

  /// ∫ m s^{m-1} f(s) ds, computed exactly as sum value * (r^m - l^m).
  double moment(int m) const;

  StepFunction negated() const;
  StepFunction shifted(double c) const;
  StepFunction scaled(double c) const;

  /// Pulls the breakpoints through a strictly increasing map, keeping values.
  /// Throws std::domain_error if the mapped breakpoints are not increasing.
  StepFunction mapped_breakpoints(const std::function<double(double)>& map) const;

  /// Snaps |v| <= value_tol to zero, merges breakpoints closer than merge_tol
  /// to their cluster's first point and drops breakpoints without a jump.
  StepFunction simplified(double merge_tol, double value_tol) const;

  /// Same number of breakpoints, each within bp_tol, values within value_tol.
  bool approx_equal(const StepFunction& other, double bp_tol, double value_tol) const;

  /// Largest breakpoint displacement against `other`, or +inf when the
  /// breakpoint counts differ.
  double max_breakpoint_deviation(const StepFunction& other) const;

  /// CSV: header "breakpoint,value_right", then a "-inf,<left tail>" row, then
  /// one row per breakpoint with the value holding to its right.
  std::string to_csv() const;
  static StepFunction from_csv(std::string_view text);

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// f - g on the union of breakpoints, merged with `merge_tol`; values whose
/// magnitude is below rounding of the operands are snapped to zero.
StepFunction subtract(const StepFunction& f, const StepFunction& g, double merge_tol);
StepFunction add(const StepFunction& f, const StepFunction& g, double merge_tol);

/// Breakpoint-union helper: pointwise `op(f, g)`.
StepFunction combine(const StepFunction& f, const StepFunction& g, double merge_tol,
                     const std::function<double(double, double)>& op);

/// Shortest round-trip decimal rendering used by every text output.
std::string format_double(double v);

}  // namespace ssf
