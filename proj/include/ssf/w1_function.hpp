#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ssf {

/// f(t) = amplitude · ∫_{-∞}^t exp(−(u − center)² / (2 width²)) du
struct GaussianPrimitive {
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
};

/// The polynomial Σ c_i t^i on [a, b], clamped to constants outside through
/// C² blends on margins of width (b − a)/10.
struct PolynomialWindow {
  std::vector<double> coefficients;  // ascending powers
  double a = 0.0;
  double b = 1.0;
};

/// f(t) = t / sqrt(α² + t²)
struct HAlphaProfile {
  double alpha = 1.0;
};

/// Piecewise cubic Hermite data on the uniform grid start + j·step, constant
/// beyond the grid. Without explicit derivatives a clamped cubic spline (zero
/// end slopes) is used.
struct Sampled {
  double start = 0.0;
  double step = 1.0;
  std::vector<double> values;
  std::vector<double> derivatives;
  bool explicit_derivatives = false;
  /// Smallest feature of f' worth resolving; defaults to `step`.
  double feature_scale = 0.0;
};

/// Where f' lives and how finely it must be sampled.
struct SupportHint {
  double half_width;  // f' is negligible outside [−half_width, half_width]
  double resolution;  // smallest feature of f'
};

enum class W1Family { gaussian_primitive, polynomial_window, h_alpha_profile, sampled };

/// A function of class W₁ represented by closed-form or sampled evaluators of
/// f and f'. Immutable; copies share the representation.
class W1Function {
 public:
  /// width > 0
  static W1Function gaussian_primitive(double center, double width, double amplitude = 1.0);
  /// Non-empty coefficients, b > a.
  static W1Function polynomial_window(std::vector<double> coefficients, double a, double b);
  /// alpha > 0
  static W1Function h_alpha_profile(double alpha);
  /// At least two values, step > 0; derivatives empty or one per value.
  static W1Function sampled(double start, double step, std::vector<double> values,
                            std::vector<double> derivatives = {}, double feature_scale = 0.0);
  static W1Function constant(double value);

  double operator()(double t) const { return value(t); }
  double value(double t) const;
  double derivative(double t) const;

  W1Family family() const;
  std::string_view family_name() const;
  /// Exact ‖f‖_{W₁} when a closed form is known.
  std::optional<double> exact_seminorm() const;
  SupportHint support_hint() const;
  /// sup |f'| estimate used to judge grid coverage.
  double derivative_peak() const;

  const GaussianPrimitive* as_gaussian() const;
  const PolynomialWindow* as_polynomial_window() const;
  const HAlphaProfile* as_h_alpha() const;
  const Sampled* as_sampled() const;

  /// Short human-readable label, e.g. "gaussian_primitive(c=0,w=1)".
  std::string label() const;

 private:
  using Repr = std::variant<GaussianPrimitive, PolynomialWindow, HAlphaProfile, Sampled>;
  explicit W1Function(Repr r);
  std::shared_ptr<const Repr> repr_;
};

/// Uniform grid on [−half_width, half_width) with `points` samples.
struct SeminormGrid {
  double half_width;
  std::size_t points;
};

struct SeminormResult {
  double value;                 // exact value when known, else the grid estimate
  double grid_estimate;         // ∫|F(f')| from the discrete transform
  std::optional<double> exact;  // closed form, when available
  SeminormGrid grid;
};

/// Grid chosen from the support hint(s): L covers f', spacing resolves it.
SeminormGrid default_grid(const W1Function& f);
SeminormGrid default_grid(const W1Function& f, const W1Function& g);

/// ‖f‖_{W₁} = ∫|F(f')(s)| ds with F(g)(s) = (2π)^{-1} ∫ g(t) e^{−ist} dt.
/// Requires a power-of-two point count ≥ 2¹⁰ and |f'| ≤ tail_tol·peak outside
/// [−L, L]; otherwise throws std::domain_error reporting the measured tail.
SeminormResult w1_seminorm(const W1Function& f, const SeminormGrid& grid, double tail_tol = 1e-12);
SeminormResult w1_seminorm(const W1Function& f);

/// ‖f − g‖_{W₁} by the grid method.
double w1_distance(const W1Function& f, const W1Function& g, const SeminormGrid& grid,
                   double tail_tol = 1e-12);
double w1_distance(const W1Function& f, const W1Function& g);

/// f_n with f_n' = (f'·χ_[−n,n]) ∗ φ_{1/n} (φ_σ the unit-mass Gaussian of
/// standard deviation σ) and f_n(0) = f(0). Returned as a sampled function.
W1Function approximate_in_w1(const W1Function& f, int n);

}  // namespace ssf
