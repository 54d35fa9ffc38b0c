#pragma once

#include <span>
#include <string>
#include <vector>

namespace ssf {

enum class BijectionFamily { h_alpha, h_window, logistic };

/// Smooth strictly increasing bijection ℝ → (lower, upper).
///
///   h_alpha(α):       h(s) = s / sqrt(α² + s²), range (−1, 1)
///   h_window(a,b,α):  h' = 1 on [a, b], α³/(α² + (t − e)²)^{3/2} outside
///                     (e the nearer endpoint), h(−∞) = 0, range (0, b − a + 2α)
///   logistic(s):      h(x) = tanh(x / s), range (−1, 1)
class BijectionH {
 public:
  static BijectionH h_alpha(double alpha);
  static BijectionH h_window(double a, double b, double alpha);
  static BijectionH logistic(double scale);

  BijectionFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  double operator()(double t) const { return value(t); }
  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  /// Throws std::domain_error outside the open range.
  double inverse(double y) const;

  /// out[i] = h(in[i]); vectorized for h_alpha.
  void map(std::span<const double> in, std::span<double> out) const;

  std::string label() const;

 private:
  BijectionH(BijectionFamily f, double alpha, double a, double b, double lower, double upper);
  BijectionFamily family_;
  double alpha_;
  double a_;
  double b_;
  double lower_;
  double upper_;
};

struct HassProbe {
  double y;             // probe in the range
  double x;             // h⁻¹(y)
  double first_ratio;   // |(h⁻¹)'(y)| / |h⁻¹(y)|ⁿ
  double second_ratio;  // |(h⁻¹)''(y)| / |h⁻¹(y)|ⁿ
};

struct HassReport {
  int exponent;
  double constant;
  std::vector<HassProbe> lower_probes;
  std::vector<HassProbe> upper_probes;
  double max_ratio;
  /// Ratio growth over the last decade of probes, worst of both ends.
  double final_growth;
  bool bounded;
  std::string verdict;  // "bounded" or "unbounded"
};

/// Probes (h⁻¹)' and (h⁻¹)'' against |h⁻¹|ⁿ as y approaches both ends of the
/// range geometrically (distances 10⁻² … 10⁻¹³ of the range width). Reported
/// "bounded" when every ratio stays below `constant` and the ratios grow by
/// less than a factor 2 over the last decade.
HassReport check_hass(const BijectionH& h, int exponent, double constant = 1e3);

}  // namespace ssf
