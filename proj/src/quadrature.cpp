#include "ssf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ssf {

void QuadratureSpec::validate() const {
  if (nodes < 2) throw std::invalid_argument("quadrature: node count must be >= 2");
  if (!(target > 0.0)) throw std::invalid_argument("quadrature: target error must be > 0");
  if (max_evaluations < 5) throw std::invalid_argument("quadrature: evaluation cap too small");
}

std::string_view rule_name(QuadratureRule r) {
  return r == QuadratureRule::gauss_legendre ? "gauss_legendre" : "adaptive_simpson";
}

namespace {

// P_n'(x) from the three-term recurrence; P_n(x) through `pn`.
double legendre_derivative(int n, double x, double& pn) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  return n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendreRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dp = legendre_derivative(n, x, pn);
      const double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double dp = legendre_derivative(n, x, pn);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = 0.5 * (1.0 - x);
    r.nodes[hi] = 0.5 * (1.0 + x);
    r.weights[lo] = 0.5 * w;
    r.weights[hi] = 0.5 * w;
  }
  return r;
}

namespace {

std::vector<double> apply_rule(const VectorIntegrand& f, std::size_t m, const GaussLegendreRule& rule, int& evals) {
  std::vector<double> acc(m, 0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto v = f(rule.nodes[i]);
    ++evals;
    for (std::size_t c = 0; c < m; ++c) acc[c] += rule.weights[i] * v[c];
  }
  return acc;
}

struct Simpson {
  const VectorIntegrand& f;
  std::size_t m;
  double target;
  int cap;
  int evals = 0;
  double worst = 0.0;

  static double tol_for(const std::vector<double>& s, std::size_t c, double target) {
    return target * (1.0 + std::fabs(s[c]));
  }

  std::vector<double> simpson(double a, double b, const std::vector<double>& fa, const std::vector<double>& fm,
                              const std::vector<double>& fb) const {
    std::vector<double> s(m);
    for (std::size_t c = 0; c < m; ++c) s[c] = (b - a) / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
    return s;
  }

  std::vector<double> recurse(double a, double b, const std::vector<double>& fa, const std::vector<double>& fm,
                              const std::vector<double>& fb, const std::vector<double>& whole, double tol_scale,
                              int depth) {
    const double mid = 0.5 * (a + b);
    const auto flm = f(0.5 * (a + mid));
    const auto frm = f(0.5 * (mid + b));
    evals += 2;
    const auto left = simpson(a, mid, fa, flm, fm);
    const auto right = simpson(mid, b, fm, frm, fb);
    std::vector<double> sum(m);
    double err = 0.0;
    bool ok = true;
    for (std::size_t c = 0; c < m; ++c) {
      sum[c] = left[c] + right[c];
      const double e = std::fabs(sum[c] - whole[c]) / 15.0;
      err = std::max(err, e);
      if (e > tol_scale * tol_for(sum, c, target)) ok = false;
    }
    if (ok || depth > 40 || evals >= cap) {
      // Richardson-corrected Simpson
      for (std::size_t c = 0; c < m; ++c) sum[c] += (sum[c] - whole[c]) / 15.0;
      worst += err;
      return sum;
    }
    auto l = recurse(a, mid, fa, flm, fm, left, 0.5 * tol_scale, depth + 1);
    const auto r = recurse(mid, b, fm, frm, fb, right, 0.5 * tol_scale, depth + 1);
    for (std::size_t c = 0; c < m; ++c) l[c] += r[c];
    return l;
  }
};

}  // namespace

QuadratureResult integrate_unit_interval(const VectorIntegrand& f, std::size_t components,
                                         const QuadratureSpec& spec) {
  spec.validate();
  int evals = 0;
  if (spec.rule == QuadratureRule::gauss_legendre) {
    const auto full = apply_rule(f, components, gauss_legendre(spec.nodes), evals);
    const auto half = apply_rule(f, components, gauss_legendre(std::max(1, spec.nodes / 2)), evals);
    double err = 0.0;
    bool ok = true;
    for (std::size_t c = 0; c < components; ++c) {
      const double e = std::fabs(full[c] - half[c]);
      err = std::max(err, e);
      if (e > spec.target * (1.0 + std::fabs(full[c]))) ok = false;
    }
    if (ok || !spec.fallback) return {full, err, evals, QuadratureRule::gauss_legendre};
  }
  Simpson s{f, components, spec.target, spec.max_evaluations};
  const auto fa = f(0.0);
  const auto fm = f(0.5);
  const auto fb = f(1.0);
  s.evals = 3;
  const auto whole = s.simpson(0.0, 1.0, fa, fm, fb);
  auto values = s.recurse(0.0, 1.0, fa, fm, fb, whole, 1.0, 0);
  evals += s.evals;
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, 1.0 + std::fabs(v));
  if (s.evals >= spec.max_evaluations && s.worst > spec.target * scale) {
    std::ostringstream os;
    os << "quadrature: target " << spec.target << " not met after " << s.evals
       << " evaluations (achieved error estimate " << s.worst << ")";
    throw std::runtime_error(os.str());
  }
  return {std::move(values), s.worst, evals, QuadratureRule::adaptive_simpson};
}

}  // namespace ssf
