#include "ssf/w1_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "ssf/simd/kernels.hpp"
#include "ssf/step_function.hpp"

namespace ssf {

namespace {

constexpr double kPi = std::numbers::pi;

double poly(const std::vector<double>& c, double t) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
  return r;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

// Cubic Hermite blend q on u ∈ [0,1] with q(0)=d0, q'(0)=s0, q(1)=q'(1)=0,
// and its primitive Q(u) = ∫_0^u q.
double blend(double d0, double s0, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return d0 * (2 * u3 - 3 * u2 + 1) + s0 * (u3 - 2 * u2 + u);
}

double blend_primitive(double d0, double s0, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double u4 = u3 * u;
  return d0 * (0.5 * u4 - u3 + u) + s0 * (0.25 * u4 - 2.0 * u3 / 3.0 + 0.5 * u2);
}

struct WindowEval {
  const PolynomialWindow& w;

  double margin() const { return (w.b - w.a) / 10.0; }

  double value(double t) const {
    const double m = margin();
    if (t >= w.a && t <= w.b) return poly(w.coefficients, t);
    const auto d = poly_derivative(w.coefficients);
    const auto dd = poly_derivative(d);
    if (t > w.b) {
      const double u = std::min((t - w.b) / m, 1.0);
      return poly(w.coefficients, w.b) + m * blend_primitive(poly(d, w.b), m * poly(dd, w.b), u);
    }
    const double u = std::min((w.a - t) / m, 1.0);
    return poly(w.coefficients, w.a) - m * blend_primitive(poly(d, w.a), -m * poly(dd, w.a), u);
  }

  double derivative(double t) const {
    const double m = margin();
    const auto d = poly_derivative(w.coefficients);
    if (t >= w.a && t <= w.b) return poly(d, t);
    const auto dd = poly_derivative(d);
    if (t > w.b) {
      const double u = (t - w.b) / m;
      return u >= 1.0 ? 0.0 : blend(poly(d, w.b), m * poly(dd, w.b), u);
    }
    const double u = (w.a - t) / m;
    return u >= 1.0 ? 0.0 : blend(poly(d, w.a), -m * poly(dd, w.a), u);
  }
};

struct SampledEval {
  const Sampled& s;

  // Locates t in cell j with local coordinate u ∈ [0, 1].
  bool locate(double t, std::size_t& j, double& u) const {
    const double x = (t - s.start) / s.step;
    const auto last = static_cast<double>(s.values.size() - 1);
    if (x < 0.0 || x > last) return false;
    double cell = std::floor(x);
    if (cell >= last) cell = last - 1;
    j = static_cast<std::size_t>(cell);
    u = x - cell;
    return true;
  }

  double value(double t) const {
    std::size_t j = 0;
    double u = 0.0;
    if (!locate(t, j, u)) return t < s.start ? s.values.front() : s.values.back();
    const double h = s.step;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return s.values[j] * (2 * u3 - 3 * u2 + 1) + h * s.derivatives[j] * (u3 - 2 * u2 + u) +
           s.values[j + 1] * (-2 * u3 + 3 * u2) + h * s.derivatives[j + 1] * (u3 - u2);
  }

  double derivative(double t) const {
    std::size_t j = 0;
    double u = 0.0;
    if (!locate(t, j, u)) return 0.0;
    const double h = s.step;
    const double u2 = u * u;
    return (s.values[j] * (6 * u2 - 6 * u) + s.values[j + 1] * (-6 * u2 + 6 * u)) / h +
           s.derivatives[j] * (3 * u2 - 4 * u + 1) + s.derivatives[j + 1] * (3 * u2 - 2 * u);
  }
};

// Slopes of the cubic spline through `v` with zero end slopes.
std::vector<double> clamped_spline_slopes(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  const std::size_t m = n - 2;  // interior unknowns d_1..d_{n-2}
  std::vector<double> diag(m, 4.0), rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = 3.0 * (v[i + 2] - v[i]) / h;
  for (std::size_t i = 1; i < m; ++i) {
    const double f = 1.0 / diag[i - 1];
    diag[i] -= f;
    rhs[i] -= f * rhs[i - 1];
  }
  d[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) d[i + 1] = (rhs[i] - d[i + 2]) / diag[i];
  return d;
}

std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x && n < (std::size_t{1} << 40)) n <<= 1;
  return n;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

W1Function::W1Function(Repr r) : repr_(std::make_shared<const Repr>(std::move(r))) {}

W1Function W1Function::gaussian_primitive(double center, double width, double amplitude) {
  if (!(width > 0.0) || !std::isfinite(width)) throw std::domain_error("gaussian_primitive: width must be > 0");
  if (!std::isfinite(center) || !std::isfinite(amplitude)) {
    throw std::domain_error("gaussian_primitive: parameters must be finite");
  }
  return W1Function(GaussianPrimitive{center, width, amplitude});
}

W1Function W1Function::polynomial_window(std::vector<double> coefficients, double a, double b) {
  if (coefficients.empty()) throw std::domain_error("polynomial_window: empty coefficient list");
  if (!(b > a)) throw std::domain_error("polynomial_window: need b > a");
  return W1Function(PolynomialWindow{std::move(coefficients), a, b});
}

W1Function W1Function::h_alpha_profile(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("h_alpha_profile: alpha must be > 0");
  return W1Function(HAlphaProfile{alpha});
}

W1Function W1Function::sampled(double start, double step, std::vector<double> values,
                               std::vector<double> derivatives, double feature_scale) {
  if (values.size() < 2) throw std::domain_error("sampled: at least two samples are required");
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start)) {
    throw std::domain_error("sampled: need a finite start and a positive step");
  }
  Sampled s;
  s.start = start;
  s.step = step;
  s.explicit_derivatives = !derivatives.empty();
  if (s.explicit_derivatives && derivatives.size() != values.size()) {
    throw std::domain_error("sampled: derivatives must match values in length");
  }
  s.derivatives = s.explicit_derivatives ? std::move(derivatives) : clamped_spline_slopes(values, step);
  s.values = std::move(values);
  s.feature_scale = feature_scale > 0.0 ? feature_scale : step;
  return W1Function(std::move(s));
}

W1Function W1Function::constant(double value) {
  return sampled(-1.0, 1.0, {value, value, value});
}

double W1Function::value(double t) const {
  return std::visit(
      [t](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, GaussianPrimitive>) {
          return r.amplitude * r.width * std::sqrt(kPi / 2.0) *
                 std::erfc(-(t - r.center) / (r.width * std::numbers::sqrt2));
        } else if constexpr (std::is_same_v<T, PolynomialWindow>) {
          return WindowEval{r}.value(t);
        } else if constexpr (std::is_same_v<T, HAlphaProfile>) {
          return t / std::sqrt(r.alpha * r.alpha + t * t);
        } else {
          return SampledEval{r}.value(t);
        }
      },
      *repr_);
}

double W1Function::derivative(double t) const {
  return std::visit(
      [t](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, GaussianPrimitive>) {
          const double z = (t - r.center) / r.width;
          return r.amplitude * std::exp(-0.5 * z * z);
        } else if constexpr (std::is_same_v<T, PolynomialWindow>) {
          return WindowEval{r}.derivative(t);
        } else if constexpr (std::is_same_v<T, HAlphaProfile>) {
          const double q = r.alpha * r.alpha + t * t;
          return r.alpha * r.alpha / (q * std::sqrt(q));
        } else {
          return SampledEval{r}.derivative(t);
        }
      },
      *repr_);
}

W1Family W1Function::family() const { return static_cast<W1Family>(repr_->index()); }

std::string_view W1Function::family_name() const {
  switch (family()) {
    case W1Family::gaussian_primitive:
      return "gaussian_primitive";
    case W1Family::polynomial_window:
      return "polynomial_window";
    case W1Family::h_alpha_profile:
      return "h_alpha_profile";
    case W1Family::sampled:
      return "sampled";
  }
  return "unknown";
}

std::optional<double> W1Function::exact_seminorm() const {
  if (const auto* g = as_gaussian()) return std::fabs(g->amplitude);
  if (const auto* h = as_h_alpha()) return 1.0 / h->alpha;
  if (const auto* s = as_sampled()) {
    const bool flat = std::all_of(s->values.begin(), s->values.end(), [&](double v) { return v == s->values[0]; }) &&
                      std::all_of(s->derivatives.begin(), s->derivatives.end(), [](double d) { return d == 0.0; });
    if (flat) return 0.0;
  }
  return std::nullopt;
}

SupportHint W1Function::support_hint() const {
  return std::visit(
      [](const auto& r) -> SupportHint {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, GaussianPrimitive>) {
          // exp(−z²/2) < 1e-16 beyond |z| = 8.6
          return {1.25 * (std::fabs(r.center) + 9.0 * r.width), r.width};
        } else if constexpr (std::is_same_v<T, PolynomialWindow>) {
          // F(f') has zeros, so the lattice sum of |F(f')| needs heavy zero padding
          const double m = (r.b - r.a) / 10.0;
          return {64.0 * std::max(std::fabs(r.a - m), std::fabs(r.b + m)), m / 4.0};
        } else if constexpr (std::is_same_v<T, HAlphaProfile>) {
          // (1 + x²)^{-3/2} < 1e-12 beyond |x| = 1e4
          return {1.25e4 * r.alpha, r.alpha};
        } else {
          const double end = r.start + r.step * static_cast<double>(r.values.size() - 1);
          return {2.0 * std::max(std::fabs(r.start), std::fabs(end)), r.feature_scale};
        }
      },
      *repr_);
}

double W1Function::derivative_peak() const {
  return std::visit(
      [this](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, GaussianPrimitive>) {
          return std::fabs(r.amplitude);
        } else if constexpr (std::is_same_v<T, HAlphaProfile>) {
          return 1.0 / r.alpha;
        } else {
          const auto hint = support_hint();
          double peak = 0.0;
          const int n = 4096;
          for (int i = 0; i <= n; ++i) {
            const double t = -hint.half_width + 2.0 * hint.half_width * i / n;
            peak = std::max(peak, std::fabs(derivative(t)));
          }
          if constexpr (std::is_same_v<T, Sampled>) {
            for (double d : r.derivatives) peak = std::max(peak, std::fabs(d));
          }
          return peak;
        }
      },
      *repr_);
}

const GaussianPrimitive* W1Function::as_gaussian() const { return std::get_if<GaussianPrimitive>(repr_.get()); }
const PolynomialWindow* W1Function::as_polynomial_window() const {
  return std::get_if<PolynomialWindow>(repr_.get());
}
const HAlphaProfile* W1Function::as_h_alpha() const { return std::get_if<HAlphaProfile>(repr_.get()); }
const Sampled* W1Function::as_sampled() const { return std::get_if<Sampled>(repr_.get()); }

std::string W1Function::label() const {
  std::ostringstream os;
  os << family_name() << "(";
  if (const auto* g = as_gaussian()) {
    os << "c=" << format_double(g->center) << ",w=" << format_double(g->width);
    if (g->amplitude != 1.0) os << ",amp=" << format_double(g->amplitude);
  } else if (const auto* p = as_polynomial_window()) {
    os << "deg=" << p->coefficients.size() - 1 << ",[" << format_double(p->a) << "," << format_double(p->b) << "]";
  } else if (const auto* h = as_h_alpha()) {
    os << "alpha=" << format_double(h->alpha);
  } else if (const auto* s = as_sampled()) {
    os << "n=" << s->values.size() << ",step=" << format_double(s->step);
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Seminorm by discrete Fourier transform

namespace {

SeminormGrid grid_from_hint(SupportHint h) {
  const double spacing = h.resolution / 8.0;
  std::size_t n = next_pow2(2.0 * h.half_width / spacing);
  n = std::clamp<std::size_t>(n, std::size_t{1} << 10, std::size_t{1} << 22);
  return {h.half_width, n};
}

template <class Deriv>
double grid_seminorm(const Deriv& df, const SeminormGrid& grid, double tail_tol, const char* who,
                     double reference_peak = 0.0) {
  if (!is_pow2(grid.points) || grid.points < (std::size_t{1} << 10)) {
    throw std::domain_error(std::string(who) + ": grid points must be a power of two >= 1024");
  }
  if (!(grid.half_width > 0.0)) throw std::domain_error(std::string(who) + ": half width must be > 0");
  const std::size_t n = grid.points;
  const double L = grid.half_width;
  const double dt = 2.0 * L / static_cast<double>(n);
  std::vector<double> samples(n);
  double peak = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    samples[j] = df(-L + static_cast<double>(j) * dt);
    peak = std::max(peak, std::fabs(samples[j]));
  }
  // trapezoid: the periodic node −L stands for both ends of [−L, L]
  const double right_end = df(L);
  peak = std::max(peak, std::fabs(right_end));
  samples[0] = 0.5 * (samples[0] + right_end);
  if (peak == 0.0) return 0.0;
  peak = std::max(peak, reference_peak);

  double tail_peak = 0.0;
  double tail_mass = 0.0;
  const int probes = 32;
  for (int i = 0; i <= probes; ++i) {
    const double t = L * (1.0 + 2.0 * i / probes);
    const double v = std::max(std::fabs(df(t)), std::fabs(df(-t)));
    tail_peak = std::max(tail_peak, v);
    tail_mass += v * (2.0 * L / probes);
  }
  if (tail_peak > tail_tol * peak) {
    std::ostringstream os;
    os << who << ": grid [-" << L << ", " << L << "] does not cover the support of f' (tail peak ratio "
       << tail_peak / peak << ", estimated tail mass " << tail_mass << ")";
    throw std::domain_error(os.str());
  }

  const auto spectrum = detail::real_forward(samples);
  // ∫|F| ≈ (1/N)(|G_0| + 2 Σ_{0<k<N/2} |G_k| + |G_{N/2}|)
  const std::span<const double> inter(reinterpret_cast<const double*>(spectrum.data()), 2 * spectrum.size());
  const double interior = simd::complex_abs_sum(inter.subspan(2, 2 * (spectrum.size() - 2)));
  const double total = std::abs(spectrum.front()) + 2.0 * interior + std::abs(spectrum.back());
  return total / static_cast<double>(n);
}

}  // namespace

SeminormGrid default_grid(const W1Function& f) { return grid_from_hint(f.support_hint()); }

SeminormGrid default_grid(const W1Function& f, const W1Function& g) {
  const auto a = f.support_hint();
  const auto b = g.support_hint();
  return grid_from_hint({std::max(a.half_width, b.half_width), std::min(a.resolution, b.resolution)});
}

SeminormResult w1_seminorm(const W1Function& f, const SeminormGrid& grid, double tail_tol) {
  const double est = grid_seminorm([&f](double t) { return f.derivative(t); }, grid, tail_tol, "w1_seminorm");
  const auto exact = f.exact_seminorm();
  return {exact.value_or(est), est, exact, grid};
}

SeminormResult w1_seminorm(const W1Function& f) { return w1_seminorm(f, default_grid(f)); }

double w1_distance(const W1Function& f, const W1Function& g, const SeminormGrid& grid, double tail_tol) {
  // tails are judged against the operands, not their (possibly tiny) difference
  double ref = 0.0;
  const double dt = 2.0 * grid.half_width / static_cast<double>(std::max<std::size_t>(grid.points, 1));
  for (double t = -grid.half_width; t < grid.half_width; t += dt) {
    ref = std::max({ref, std::fabs(f.derivative(t)), std::fabs(g.derivative(t))});
  }
  return grid_seminorm([&](double t) { return f.derivative(t) - g.derivative(t); }, grid, tail_tol,
                       "w1_distance", ref);
}

double w1_distance(const W1Function& f, const W1Function& g) {
  return w1_distance(f, g, default_grid(f, g));
}

W1Function approximate_in_w1(const W1Function& f, int n) {
  if (n < 1) throw std::domain_error("approximate_in_w1: n must be >= 1");
  const auto hint = f.support_hint();
  const double sigma = 1.0 / n;
  const double reach = std::min(static_cast<double>(n), hint.half_width) + 12.0 * sigma + 1.0;
  const double dt_target = std::min(sigma, hint.resolution) / 32.0;
  const std::size_t pts = std::clamp<std::size_t>(next_pow2(2.0 * reach / dt_target), 1024, std::size_t{1} << 22);
  const double dt = 2.0 * reach / static_cast<double>(pts);
  const double nn = static_cast<double>(n);

  std::vector<double> truncated(pts);
  for (std::size_t j = 0; j < pts; ++j) {
    const double t = -reach + static_cast<double>(j) * dt;
    // cell-averaged indicator of [−n, n]
    const double inside = std::clamp((nn - std::fabs(t)) / dt + 0.5, 0.0, 1.0);
    truncated[j] = inside == 0.0 ? 0.0 : inside * f.derivative(t);
  }
  auto spec = detail::real_forward(truncated);
  auto dspec = spec;
  const double domega = 2.0 * kPi / (static_cast<double>(pts) * dt);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double w = domega * static_cast<double>(k);
    const double damp = std::exp(-0.5 * sigma * sigma * w * w);
    spec[k] *= damp;
    // d/dt ↔ multiplication by iω; the Nyquist term of a real signal has no
    // consistent odd part
    dspec[k] = (k + 1 == spec.size()) ? std::complex<double>(0.0, 0.0) : spec[k] * std::complex<double>(0.0, w);
  }
  // the phase reference −reach is common to both transforms and cancels
  const auto slope = detail::real_inverse(spec, pts);
  const auto curvature = detail::real_inverse(dspec, pts);

  std::vector<double> vals(pts);
  const std::size_t mid = pts / 2;  // t = 0
  vals[mid] = f.value(0.0);
  const double h = dt;
  for (std::size_t j = mid; j + 1 < pts; ++j) {
    vals[j + 1] = vals[j] + 0.5 * h * (slope[j] + slope[j + 1]) + h * h / 12.0 * (curvature[j] - curvature[j + 1]);
  }
  for (std::size_t j = mid; j > 0; --j) {
    vals[j - 1] = vals[j] - 0.5 * h * (slope[j] + slope[j - 1]) - h * h / 12.0 * (curvature[j - 1] - curvature[j]);
  }
  return W1Function::sampled(-reach, dt, std::move(vals), slope, std::min(sigma, hint.resolution));
}

}  // namespace ssf
