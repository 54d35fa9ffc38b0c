#include "ssf/step_function.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ssf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Drops breakpoints that carry no jump.
void drop_flat(std::vector<double>& bps, std::vector<double>& vals) {
  std::vector<double> nb;
  std::vector<double> nv{vals.front()};
  nb.reserve(bps.size());
  for (std::size_t j = 0; j < bps.size(); ++j) {
    if (vals[j + 1] != nv.back()) {
      nb.push_back(bps[j]);
      nv.push_back(vals[j + 1]);
    }
  }
  bps = std::move(nb);
  vals = std::move(nv);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

StepFunction::StepFunction(double value) : values_{value} {}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.size() != breakpoints_.size() + 1) {
    throw std::invalid_argument("StepFunction: need exactly one more value than breakpoints");
  }
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (!std::isfinite(breakpoints_[j])) {
      throw std::invalid_argument("StepFunction: breakpoints must be finite");
    }
    if (j > 0 && !(breakpoints_[j] > breakpoints_[j - 1])) {
      throw std::invalid_argument("StepFunction: breakpoints must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("StepFunction: values must be finite");
  }
}

StepFunction StepFunction::from_sorted_clusters(const std::vector<double>& locations,
                                                const std::function<double(double)>& value_after,
                                                double left_tail, double merge_tol) {
  std::vector<double> pts = locations;
  std::sort(pts.begin(), pts.end());
  std::vector<double> bps;
  std::vector<double> vals{left_tail};
  std::size_t i = 0;
  while (i < pts.size()) {
    const double anchor = pts[i];
    std::size_t last = i;
    while (last + 1 < pts.size() && pts[last + 1] - anchor <= merge_tol) ++last;
    bps.push_back(anchor);
    vals.push_back(value_after(pts[last]));
    i = last + 1;
  }
  drop_flat(bps, vals);
  return StepFunction(std::move(bps), std::move(vals));
}

double StepFunction::operator()(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

std::optional<std::pair<double, double>> StepFunction::support() const {
  if (!compactly_supported()) {
    return std::make_pair(-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity());
  }
  std::optional<double> lo;
  double hi = 0.0;
  for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
    if (values_[j + 1] != 0.0) {
      if (!lo) lo = breakpoints_[j];
      hi = breakpoints_[j + 1];
    }
  }
  if (!lo) return std::nullopt;
  return std::make_pair(*lo, hi);
}

double StepFunction::integral() const {
  return integrate_derivative([](double s) { return s; });
}

double StepFunction::l1_norm() const {
  if (!compactly_supported()) throw std::domain_error("l1_norm: tails are nonzero");
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
    s += std::fabs(values_[j + 1]) * (breakpoints_[j + 1] - breakpoints_[j]);
  }
  return s;
}

double StepFunction::linf_norm() const { return max_abs(values_); }

double StepFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double StepFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double StepFunction::integral_over(double a, double b) const {
  if (b < a) return -integral_over(b, a);
  if (std::isinf(a) && left_tail() != 0.0) throw std::domain_error("integral_over: infinite left tail");
  if (std::isinf(b) && right_tail() != 0.0) throw std::domain_error("integral_over: infinite right tail");
  double s = 0.0;
  const std::size_t k = breakpoints_.size();
  for (std::size_t j = 0; j <= k; ++j) {
    const double l = j == 0 ? -std::numeric_limits<double>::infinity() : breakpoints_[j - 1];
    const double r = j == k ? std::numeric_limits<double>::infinity() : breakpoints_[j];
    const double lo = std::max(l, a);
    const double hi = std::min(r, b);
    if (hi > lo && values_[j] != 0.0) s += values_[j] * (hi - lo);
  }
  return s;
}

double StepFunction::integrate_derivative(const std::function<double(double)>& antiderivative) const {
  if (!compactly_supported()) throw std::domain_error("integrate_derivative: tails are nonzero");
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
    const double v = values_[j + 1];
    if (v != 0.0) s += v * (antiderivative(breakpoints_[j + 1]) - antiderivative(breakpoints_[j]));
  }
  return s;
}

double StepFunction::moment(int m) const {
  if (m < 1) throw std::domain_error("moment: m must be >= 1");
  return integrate_derivative([m](double s) { return std::pow(s, m); });
}

StepFunction StepFunction::negated() const { return scaled(-1.0); }

StepFunction StepFunction::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x = c * x + 0.0;
  if (c == 0.0) return StepFunction(0.0);
  return StepFunction(breakpoints_, std::move(v));
}

StepFunction StepFunction::shifted(double c) const {
  std::vector<double> b = breakpoints_;
  for (double& x : b) x += c;
  return StepFunction(std::move(b), values_);
}

StepFunction StepFunction::mapped_breakpoints(const std::function<double(double)>& map) const {
  std::vector<double> b;
  b.reserve(breakpoints_.size());
  for (double x : breakpoints_) {
    const double y = map(x);
    if (!std::isfinite(y) || (!b.empty() && !(y > b.back()))) {
      throw std::domain_error("mapped_breakpoints: map is not strictly increasing on the breakpoints");
    }
    b.push_back(y);
  }
  return StepFunction(std::move(b), values_);
}

StepFunction StepFunction::simplified(double merge_tol, double value_tol) const {
  auto snap = [value_tol](double v) { return std::fabs(v) <= value_tol ? 0.0 : v; };
  std::vector<double> bps;
  std::vector<double> vals{snap(values_.front())};
  std::size_t i = 0;
  while (i < breakpoints_.size()) {
    const double anchor = breakpoints_[i];
    std::size_t last = i;
    while (last + 1 < breakpoints_.size() && breakpoints_[last + 1] - anchor <= merge_tol) ++last;
    const double v = snap(values_[last + 1]);
    if (std::fabs(v - vals.back()) > value_tol) {
      bps.push_back(anchor);
      vals.push_back(v);
    }
    i = last + 1;
  }
  return StepFunction(std::move(bps), std::move(vals));
}

bool StepFunction::approx_equal(const StepFunction& other, double bp_tol, double value_tol) const {
  if (breakpoints_.size() != other.breakpoints_.size()) return false;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (std::fabs(breakpoints_[j] - other.breakpoints_[j]) > bp_tol) return false;
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (std::fabs(values_[j] - other.values_[j]) > value_tol) return false;
  }
  return true;
}

double StepFunction::max_breakpoint_deviation(const StepFunction& other) const {
  if (breakpoints_.size() != other.breakpoints_.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    d = std::max(d, std::fabs(breakpoints_[j] - other.breakpoints_[j]));
  }
  return d;
}

std::string StepFunction::to_csv() const {
  std::string out = "breakpoint,value_right\n";
  out += "-inf," + format_double(values_.front()) + "\n";
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    out += format_double(breakpoints_[j]) + "," + format_double(values_[j + 1]) + "\n";
  }
  return out;
}

StepFunction StepFunction::from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("breakpoint,value_right", 0) != 0) {
    throw std::invalid_argument("StepFunction CSV: missing header 'breakpoint,value_right'");
  }
  auto parse = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("StepFunction CSV: bad number '" + s + "'");
    return v;
  };
  std::vector<double> bps;
  std::vector<double> vals;
  bool have_tail = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("StepFunction CSV: line " + std::to_string(lineno) + " lacks a comma");
    }
    const std::string left = line.substr(0, comma);
    const double value = parse(line.substr(comma + 1));
    if (!have_tail) {
      if (left != "-inf") throw std::invalid_argument("StepFunction CSV: first row must be the -inf tail");
      vals.push_back(value);
      have_tail = true;
      continue;
    }
    bps.push_back(parse(left));
    vals.push_back(value);
  }
  if (!have_tail) throw std::invalid_argument("StepFunction CSV: missing left-tail row");
  return StepFunction(std::move(bps), std::move(vals));
}

StepFunction combine(const StepFunction& f, const StepFunction& g, double merge_tol,
                     const std::function<double(double, double)>& op) {
  std::vector<double> pts;
  pts.reserve(f.breakpoints().size() + g.breakpoints().size());
  std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
             g.breakpoints().end(), std::back_inserter(pts));
  const double scale = std::max(f.linf_norm(), g.linf_norm());
  const double value_tol = 32.0 * kEps * scale;
  auto snap = [value_tol](double v) { return std::fabs(v) <= value_tol ? 0.0 : v; };
  std::vector<double> bps;
  std::vector<double> vals{snap(op(f.left_tail(), g.left_tail()))};
  std::size_t i = 0;
  while (i < pts.size()) {
    const double anchor = pts[i];
    std::size_t last = i;
    while (last + 1 < pts.size() && pts[last + 1] - anchor <= merge_tol) ++last;
    const double v = snap(op(f(pts[last]), g(pts[last])));
    if (std::fabs(v - vals.back()) > value_tol) {
      bps.push_back(anchor);
      vals.push_back(v);
    }
    i = last + 1;
  }
  return StepFunction(std::move(bps), std::move(vals));
}

StepFunction subtract(const StepFunction& f, const StepFunction& g, double merge_tol) {
  return combine(f, g, merge_tol, [](double a, double b) { return a - b; });
}

StepFunction add(const StepFunction& f, const StepFunction& g, double merge_tol) {
  return combine(f, g, merge_tol, [](double a, double b) { return a + b; });
}

}  // namespace ssf
