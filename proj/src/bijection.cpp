#include "ssf/bijection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ssf/simd/kernels.hpp"
#include "ssf/step_function.hpp"

namespace ssf {

namespace {

// x / sqrt((1 − z)(1 + z)) with z = x/r recovered from the two gaps.
double inverse_profile(double alpha, double z, double one_minus_z, double one_plus_z) {
  return alpha * z / std::sqrt(one_minus_z * one_plus_z);
}

double sech2(double u) {
  const double e = std::exp(-2.0 * std::fabs(u));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

BijectionH::BijectionH(BijectionFamily f, double alpha, double a, double b, double lower, double upper)
    : family_(f), alpha_(alpha), a_(a), b_(b), lower_(lower), upper_(upper) {}

BijectionH BijectionH::h_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("h_alpha: alpha must be > 0");
  return BijectionH(BijectionFamily::h_alpha, alpha, 0.0, 0.0, -1.0, 1.0);
}

BijectionH BijectionH::h_window(double a, double b, double alpha) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw std::domain_error("h_window: need a < b");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("h_window: alpha must be > 0");
  // each tail integrates to α: ∫_0^∞ α³(α² + u²)^{-3/2} du = α
  const double tail = alpha;
  return BijectionH(BijectionFamily::h_window, alpha, a, b, 0.0, tail + (b - a) + tail);
}

BijectionH BijectionH::logistic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::domain_error("logistic: scale must be > 0");
  return BijectionH(BijectionFamily::logistic, scale, 0.0, 0.0, -1.0, 1.0);
}

double BijectionH::value(double t) const {
  const double al = alpha_;
  switch (family_) {
    case BijectionFamily::h_alpha:
      return t / std::sqrt(al * al + t * t);
    case BijectionFamily::h_window: {
      if (t < a_) {
        const double x = t - a_;
        const double r = std::sqrt(al * al + x * x);
        return al * al * al / ((r - x) * r);
      }
      if (t <= b_) return al + (t - a_);
      const double x = t - b_;
      return al + (b_ - a_) + al * x / std::sqrt(al * al + x * x);
    }
    case BijectionFamily::logistic:
      return std::tanh(t / al);
  }
  return 0.0;
}

double BijectionH::derivative(double t) const {
  const double al = alpha_;
  switch (family_) {
    case BijectionFamily::h_alpha: {
      const double q = al * al + t * t;
      return al * al / (q * std::sqrt(q));
    }
    case BijectionFamily::h_window: {
      if (t >= a_ && t <= b_) return 1.0;
      const double x = t < a_ ? t - a_ : t - b_;
      const double q = al * al + x * x;
      return al * al * al / (q * std::sqrt(q));
    }
    case BijectionFamily::logistic:
      return sech2(t / al) / al;
  }
  return 0.0;
}

double BijectionH::second_derivative(double t) const {
  const double al = alpha_;
  switch (family_) {
    case BijectionFamily::h_alpha: {
      const double q = al * al + t * t;
      return -3.0 * al * al * t / (q * q * std::sqrt(q));
    }
    case BijectionFamily::h_window: {
      if (t >= a_ && t <= b_) return 0.0;
      const double x = t < a_ ? t - a_ : t - b_;
      const double q = al * al + x * x;
      return -3.0 * al * al * al * x / (q * q * std::sqrt(q));
    }
    case BijectionFamily::logistic:
      return -2.0 * std::tanh(t / al) * sech2(t / al) / (al * al);
  }
  return 0.0;
}

double BijectionH::inverse(double y) const {
  if (!(y > lower_ && y < upper_)) {
    std::ostringstream os;
    os << label() << ": " << y << " is outside the range (" << lower_ << ", " << upper_ << ")";
    throw std::domain_error(os.str());
  }
  const double al = alpha_;
  switch (family_) {
    case BijectionFamily::h_alpha:
      return inverse_profile(al, y, 1.0 - y, 1.0 + y);
    case BijectionFamily::h_window: {
      if (y < al) {
        const double one_plus = y / al;
        return a_ + inverse_profile(al, one_plus - 1.0, 2.0 - one_plus, one_plus);
      }
      if (y <= al + (b_ - a_)) return a_ + (y - al);
      const double one_minus = (upper_ - y) / al;
      return b_ + inverse_profile(al, 1.0 - one_minus, one_minus, 2.0 - one_minus);
    }
    case BijectionFamily::logistic:
      return al * std::atanh(y);
  }
  return 0.0;
}

void BijectionH::map(std::span<const double> in, std::span<double> out) const {
  if (out.size() < in.size()) throw std::invalid_argument("BijectionH::map: output too short");
  if (family_ == BijectionFamily::h_alpha) {
    simd::h_alpha(in, alpha_, out);
    return;
  }
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = value(in[i]);
}

std::string BijectionH::label() const {
  switch (family_) {
    case BijectionFamily::h_alpha:
      return "h_alpha(" + format_double(alpha_) + ")";
    case BijectionFamily::h_window:
      return "h_window(" + format_double(a_) + "," + format_double(b_) + "," + format_double(alpha_) + ")";
    case BijectionFamily::logistic:
      return "logistic(" + format_double(alpha_) + ")";
  }
  return "h";
}

HassReport check_hass(const BijectionH& h, int exponent, double constant) {
  HassReport rep{exponent, constant, {}, {}, 0.0, 0.0, true, "bounded"};
  const double width = h.upper() - h.lower();
  auto probe = [&](double y) {
    const double x = h.inverse(y);
    const double d1 = h.derivative(x);
    const double d2 = h.second_derivative(x);
    const double p = std::pow(std::fabs(x), exponent);
    // (h⁻¹)' = 1/h'(x), (h⁻¹)'' = −h''(x)/h'(x)³
    return HassProbe{y, x, (1.0 / d1) / p, std::fabs(d2) / (d1 * d1 * d1) / p};
  };
  for (int k = 2; k <= 13; ++k) {
    const double delta = std::pow(10.0, -k) * width;
    rep.lower_probes.push_back(probe(h.lower() + delta));
    rep.upper_probes.push_back(probe(h.upper() - delta));
  }
  for (const auto* side : {&rep.lower_probes, &rep.upper_probes}) {
    for (const auto& p : *side) {
      const double r = std::max(p.first_ratio, p.second_ratio);
      rep.max_ratio = std::isfinite(r) ? std::max(rep.max_ratio, r) : INFINITY;
    }
    const auto& last = side->back();
    const auto& prev = (*side)[side->size() - 2];
    const double growth = std::max(last.first_ratio / prev.first_ratio, last.second_ratio / prev.second_ratio);
    rep.final_growth = std::max(rep.final_growth, growth);
  }
  rep.bounded = rep.max_ratio <= constant && rep.final_growth <= 2.0;
  rep.verdict = rep.bounded ? "bounded" : "unbounded";
  return rep;
}

}  // namespace ssf
