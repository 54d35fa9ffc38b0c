#include "ssf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "ssf/bijection.hpp"
#include "ssf/shift.hpp"
#include "ssf/simd/kernels.hpp"
#include "ssf/spectral.hpp"

namespace ssf {

VerificationReport make_report(std::string name, std::string anchor, double left, double right, double tolerance,
                               CheckKind kind, nlohmann::json metadata) {
  const bool pass =
      kind == CheckKind::equality ? std::fabs(left - right) <= tolerance : left <= right + tolerance;
  return {std::move(name), std::move(anchor), left, right, tolerance, kind, pass, std::move(metadata)};
}

double trace_diff_direct(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f) {
  require_same_algebra(a, b, "trace_diff_direct");
  auto fv = [&f](double x) { return f.value(x); };
  return spectral_decompose(a).trace_of(fv) - spectral_decompose(b).trace_of(fv);
}

double trace_formula_rhs(const W1Function& f, const StepFunction& xi) {
  return xi.integrate_derivative([&f](double t) { return f.value(t); });
}

std::vector<BirmanSolomyakResult> birman_solomyak(const HermitianOperator& a, const HermitianOperator& b,
                                                  std::span<const W1Function> fs, const QuadratureSpec& q) {
  require_same_algebra(a, b, "birman_solomyak");
  const HermitianOperator v = a - b;
  const std::size_t m = fs.size();
  auto integrand = [&](double z) {
    const auto s = spectral_decompose(a.scaled(1.0 - z) + b.scaled(z));
    std::vector<double> out(m, 0.0);
    for (std::size_t k = 0; k < s.blocks().size(); ++k) {
      const auto& blk = s.blocks()[k];
      // diagonal of U*VU
      const Eigen::VectorXd d = (blk.eigenvectors.adjoint() * v.block(k) * blk.eigenvectors).diagonal().real();
      Eigen::VectorXd df(d.size());
      for (std::size_t j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < d.size(); ++i) df(i) = fs[j].derivative(blk.eigenvalues(i));
        const auto n = static_cast<std::size_t>(d.size());
        out[j] += blk.weight * simd::dot({df.data(), n}, {d.data(), n});
      }
    }
    return out;
  };
  const auto r = integrate_unit_interval(integrand, m, q);
  std::vector<BirmanSolomyakResult> out;
  for (std::size_t j = 0; j < m; ++j) out.push_back({r.values[j], r.error, r.evaluations, r.rule});
  return out;
}

BirmanSolomyakResult birman_solomyak(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f,
                                     const QuadratureSpec& q) {
  return birman_solomyak(a, b, std::span<const W1Function>(&f, 1), q).front();
}

namespace {

double pairing_on_grid(const W1Function& f, const StepFunction& xi, double L, std::size_t n) {
  const double dt = 2.0 * L / static_cast<double>(n);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = f.derivative(-L + static_cast<double>(j) * dt);
  g[0] = 0.5 * (g[0] + f.derivative(L));
  const auto G = detail::real_forward(g);

  // intervals of ξ with their values
  std::vector<double> lo, hi, val;
  const auto& bp = xi.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double v = xi.values()[i + 1];
    if (v == 0.0) continue;
    lo.push_back(bp[i]);
    hi.push_back(bp[i + 1]);
    val.push_back(v);
  }
  const std::size_t half = n / 2;
  // J_k = Σ v ∫_l^r e^{−i s_k t} dt = 2π F(ξ)(s_k), s_k = πk/L
  auto J = [&](std::size_t k) -> std::complex<double> {
    if (k == 0) return {xi.integral(), 0.0};
    const double s = std::numbers::pi * static_cast<double>(k) / L;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < val.size(); ++i) {
      acc += val[i] * (std::polar(1.0, -s * lo[i]) - std::polar(1.0, -s * hi[i]));
    }
    return acc / std::complex<double>(0.0, s);
  };
  // the phase e^{i s_k L} = (−1)^k moves the DFT origin from −L to 0
  double total = G[0].real() * xi.integral();
  for (std::size_t k = 1; k <= half; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double term = (sign * G[k] * std::conj(J(k))).real();
    total += (k == half ? 1.0 : 2.0) * term;
  }
  return total / static_cast<double>(n);
}

}  // namespace

PlancherelResult plancherel_pairing(const W1Function& f, const StepFunction& xi, const SeminormGrid& grid) {
  const std::size_t n = grid.points;
  if (n < 1024 || (n & (n - 1)) != 0) {
    throw std::domain_error("plancherel_pairing: grid points must be a power of two >= 1024");
  }
  if (!xi.compactly_supported()) throw std::domain_error("plancherel_pairing: ξ is not compactly supported");
  const double L = grid.half_width;
  if (const auto supp = xi.support()) {
    if (!(supp->first > -L && supp->second < L)) {
      std::ostringstream os;
      os << "plancherel_pairing: supp ξ = [" << supp->first << ", " << supp->second << "] is not inside (-" << L
         << ", " << L << ")";
      throw std::domain_error(os.str());
    }
  } else {
    return {0.0, 0.0, grid};
  }
  const double fine = pairing_on_grid(f, xi, L, n);
  const double coarse = pairing_on_grid(f, xi, L, n / 2);
  return {fine, std::fabs(fine - coarse), grid};
}

VerificationReport widom_check(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f,
                               const SeminormResult& seminorm) {
  require_same_algebra(a, b, "widom_check");
  auto fv = [&f](double x) { return f.value(x); };
  const double left = schatten_norm(spectral_decompose(a).apply(fv) - spectral_decompose(b).apply(fv), 1.0);
  const double v1 = schatten_norm(a - b, 1.0);
  const double right = seminorm.value * v1;
  nlohmann::json meta = {{"function", f.label()},
                         {"seminorm", seminorm.value},
                         {"seminorm_grid_estimate", seminorm.grid_estimate},
                         {"seminorm_exact", seminorm.exact.has_value()},
                         {"v_trace_norm", v1},
                         {"observed_ratio", v1 > 0.0 ? left / v1 : 0.0},
                         {"observed_constant", right > 0.0 ? left / right : 0.0}};
  return make_report("widom", "||f(A)-f(B)||_1 <= ||f||_W1 ||A-B||_1", left, right, 1e-9 * right,
                     CheckKind::inequality, std::move(meta));
}

VerificationReport widom_check(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f) {
  return widom_check(a, b, f, w1_seminorm(f));
}

std::vector<VerificationReport> exp_diff_check(const HermitianOperator& a, const HermitianOperator& b,
                                               std::span<const double> s_values) {
  require_same_algebra(a, b, "exp_diff_check");
  const auto sa = spectral_decompose(a);
  const auto sb = spectral_decompose(b);
  const double v1 = schatten_norm(a - b, 1.0);
  auto unitary = [](const SpectralDecomposition& s, double t) {
    std::vector<Matrix> blocks;
    for (const auto& blk : s.blocks()) {
      Eigen::VectorXcd ph(blk.eigenvalues.size());
      for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, t * blk.eigenvalues(i));
      blocks.push_back(blk.eigenvectors * ph.asDiagonal() * blk.eigenvectors.adjoint());
    }
    return BlockMatrix(s.algebra(), std::move(blocks));
  };
  std::vector<VerificationReport> out;
  for (double s : s_values) {
    const double left = (unitary(sa, s) - unitary(sb, s)).trace_norm();
    const double right = std::fabs(s) * v1;
    const double tol = 1e-9 * right + 1e-12 * a.algebra().total_trace();
    out.push_back(make_report("exp_diff", "||exp(isA)-exp(isB)||_1 <= |s| ||A-B||_1", left, right, tol,
                              CheckKind::inequality, {{"s", s}}));
  }
  return out;
}

CompressionDefect compression_defect(const HermitianOperator& a, const HermitianOperator& p, int m) {
  if (m < 1) throw std::domain_error("compression_defect: m must be >= 1");
  require_same_algebra(a, p, "compression_defect");
  const auto sa = spectral_decompose(a);
  const auto pap = a.compressed_by(p);
  const double lhs = trace_power(pap, m, &p);
  const double rhs = trace_power(a, m, &p);
  const double c = commutator_hs_norm(a, p);
  const double bound = 0.5 * m * (m - 1) * c * c * std::pow(sa.norm_inf(), m - 2);
  const double defect = std::fabs(lhs - rhs);
  return {defect, bound, defect <= bound + 1e-9 * (1.0 + bound)};
}

VerificationReport commutator_identity_check(const HermitianOperator& c, const HermitianOperator& p) {
  require_same_algebra(c, p, "commutator_identity_check");
  const BlockMatrix k = commutator(c, p);
  const double hs = k.hs_norm();
  const double v1 = hs * hs;
  const double v2 = -(k * k).trace().real();
  const auto supp = support_projection(c);
  const HermitianOperator ap = p.compressed_by(supp.projection);
  const BlockMatrix apc(ap * c);
  const double v3 = 2.0 * (apc * c.matrix()).trace().real() - 2.0 * (apc * apc).trace().real();
  const double diff = std::max({std::fabs(v1 - v2), std::fabs(v1 - v3), std::fabs(v2 - v3)});
  const double cn = schatten_norm(c, kInfinity);
  const double tol = 1e-10 * (1.0 + cn * cn * supp.trace);
  return make_report("commutator_identity", "||[C,p]||_2^2 = -tau([C,p]^2) = 2tau(A_p C^2) - 2tau((A_p C)^2)",
                     diff, 0.0, tol, CheckKind::equality,
                     {{"hs_squared", v1}, {"minus_trace_square", v2}, {"support_form", v3}});
}

PositivityWindowReport positivity_window_check(const StepFunction& xi, double a, double b,
                                               std::span<const double> alphas, bool ordered) {
  PositivityWindowReport rep{ordered, {alphas.begin(), alphas.end()}, {}, xi.integral_over(a, b), 0.0, true, true};
  if (!ordered) return rep;
  const double sup = xi.linf_norm();
  double smallest = kInfinity;
  for (double al : alphas) {
    const auto h = BijectionH::h_window(a, b, al);
    const double v = xi.integrate_derivative([&h](double t) { return h.value(t); });
    rep.values.push_back(v);
    if (v < -1e-9) rep.nonnegative = false;
    if (std::fabs(v - rep.window_integral) > 2.0 * al * sup + 1e-9) rep.converges = false;
    if (al < smallest) {
      smallest = al;
      rep.limit_estimate = v;
    }
  }
  return rep;
}

namespace {

const SeminormResult& h1_seminorm() {
  static const SeminormResult r = w1_seminorm(W1Function::h_alpha_profile(1.0));
  return r;
}

}  // namespace

ScalingReport integrability_scaling_check(const StepFunction& xi, double v_trace_norm, double v_trace,
                                          std::span<const double> alphas) {
  const auto& sn = h1_seminorm();
  ScalingReport rep{{alphas.begin(), alphas.end()}, {}, sn.value * v_trace_norm, sn.grid_estimate, v_trace, 0.0,
                    true, false, false};
  if (const auto supp = xi.support()) rep.reach = std::max(std::fabs(supp->first), std::fabs(supp->second));
  double largest = 0.0;
  double at_largest = 0.0;
  for (double al : alphas) {
    if (!(al > 0.0)) throw std::domain_error("integrability_scaling_check: alpha must be > 0");
    // antiderivative of α h_α'(u) = α³/(α² + u²)^{3/2}
    const double v = xi.integrate_derivative([al](double u) { return u / std::sqrt(1.0 + (u / al) * (u / al)); });
    rep.values.push_back(v);
    if (std::fabs(v) > rep.bound + 1e-9 * (1.0 + rep.bound)) rep.bounded = false;
    if (al > largest) {
      largest = al;
      at_largest = v;
    }
  }
  rep.asserted = largest >= 1e3 * rep.reach;
  rep.converged = std::fabs(at_largest - v_trace) <= 1e-6 * (1.0 + std::fabs(v_trace));
  return rep;
}

ScalingReport integrability_scaling_check(const HermitianOperator& a, const HermitianOperator& b,
                                          std::span<const double> alphas) {
  require_same_algebra(a, b, "integrability_scaling_check");
  const auto sv = spectral_decompose(a - b);
  const auto xi = ssf_direct(a, b).xi;
  return integrability_scaling_check(xi, schatten_norm(sv, 1.0), sv.trace_of([](double x) { return x; }), alphas);
}

}  // namespace ssf
