#include "ssf/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ssf/bijection.hpp"
#include "ssf/quadrature.hpp"
#include "ssf/random.hpp"
#include "ssf/shift.hpp"
#include "ssf/spectral.hpp"
#include "ssf/verify.hpp"

namespace ssf {

namespace {

constexpr std::size_t kPairs = 100;
constexpr std::uint64_t kSeedBase = 1000;

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(2) << std::scientific << v;
  return os.str();
}

// Tracks the worst ratio |error| / tolerance over a criterion.
struct Tally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::string first_failure;

  void add(double error, double tol, const std::string& where) {
    ++cases;
    const double ratio = std::isnan(error) ? std::numeric_limits<double>::infinity() : error / tol;
    worst = std::max(worst, ratio);
    if (!(error <= tol)) {
      if (failures++ == 0) first_failure = where + " (error " + sci(error) + ", tol " + sci(tol) + ")";
    }
  }
  void fail(const std::string& where) {
    ++cases;
    if (failures++ == 0) first_failure = where;
  }
  bool ok() const { return failures == 0; }
  std::string summary() const {
    std::string s = std::to_string(cases) + " checks, " + std::to_string(failures) + " failed, worst err/tol " + sci(worst);
    if (!first_failure.empty()) s += "; first failure: " + first_failure;
    return s;
  }
};

const std::vector<SeededPair>& suite_pairs() {
  static const std::vector<SeededPair> pairs = [] {
    std::vector<SeededPair> out;
    for (std::size_t i = 0; i < kPairs; ++i) out.push_back(acceptance_pair(kSeedBase + i));
    return out;
  }();
  return pairs;
}

std::string tag(const SeededPair& p) { return "seed " + std::to_string(p.seed); }

AcceptanceResult ac1() {
  Tally t;
  const auto fs = shipped_functions();
  for (const auto& p : suite_pairs()) {
    const auto xi = ssf_direct(p.a, p.b).xi;
    for (const auto& f : fs) {
      const double lhs = trace_diff_direct(p.a, p.b, f);
      const double rhs = trace_formula_rhs(f, xi);
      t.add(std::fabs(lhs - rhs), 1e-9 * (1.0 + std::fabs(lhs)), tag(p) + ", " + f.label());
    }
  }
  return {"AC1", "trace formula, exact routes: |tr(f(A)-f(B)) - int f' xi| <= 1e-9 (1+|value|)", t.ok(),
          t.summary(), 0.0};
}

AcceptanceResult ac2() {
  Tally t;
  const auto fs = shipped_functions();
  std::size_t fallbacks = 0;
  int max_evals = 0;
  for (const auto& p : suite_pairs()) {
    try {
      const auto bs = birman_solomyak(p.a, p.b, fs, QuadratureSpec{});
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const double direct = trace_diff_direct(p.a, p.b, fs[i]);
        t.add(std::fabs(bs[i].value - direct), 1e-7 * (1.0 + std::fabs(direct)), tag(p) + ", " + fs[i].label());
        if (bs[i].rule != QuadratureRule::gauss_legendre) ++fallbacks;
        max_evals = std::max(max_evals, bs[i].evaluations);
      }
    } catch (const std::exception& e) {
      t.fail(tag(p) + ": " + e.what());
    }
  }
  return {"AC2", "double operator integral route: |BS - direct| <= 1e-7 (1+|value|), 64-node Gauss-Legendre",
          t.ok(),
          t.summary() + "; adaptive fallbacks " + std::to_string(fallbacks) + ", max evaluations " +
              std::to_string(max_evals),
          0.0};
}

// Small pairs rescaled so the joint spectral diameter is at most 8.
std::vector<SeededPair> plancherel_pairs() {
  std::vector<SeededPair> out;
  for (std::uint64_t s = 0; s < 10; ++s) {
    RandomStream rng(5000 + s);
    const auto dim = static_cast<std::size_t>(rng.integer(2, 12));
    const auto alg = TraceAlgebra({Block{dim, 1.0}, Block{static_cast<std::size_t>(rng.integer(2, 8)), 0.5}});
    auto a = random_hermitian(alg, rng.raw(), 1.0);
    auto v = random_positive(alg, static_cast<std::size_t>(rng.integer(1, 3)), rng.raw(), 1.0 + 2.0 * rng.uniform());
    if (s % 2 == 1) v = v - random_positive(alg, 1, rng.raw(), 1.0);
    auto b = a - v;
    const double d = pair_diameter(a, b);
    if (d > 7.5) {
      a = a.scaled(7.5 / d);
      b = b.scaled(7.5 / d);
    }
    out.push_back({a, b, 5000 + s, s % 2 == 0});
  }
  return out;
}

AcceptanceResult ac3() {
  Tally t;
  const auto fs = shipped_functions();
  const SeminormGrid grid{64.0, std::size_t{1} << 14};
  double max_diam = 0.0;
  double max_est = 0.0;
  for (const auto& p : plancherel_pairs()) {
    const double diam = pair_diameter(p.a, p.b);
    max_diam = std::max(max_diam, diam);
    if (diam > 8.0) {
      t.fail(tag(p) + ": diameter " + sci(diam) + " exceeds 8");
      continue;
    }
    const auto xi = ssf_direct(p.a, p.b).xi;
    for (const auto& f : fs) {
      try {
        const auto r = plancherel_pairing(f, xi, grid);
        max_est = std::max(max_est, r.error_estimate);
        t.add(std::fabs(r.value - trace_diff_direct(p.a, p.b, f)), 1e-4, tag(p) + ", " + f.label());
      } catch (const std::exception& e) {
        t.fail(tag(p) + ", " + f.label() + ": " + e.what());
      }
    }
  }
  return {"AC3", "Fourier pairing route: |2 pi int F(f') conj F(xi) - direct| <= 1e-4, N = 2^14, L = 64", t.ok(),
          t.summary() + "; max diameter " + sci(max_diam) + ", max |P_N - P_N/2| " + sci(max_est), 0.0};
}

AcceptanceResult ac4() {
  Tally t;
  std::size_t ordered = 0;
  for (const auto& p : suite_pairs()) {
    const auto v = p.a - p.b;
    const auto xi = ssf_direct(p.a, p.b).xi;
    const double vn = schatten_norm(v, 1.0);
    const double l1 = xi.l1_norm();
    const double integral = xi.integral();
    const double tv = v.trace();
    const double supp = support_projection(v).trace;
    t.add(std::max(0.0, l1 - vn), 1e-9 * vn, tag(p) + ": ||xi||_1 <= ||V||_1");
    t.add(std::fabs(integral - tv), 1e-9 * std::max(std::fabs(tv), vn), tag(p) + ": int xi = tr V");
    t.add(std::max(0.0, xi.linf_norm() - supp), 1e-9, tag(p) + ": ||xi||_inf <= tr supp V");
    if (dominates(p.a, p.b)) {
      ++ordered;
      t.add(std::fabs(l1 - vn), 1e-9 * vn, tag(p) + ": ||xi||_1 = ||V||_1");
      t.add(std::max(0.0, -xi.min_value()), 0.0, tag(p) + ": xi >= 0");
    }
  }
  return {"AC4", "bounds: ||xi||_1 <= ||V||_1 (= when A >= B), int xi = tr V, ||xi||_inf <= tr supp V", t.ok(),
          t.summary() + "; ordered pairs " + std::to_string(ordered), 0.0};
}

AcceptanceResult ac5() {
  Tally t;
  const auto fs = shipped_functions();
  std::vector<SeminormResult> norms;
  for (const auto& f : fs) norms.push_back(w1_seminorm(f));
  const std::vector<double> s_values{-2.0, -0.5, 0.5, 2.0};
  for (std::size_t i = 0; i < 2 * kPairs; ++i) {
    const auto p = i < kPairs ? suite_pairs()[i] : acceptance_pair(kSeedBase + i);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto r = widom_check(p.a, p.b, fs[k], norms[k]);
      t.add(std::max(0.0, r.left - r.right), r.tolerance, tag(p) + ", " + fs[k].label());
    }
    for (const auto& r : exp_diff_check(p.a, p.b, s_values)) {
      t.add(std::max(0.0, r.left - r.right), r.tolerance, tag(p) + ", " + r.name);
    }
  }
  return {"AC5", "Lipschitz bounds on 200 cases: ||f(A)-f(B)||_1 <= ||f||_W1 ||A-B||_1, ||e^{isA}-e^{isB}||_1 <= |s| ||A-B||_1",
          t.ok(), t.summary(), 0.0};
}

AcceptanceResult ac6() {
  Tally t;
  const auto alg = TraceAlgebra::single(32);
  std::vector<HermitianOperator> ps;
  for (std::size_t n : {8, 16, 24, 32}) ps.push_back(coordinate_projection(alg, {n}));
  std::string trend;
  std::size_t monotone = 0;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const bool arrow = s < 3;
    const auto b = arrow ? random_arrowhead(alg, 7000 + s, 0.1) : random_band(alg, 2, 7000 + s, 0.1);
    const auto a = b + random_positive(alg, 2, 7100 + s, 1.0, 24);
    const std::string who = std::string(arrow ? "arrowhead" : "band") + " seed " + std::to_string(7000 + s);
    try {
      const auto res = ssf_via_compressions(a, b, ps, 6);
      const double norm = std::max({1.0, schatten_norm(a, kInfinity), schatten_norm(b, kInfinity)});
      for (const auto& row : res.moments) {
        const std::string where = who + ", n index " + std::to_string(row.step) + ", m " + std::to_string(row.m);
        t.add(std::max(0.0, row.defect_a - row.bound_a), 1e-9 * (1.0 + row.bound_a), where + " (A)");
        t.add(std::max(0.0, row.defect_b - row.bound_b), 1e-9 * (1.0 + row.bound_b), where + " (B)");
        if (row.step + 1 == res.steps.size()) {
          const double scale = std::pow(norm, row.m) * alg.total_trace();
          t.add(std::max(row.defect_a, row.defect_b), 1e-9 * scale, where + " defect at n = 32");
          t.add(std::fabs(row.moment - row.target), 1e-9 * scale, where + " moment at n = 32");
        }
      }
      trend += (trend.empty() ? "" : "; ") + who + ":";
      bool nonincreasing = true;
      for (std::size_t k = 0; k < res.steps.size(); ++k) {
        trend += " " + sci(res.steps[k].commutator_a);
        if (k > 0 && res.steps[k].commutator_a > res.steps[k - 1].commutator_a * (1.0 + 1e-12)) nonincreasing = false;
      }
      monotone += nonincreasing ? 1 : 0;
    } catch (const std::exception& e) {
      t.fail(who + ": " + e.what());
    }
  }
  return {"AC6", "compressions n = 8,16,24,32: moment defects <= m(m-1)/2 ||[A,p]||_2^2 ||A||^(m-2), zero at n = 32",
          t.ok(),
          t.summary() + "; ||[A,p_n]||_2 non-increasing on " + std::to_string(monotone) + "/6 pairs [" + trend + "]",
          0.0};
}

std::vector<SeededPair> wide_pairs() {
  std::vector<SeededPair> out;
  for (std::uint64_t s = 0; s < 10; ++s) {
    RandomStream rng(8000 + s);
    const auto alg = TraceAlgebra({Block{static_cast<std::size_t>(rng.integer(4, 16)), 1.0},
                                   Block{static_cast<std::size_t>(rng.integer(3, 8)), 1.0 / 3.0}});
    const auto a = wide_spectrum(alg, 1e6, rng.raw(), 2, 1.0);
    const auto v = random_positive(alg, static_cast<std::size_t>(rng.integer(1, 3)), rng.raw(),
                                   0.5 + 4.0 * rng.uniform(), 2);
    out.push_back({a, a - v, 8000 + s, true});
  }
  return out;
}

AcceptanceResult ac7() {
  Tally route;
  Tally window;
  Tally scaling;
  const std::vector<double> alphas{0.5, 1.0, 2.0};
  const std::vector<double> window_alphas{1.0, 0.1, 0.01, 0.001};
  const std::vector<double> scale_alphas{1.0, 1e2, 1e4, 1e8, 1e12};
  auto pairs = suite_pairs();
  const auto wide = wide_pairs();
  pairs.insert(pairs.end(), wide.begin(), wide.end());
  double max_norm = 0.0;
  for (const auto& p : pairs) {
    const auto direct = ssf_direct(p.a, p.b);
    const double diam = pair_diameter(p.a, p.b);
    max_norm = std::max(max_norm, schatten_norm(p.a, kInfinity));
    for (double alpha : alphas) {
      const std::string where = tag(p) + ", alpha " + sci(alpha);
      try {
        const auto h = ssf_via_h(p.a, p.b, BijectionH::h_alpha(alpha));
        route.add(route_deviation(h.xi.xi, direct.xi), 1e-8 * diam, where);
      } catch (const std::exception& e) {
        route.fail(where + ": " + e.what());
      }
    }
    const auto& xi = direct.xi;
    const auto supp = xi.support();
    if (dominates(p.a, p.b) && supp) {
      const double mid = 0.5 * (supp->first + supp->second);
      const std::pair<double, double> windows[] = {{supp->first, mid}, {mid, supp->second}, {supp->first, supp->second},
                                                   {mid - 0.25, mid + 0.25}};
      for (const auto& [wa, wb] : windows) {
        const auto r = positivity_window_check(xi, wa, wb, window_alphas, true);
        const double worst = *std::min_element(r.values.begin(), r.values.end());
        window.add(std::max(0.0, -worst), 1e-9, tag(p) + " window >= 0");
        if (!r.converges) window.fail(tag(p) + ": window values do not approach int_a^b xi");
      }
    }
    const auto v = p.a - p.b;
    const auto s = integrability_scaling_check(xi, schatten_norm(v, 1.0), v.trace(), scale_alphas);
    if (!s.bounded) scaling.fail(tag(p) + ": scaled values exceed ||h_1||_W1 ||V||_1");
    if (!s.asserted) {
      scaling.fail(tag(p) + ": largest alpha below 1e3 * reach");
    } else {
      scaling.add(std::fabs(s.values.back() - s.target), 1e-6 * (1.0 + std::fabs(s.target)), tag(p) + " scaling limit");
    }
  }
  const bool ok = route.ok() && window.ok() && scaling.ok();
  return {"AC7", "h-route invariance for alpha in {0.5,1,2} incl. ||A|| = 1e6, window positivity, alpha-scaling -> tr V",
          ok,
          "route: " + route.summary() + " | windows: " + window.summary() + " | scaling: " + scaling.summary() +
              "; max ||A||_inf " + sci(max_norm),
          0.0};
}

AcceptanceResult ac8() {
  Tally t;
  std::size_t used = 0;
  for (const auto& p : suite_pairs()) {
    if (!p.ordered) continue;
    ++used;
    const auto v = p.a - p.b;
    const double vn = schatten_norm(v, 1.0);
    const auto sv = spectral_decompose(v);
    std::size_t rank = 0;
    for (const auto& blk : sv.blocks()) {
      for (Eigen::Index i = 0; i < blk.eigenvalues.size(); ++i) {
        rank += blk.eigenvalues(i) > tolerance::rank * sv.norm_inf() ? 1 : 0;
      }
    }
    std::vector<std::size_t> ranks;
    for (std::size_t r = 0; r <= rank; ++r) ranks.push_back(r);
    try {
      const auto rows = ssf_truncation_sequence(p.a, p.b, ranks);
      for (const auto& row : rows) {
        const std::string where = tag(p) + ", rank " + std::to_string(row.rank);
        t.add(std::max(0.0, row.xi_error - row.d_error), 1e-9 * vn, where + ": error bound");
        t.add(std::fabs(row.xi_norm - row.d_norm), 1e-9 * row.d_norm, where + ": ||xi||_1 = ||D||_1");
      }
      t.add(rows.back().xi_error, 1e-9 * vn, tag(p) + ": xi error at full rank");
      t.add(rows.back().d_error, 1e-9 * vn, tag(p) + ": ||D - V||_1 at full rank");
    } catch (const std::exception& e) {
      t.fail(tag(p) + ": " + e.what());
    }
  }
  return {"AC8", "truncation: ||xi_{B+D_r,B} - xi_{A,B}||_1 <= ||D_r - V||_1 -> 0, ||xi_{B+D_r,B}||_1 = ||D_r||_1",
          t.ok(), t.summary() + "; ordered pairs " + std::to_string(used), 0.0};
}

}  // namespace

SeededPair acceptance_pair(std::uint64_t seed) {
  RandomStream rng(seed);
  const double scales[] = {1.0, 0.5, 1.0 / 3.0};
  const auto nblocks = rng.integer(1, 3);
  std::vector<Block> blocks;
  std::size_t max_dim = 0;
  for (std::int64_t k = 0; k < nblocks; ++k) {
    const auto dim = static_cast<std::size_t>(rng.integer(2, 40));
    blocks.push_back(Block{dim, scales[rng.integer(0, 2)]});
    max_dim = std::max(max_dim, dim);
  }
  const TraceAlgebra alg(std::move(blocks));
  const auto a = random_hermitian(alg, rng.raw(), 3.0 / std::sqrt(static_cast<double>(max_dim)));
  const double target = 0.5 + 9.5 * rng.uniform();
  const bool ordered = seed % 2 == 0;
  HermitianOperator v = random_positive(alg, static_cast<std::size_t>(rng.integer(1, 4)), rng.raw(), 1.0);
  if (!ordered) v = v - random_positive(alg, static_cast<std::size_t>(rng.integer(1, 4)), rng.raw(), 0.3 + rng.uniform());
  v = v.scaled(target / schatten_norm(v, 1.0));
  return {a, a - v, seed, ordered};
}

std::vector<W1Function> shipped_functions() {
  return {W1Function::gaussian_primitive(0.0, 1.0), W1Function::gaussian_primitive(1.5, 0.5, 2.0),
          W1Function::h_alpha_profile(1.0), W1Function::h_alpha_profile(3.0),
          W1Function::polynomial_window({0.0, 0.0, 0.0, 1.0}, -15.0, 15.0)};
}

const std::vector<std::string>& acceptance_ids() {
  static const std::vector<std::string> ids{"AC1", "AC2", "AC3", "AC4", "AC5", "AC6", "AC7", "AC8"};
  return ids;
}

std::string format_result(const AcceptanceResult& r) {
  std::ostringstream os;
  os << r.id << (r.pass ? " PASS " : " FAIL ") << r.description << " | " << r.detail << " (" << std::fixed
     << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

std::vector<AcceptanceResult> run_acceptance(const std::vector<std::string>& only, std::ostream* out) {
  const std::vector<std::function<AcceptanceResult()>> all{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8};
  std::vector<AcceptanceResult> results;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& id = acceptance_ids()[i];
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    auto r = all[i]();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (id == "AC1" && r.seconds >= 60.0) {
      r.pass = false;
      r.detail += "; runtime exceeds 60 s";
    }
    if (out) *out << format_result(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace ssf
