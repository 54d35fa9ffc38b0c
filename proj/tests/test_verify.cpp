#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "ssf/quadrature.hpp"
#include "ssf/random.hpp"
#include "ssf/shift.hpp"
#include "ssf/spectral.hpp"
#include "ssf/verify.hpp"

using namespace ssf;
using testing::dense;
using testing::diag;

TEST_CASE("make_report pass rules") {
  CHECK(make_report("x", "a = b", 1.0, 1.0 + 1e-10, 1e-9, CheckKind::equality).pass);
  CHECK_FALSE(make_report("x", "a = b", 1.0, 1.1, 1e-9, CheckKind::equality).pass);
  CHECK(make_report("x", "a <= b", 0.5, 1.0, 0.0, CheckKind::inequality).pass);
  CHECK_FALSE(make_report("x", "a <= b", 2.0, 1.0, 1e-9, CheckKind::inequality).pass);
  CHECK_FALSE(make_report("x", "a = b", std::nan(""), 1.0, 1.0, CheckKind::equality).pass);
}

TEST_CASE("trace_diff_direct against explicit eigenvalues") {
  const auto f = W1Function::gaussian_primitive(0.0, 1.0);
  CHECK(trace_diff_direct(diag({1, 0}), diag({0, 0}), f) == doctest::Approx(f(1.0) - f(0.0)));
  CHECK(trace_diff_direct(diag({2}, 0.5), diag({-1}, 0.5), f) == doctest::Approx(0.5 * (f(2.0) - f(-1.0))));
  // [[0,1],[1,0]] has eigenvalues ±1
  CHECK(trace_diff_direct(dense({{0, 1}, {1, 0}}), diag({0, 0}), f) ==
        doctest::Approx(f(1.0) + f(-1.0) - 2.0 * f(0.0)));
}

TEST_CASE("trace_formula_rhs") {
  const StepFunction xi({-1.0, 0.0, 1.0}, {0.0, -1.0, 1.0, 0.0});
  const auto sq = W1Function::polynomial_window({0, 0, 1}, -3, 3);
  CHECK(trace_formula_rhs(sq, xi) == doctest::Approx(2.0));
  CHECK_THROWS_AS(trace_formula_rhs(sq, StepFunction(1.0)), std::domain_error);

  const auto alg = TraceAlgebra({Block{5, 1.0}, Block{3, 0.5}});
  const auto a = random_hermitian(alg, 8);
  const auto b = random_hermitian(alg, 9);
  const auto xab = ssf_direct(a, b).xi;
  for (const auto& f : {W1Function::gaussian_primitive(0.2, 0.5), W1Function::h_alpha_profile(2.0), sq}) {
    const double lhs = trace_diff_direct(a, b, f);
    CHECK(std::fabs(trace_formula_rhs(f, xab) - lhs) <= 1e-9 * (1.0 + std::fabs(lhs)));
  }
}

TEST_CASE("birman_solomyak") {
  const auto id = W1Function::polynomial_window({0, 1}, -5, 5);
  CHECK(birman_solomyak(diag({1}), diag({0}), id).value == doctest::Approx(1.0).epsilon(1e-12));

  const auto alg = TraceAlgebra::single(8);
  const auto a = random_hermitian(alg, 61);
  const auto b = random_hermitian(alg, 62);
  const std::vector<W1Function> fs{W1Function::gaussian_primitive(0.0, 1.0), W1Function::h_alpha_profile(1.0),
                                   W1Function::polynomial_window({0, 0, 0, 1}, -4, 4)};
  const auto batch = birman_solomyak(a, b, fs);
  REQUIRE(batch.size() == fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double ref = trace_diff_direct(a, b, fs[i]);
    CHECK(std::fabs(batch[i].value - ref) <= 1e-8 * (1.0 + std::fabs(ref)));
    CHECK(batch[i].value == doctest::Approx(birman_solomyak(a, b, fs[i]).value).epsilon(1e-8));
  }
}

TEST_CASE("plancherel pairing") {
  const StepFunction xi({0.0, 1.0}, {0.0, 1.0, 0.0});
  const auto f = W1Function::gaussian_primitive(0.5, 0.2);
  const auto r = plancherel_pairing(f, xi, {64.0, 1 << 14});
  CHECK(std::fabs(r.value - (f(1.0) - f(0.0))) <= 1e-4);
  CHECK(r.error_estimate < 1e-6);

  const auto coarse = plancherel_pairing(f, xi, {64.0, 1 << 10});
  const auto fine = plancherel_pairing(f, xi, {64.0, 1 << 16});
  CHECK(std::fabs(fine.value - (f(1.0) - f(0.0))) <= std::fabs(coarse.value - (f(1.0) - f(0.0))) + 1e-12);

  CHECK_THROWS_AS(plancherel_pairing(f, StepFunction({0.0, 100.0}, {0, 1, 0}), {64.0, 1 << 14}), std::domain_error);
  CHECK_THROWS_AS(plancherel_pairing(f, xi, {64.0, 1000}), std::domain_error);
}

TEST_CASE("widom and exp_diff") {
  const auto f = W1Function::gaussian_primitive(0.0, 1.0);
  const auto a = diag({std::numbers::pi});
  const auto b = diag({0.0});
  const auto w = widom_check(a, b, f);
  CHECK(w.pass);
  CHECK(w.left == doctest::Approx(f(std::numbers::pi) - f(0.0)));
  CHECK(w.right == doctest::Approx(std::numbers::pi));

  const std::vector<double> s{1.0};
  const auto e = exp_diff_check(a, b, s);
  REQUIRE(e.size() == 1);
  CHECK(e[0].left == doctest::Approx(2.0));
  CHECK(e[0].right == doctest::Approx(std::numbers::pi));
  CHECK(e[0].pass);

  const auto alg = TraceAlgebra({Block{6, 1.0}, Block{3, 0.5}});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = random_hermitian(alg, seed);
    const auto y = random_hermitian(alg, seed + 20);
    for (const auto& g : {f, W1Function::h_alpha_profile(3.0), W1Function::polynomial_window({0, 0, 1}, -2, 2)}) {
      CHECK(widom_check(x, y, g).pass);
    }
    const std::vector<double> ss{-2.0, 0.5};
    for (const auto& r : exp_diff_check(x, y, ss)) CHECK(r.pass);
  }
}

TEST_CASE("compression_defect") {
  const auto d = compression_defect(dense({{0, 1}, {1, 0}}), diag({1, 0}), 2);
  CHECK(d.defect == doctest::Approx(1.0));
  CHECK(d.bound == doctest::Approx(2.0));
  CHECK(d.pass);
  CHECK(compression_defect(dense({{0, 1}, {1, 0}}), diag({1, 0}), 1).defect == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(compression_defect(diag({1}), diag({1}), 0), std::domain_error);
}

TEST_CASE("commutator identity") {
  const auto r = commutator_identity_check(dense({{0, 1}, {1, 0}}), diag({1, 0}));
  CHECK(r.pass);
  CHECK(r.metadata["hs_squared"].get<double>() == doctest::Approx(2.0));
  CHECK(r.metadata["minus_trace_square"].get<double>() == doctest::Approx(2.0));
  CHECK(r.metadata["support_form"].get<double>() == doctest::Approx(2.0));

  const auto alg = TraceAlgebra({Block{7, 1.0}, Block{4, 0.25}});
  const auto c = random_positive(alg, 5, 3, 2.0);
  CHECK(commutator_identity_check(c, coordinate_projection(alg, {3, 2})).pass);
}

TEST_CASE("positivity window") {
  const StepFunction xi({0.0, 1.0}, {0.0, 1.0, 0.0});
  const std::vector<double> alphas{1.0, 0.1, 0.01, 0.001};
  const auto r = positivity_window_check(xi, 0.0, 0.5, alphas);
  CHECK(r.pass());
  CHECK(r.window_integral == doctest::Approx(0.5));
  CHECK(r.limit_estimate == doctest::Approx(0.5).epsilon(1e-2));
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    CHECK(std::fabs(r.values[i] - 0.5) <= std::fabs(r.values[i - 1] - 0.5) + 1e-15);
  }
  CHECK_FALSE(positivity_window_check(xi, 0.0, 0.5, alphas, false).applicable);
}

TEST_CASE("integrability scaling") {
  const std::vector<double> alphas{1.0, 1e2, 1e4};
  const auto r = integrability_scaling_check(diag({1, 0}), diag({0, 0}), alphas);
  CHECK(r.values.back() == doctest::Approx(1e4 / std::sqrt(1e8 + 1.0)).epsilon(1e-12));
  CHECK(r.values.back() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.bounded);
  CHECK(r.asserted);
  CHECK(r.pass());
  const std::vector<double> small{1.0};
  CHECK_FALSE(integrability_scaling_check(diag({1, 0}), diag({0, 0}), small).asserted);
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {2, 5, 16, 64}) {
    const auto g = gauss_legendre(n);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("quadrature fallback and caps") {
  QuadratureSpec q;
  q.nodes = 8;
  q.target = 1e-10;
  const auto kink = [](double z) { return std::vector<double>{std::fabs(z - 1.0 / 3.0)}; };
  const auto r = integrate_unit_interval(kink, 1, q);
  CHECK(r.rule == QuadratureRule::adaptive_simpson);
  CHECK(r.values[0] == doctest::Approx(5.0 / 18.0).epsilon(1e-9));

  const auto smooth = integrate_unit_interval([](double z) { return std::vector<double>{std::exp(z)}; }, 1, {});
  CHECK(smooth.rule == QuadratureRule::gauss_legendre);
  CHECK(smooth.values[0] == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

  const auto cusp = [](double z) { return std::vector<double>{std::sqrt(std::fabs(z - 1.0 / 3.0))}; };
  const auto c = integrate_unit_interval(cusp, 1, q);
  CHECK(c.values[0] == doctest::Approx(2.0 / 3.0 * (std::pow(1.0 / 3.0, 1.5) + std::pow(2.0 / 3.0, 1.5))).epsilon(1e-8));
  q.max_evaluations = 20;
  CHECK_THROWS_AS(integrate_unit_interval(cusp, 1, q), std::runtime_error);
  q.fallback = false;
  q.max_evaluations = 20000;
  CHECK(integrate_unit_interval(kink, 1, q).rule == QuadratureRule::gauss_legendre);

  QuadratureSpec bad;
  bad.nodes = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
