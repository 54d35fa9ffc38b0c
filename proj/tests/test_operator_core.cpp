#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "ssf/random.hpp"
#include "ssf/spectral.hpp"
#include "ssf/step_function.hpp"

using namespace ssf;
using testing::dense;
using testing::diag;

TEST_CASE("algebra rejects empty blocks and bad scales") {
  CHECK_THROWS_AS(TraceAlgebra(std::vector<Block>{}), std::invalid_argument);
  CHECK_THROWS_AS(TraceAlgebra({Block{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TraceAlgebra({Block{2, 0.0}}), std::invalid_argument);
  const TraceAlgebra alg({Block{3, 0.5}, Block{2, 2.0}});
  CHECK(alg.total_trace() == doctest::Approx(5.5));
  CHECK(alg.total_dimension() == 5);
}

TEST_CASE("spectral_decompose small cases") {
  const auto s = spectral_decompose(dense({{0, 1}, {1, 0}}));
  CHECK(s.blocks()[0].eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(s.blocks()[0].eigenvalues(1) == doctest::Approx(1.0));
  const auto t = spectral_decompose(diag({3}));
  CHECK(t.blocks()[0].eigenvalues(0) == 3.0);
  CHECK(std::abs(t.blocks()[0].eigenvectors(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("spectral_decompose reconstructs a seeded 8x8 operator") {
  const auto a = random_hermitian(TraceAlgebra::single(8), 42);
  const auto s = spectral_decompose(a);
  const auto& b = s.blocks()[0];
  const Matrix back = b.eigenvectors * b.eigenvalues.cast<Complex>().asDiagonal() * b.eigenvectors.adjoint();
  const Matrix diff = back - a.block(0);
  CHECK(diff.norm() <= 8e-12 * s.norm_inf());
  const Matrix unit = b.eigenvectors.adjoint() * b.eigenvectors - Matrix::Identity(8, 8);
  CHECK(unit.norm() <= 8e-12);
}

TEST_CASE("pos_neg_parts") {
  auto p = pos_neg_parts(diag({1, -1}));
  CHECK(p.positive.block(0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(p.positive.block(0)(1, 1)) < 1e-15);
  CHECK(p.negative.block(0)(1, 1).real() == doctest::Approx(1.0));

  p = pos_neg_parts(diag({0, 0}));
  CHECK(p.positive.hs_norm() == 0.0);
  CHECK(p.negative.hs_norm() == 0.0);

  p = pos_neg_parts(dense({{0, 1}, {1, 0}}));
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      CHECK(p.positive.block(0)(i, k).real() == doctest::Approx(0.5));
      CHECK(p.negative.block(0)(i, k).real() == doctest::Approx(i == k ? 0.5 : -0.5));
    }
  }
}

TEST_CASE("support_projection weighted traces") {
  CHECK(support_projection(diag({2, 0, -3})).trace == 2.0);
  CHECK(support_projection(diag({0, 0})).trace == 0.0);
  CHECK(support_projection(diag({1}, 0.25)).trace == 0.25);
  // below the rank threshold counts as zero
  CHECK(support_projection(diag({1, 1e-11})).trace == 1.0);
}

TEST_CASE("counting_function") {
  const auto n = counting_function(diag({1, 0}));
  CHECK(n(-5.0) == 2.0);
  CHECK(n(-1e-9) == 2.0);
  CHECK(n(0.0) == 1.0);  // strict inequality: right-continuous
  CHECK(n(0.5) == 1.0);
  CHECK(n(1.0) == 0.0);

  const auto z = counting_function(diag({0, 0, 0}, 0.5));
  CHECK(z.breakpoints() == std::vector<double>{0.0});
  CHECK(z(-1.0) == 1.5);
  CHECK(z(0.0) == 0.0);

  const auto h = counting_function(diag({1}, 0.5));
  CHECK(h(0.5) == 0.5);
}

TEST_CASE("singular_value_function") {
  const auto mu = singular_value_function(diag({3, -1, 2}));
  CHECK(mu(0.0) == 3.0);
  CHECK(mu(0.99) == 3.0);
  CHECK(mu(1.0) == 2.0);
  CHECK(mu(2.5) == 1.0);
  CHECK(mu(3.0) == 0.0);
  CHECK(singular_value_function(diag({0, 0})).is_zero());
  const auto w = singular_value_function(diag({5}, 2.0));
  CHECK(w(1.9) == 5.0);
  CHECK(w(2.0) == 0.0);
}

TEST_CASE("singular_value_function is the generalized inverse of the counting function of |A|") {
  const auto a = random_hermitian(TraceAlgebra({Block{5, 1.0}, Block{3, 0.5}}), 9);
  const auto mu = singular_value_function(a);
  const auto abs_a = spectral_decompose(a).apply([](double x) { return std::fabs(x); });
  const auto n = counting_function(abs_a);
  for (int i = 0; i < 200; ++i) {
    const double t = 6.5 * i / 200.0;
    // brute-force inf{s >= 0 : n(s) <= t} over the candidate points {0} ∪ breakpoints
    double oracle = 0.0;
    if (n(0.0) > t) {
      for (double s : n.breakpoints()) {
        if (s >= 0.0 && n(s) <= t) {
          oracle = s;
          break;
        }
      }
    }
    CHECK(mu(t) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("schatten norms") {
  CHECK(schatten_norm(diag({3, -4}), 1.0) == doctest::Approx(7.0));
  CHECK(schatten_norm(diag({3, -4}), kInfinity) == doctest::Approx(4.0));
  CHECK(schatten_norm(diag({3, -4}), 2.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(schatten_norm(diag({1}), 0.5), std::domain_error);
}

TEST_CASE("positive operators: ||n_A||_1 = tau(A) = ||A||_1") {
  const TraceAlgebra alg({Block{6, 1.0}, Block{4, 1.0 / 3.0}});
  const auto a = random_positive(alg, 3, 5, 2.5);
  const double tr = a.trace();
  CHECK(counting_function(a).integral_over(0.0, kInfinity) == doctest::Approx(tr).epsilon(1e-10));
  CHECK(schatten_norm(a, 1.0) == doctest::Approx(tr).epsilon(1e-10));
}

TEST_CASE("commutator_hs_norm") {
  CHECK(commutator_hs_norm(diag({1, 2}), diag({1, 0})) == 0.0);
  CHECK(commutator_hs_norm(dense({{0, 1}, {1, 0}}), diag({1, 0})) == doctest::Approx(std::numbers::sqrt2));
  const auto alg = TraceAlgebra::single(6);
  const auto a = random_hermitian(alg, 17);
  const auto p = coordinate_projection(alg, {3});
  double oracle = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 3; j < 6; ++j) oracle += 2.0 * std::norm(a.block(0)(i, j));
  }
  CHECK(commutator_hs_norm(a, p) == doctest::Approx(std::sqrt(oracle)).epsilon(1e-12));
}

TEST_CASE("Weyl monotonicity and subadditivity of counting functions") {
  const TraceAlgebra alg({Block{7, 1.0}, Block{5, 0.5}});
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto a = random_hermitian(alg, seed);
    const auto b = a - random_positive(alg, 2, seed + 100, 1.5);
    const auto c = random_hermitian(alg, seed + 200);
    const auto na = counting_function(a);
    const auto nb = counting_function(b);
    const auto nc = counting_function(c);
    const auto nac = counting_function(a + c);
    for (int i = 0; i <= 400; ++i) {
      const double t = -8.0 + 16.0 * i / 400.0;
      CHECK(na(t) >= nb(t));
      for (double s : {-1.0, 0.3, 2.0}) CHECK(nac(s + t) <= na(s) + nc(t) + 1e-12);
    }
  }
}

TEST_CASE("traciality of the weighted trace") {
  const TraceAlgebra alg({Block{4, 1.0}, Block{3, 0.25}});
  RandomStream rng(77);
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) {
    Matrix m(b.dim, b.dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = Complex(rng.normal(), rng.normal());
    }
    blocks.push_back(m);
  }
  const BlockMatrix x(alg, blocks);
  const double l = (x.adjoint() * x).trace().real();
  const double r = (x * x.adjoint()).trace().real();
  CHECK(l == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("operators are stored exactly self-adjoint") {
  Matrix m(2, 2);
  m << Complex(1, 0), Complex(2, 1), Complex(2, -1.0000000001), Complex(0, 0);
  const HermitianOperator a(TraceAlgebra::single(2), {m});
  CHECK(a.block(0)(0, 1) == std::conj(a.block(0)(1, 0)));
  CHECK(a.block(0)(0, 0).imag() == 0.0);
}

TEST_CASE("step function arithmetic, merging and CSV") {
  const StepFunction f({0.0, 1.0}, {0.0, 1.0, 0.0});
  const StepFunction g({-1.0, 0.0}, {0.0, 1.0, 0.0});
  const auto d = subtract(f, g, 1e-12);
  CHECK(d.integral() == doctest::Approx(0.0));
  CHECK(d.l1_norm() == doctest::Approx(2.0));
  CHECK(d.moment(2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(StepFunction({1.0, 0.0}, {0, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction(1.0).integral(), std::domain_error);

  const auto merged = StepFunction::from_sorted_clusters(
      {0.0, 1e-14, 1.0}, [](double t) { return t < 0.5 ? 2.0 : 0.0; }, 0.0, 1e-12);
  CHECK(merged.breakpoints().size() == 2);

  const auto back = StepFunction::from_csv(d.to_csv());
  CHECK(back.breakpoints() == d.breakpoints());
  CHECK(back.values() == d.values());
  CHECK_THROWS_AS(StepFunction::from_csv("x,y\n"), std::invalid_argument);
  CHECK(StepFunction(0.0).to_csv() == "breakpoint,value_right\n-inf,0\n");
}
