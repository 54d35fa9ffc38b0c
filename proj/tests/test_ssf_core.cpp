#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ssf/random.hpp"
#include "ssf/shift.hpp"
#include "ssf/spectral.hpp"
#include "ssf/verify.hpp"

using namespace ssf;
using testing::dense;
using testing::diag;

namespace {

// n_A − n_B evaluated pointwise from eigenvalue lists, independent of the step-function machinery
double counting_difference(const HermitianOperator& a, const HermitianOperator& b, double t) {
  double s = 0.0;
  for (const auto& blk : spectral_decompose(a).weighted_spectrum()) s += blk.value > t ? blk.weight : 0.0;
  for (const auto& blk : spectral_decompose(b).weighted_spectrum()) s -= blk.value > t ? blk.weight : 0.0;
  return s;
}

TraceAlgebra mixed_algebra() { return TraceAlgebra({Block{6, 1.0}, Block{4, 0.5}}); }

}  // namespace

TEST_CASE("ssf_direct small examples") {
  auto xi = ssf_direct(diag({1, 0}), diag({0, 0})).xi;
  CHECK(xi.breakpoints() == std::vector<double>{0.0, 1.0});
  CHECK(xi.values() == std::vector<double>{0.0, 1.0, 0.0});

  xi = ssf_direct(diag({2}), diag({2})).xi;
  CHECK(xi.is_zero());

  xi = ssf_direct(diag({1}, 0.5), diag({-1}, 0.5)).xi;
  CHECK(xi(0.0) == 0.5);
  CHECK(xi.integral() == doctest::Approx(1.0));

  CHECK_THROWS_AS(ssf_direct(diag({1}), diag({1, 2})), std::invalid_argument);
}

TEST_CASE("ssf_direct matches pointwise counting on random pairs") {
  const auto alg = mixed_algebra();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = random_hermitian(alg, seed);
    const auto b = random_hermitian(alg, seed + 50);
    const auto xi = ssf_direct(a, b).xi;
    for (int i = 0; i <= 300; ++i) {
      const double t = -5.0 + 10.0 * i / 300.0 + 1e-7;
      CHECK(xi(t) == doctest::Approx(counting_difference(a, b, t)));
    }
  }
}

TEST_CASE("ssf_direct antisymmetry and translation covariance") {
  const auto alg = mixed_algebra();
  const auto a = random_hermitian(alg, 3);
  const auto b = a - random_positive(alg, 2, 4);
  const auto xab = ssf_direct(a, b).xi;
  const auto xba = ssf_direct(b, a).xi;
  CHECK(xba.breakpoints() == xab.breakpoints());
  for (std::size_t i = 0; i < xab.values().size(); ++i) CHECK(xba.values()[i] == -xab.values()[i]);

  const double c = 2.75;
  const auto shifted = ssf_direct(a.shifted(c), b.shifted(c)).xi;
  REQUIRE(shifted.breakpoints().size() == xab.breakpoints().size());
  for (std::size_t i = 0; i < xab.breakpoints().size(); ++i) {
    CHECK(shifted.breakpoints()[i] == doctest::Approx(xab.breakpoints()[i] + c).epsilon(1e-12));
  }
  CHECK(shifted.values() == xab.values());
}

TEST_CASE("bounds report") {
  auto r = ssf_bounds_report(ssf_direct(diag({1, 0}), diag({0, 0})).xi, diag({1, 0}), diag({0, 0}));
  CHECK(r.ordered);
  CHECK(r.pass());

  const auto a = diag({1, -1});
  const auto b = diag({-1, 1});
  r = ssf_bounds_report(ssf_direct(a, b).xi, a, b);
  CHECK_FALSE(r.ordered);
  CHECK(r.pass());

  // a wrong ξ is caught
  r = ssf_bounds_report(StepFunction({0.0, 1.0}, {0.0, 3.0, 0.0}), diag({1, 0}), diag({0, 0}));
  CHECK_FALSE(r.pass());

  const auto alg = mixed_algebra();
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto x = random_hermitian(alg, seed);
    const auto y = seed % 2 ? random_hermitian(alg, seed + 1) : x - random_positive(alg, 3, seed + 1);
    const auto rep = ssf_bounds_report(ssf_direct(x, y).xi, x, y);
    CHECK(rep.ordered == (seed % 2 == 0));
    CHECK(rep.pass());
  }
}

TEST_CASE("compression route with the identity projection is exact") {
  const auto alg = TraceAlgebra::single(6);
  const auto b = random_positive(alg, 6, 21, 3.0);
  const auto a = b + random_positive(alg, 2, 22);
  const auto res = ssf_via_compressions(a, b, {coordinate_projection(alg, {3}), HermitianOperator::identity(alg)}, 4);
  REQUIRE(res.steps.size() == 2);
  const auto direct = ssf_direct(a, b).xi;
  CHECK(same_shift(res.steps.back().xi.xi, direct, pair_diameter(a, b)));
  CHECK(res.steps.back().commutator_a == 0.0);
  for (const auto& row : res.moments) {
    if (row.step != 1) continue;
    CHECK(row.defect_a == 0.0);
    CHECK(row.defect_b == 0.0);
    CHECK(row.moment == doctest::Approx(row.target).epsilon(1e-10));
  }
}

TEST_CASE("compression route on commuting diagonal pairs has no defects") {
  const auto alg = TraceAlgebra::single(5);
  const auto a = HermitianOperator::diagonal(alg, {5, 4, 3, 2, 1});
  const auto b = HermitianOperator::diagonal(alg, {4, 4, 2, 2, 0.5});
  const auto res = ssf_via_compressions(a, b, {coordinate_projection(alg, {2}), coordinate_projection(alg, {4})}, 5);
  for (const auto& s : res.steps) CHECK(s.commutator_a == 0.0);
  for (const auto& row : res.moments) {
    CHECK(row.defect_a == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(row.bound_a == 0.0);
  }
  CHECK_THROWS_AS(ssf_via_compressions(b, a, {coordinate_projection(alg, {2})}), std::domain_error);
  CHECK_THROWS_AS(ssf_via_compressions(a, b, {coordinate_projection(alg, {4}), coordinate_projection(alg, {2})}),
                  std::domain_error);
}

TEST_CASE("compression defects stay under the commutator bound on an arrowhead") {
  const auto alg = TraceAlgebra::single(16);
  const auto b = random_arrowhead(alg, 31, 0.1);
  const auto a = b + random_positive(alg, 2, 32, 1.0, 8);
  std::vector<HermitianOperator> ps;
  for (std::size_t n : {4u, 8u, 12u, 16u}) ps.push_back(coordinate_projection(alg, {n}));
  const auto res = ssf_via_compressions(a, b, ps, 3);
  for (const auto& row : res.moments) {
    CHECK(row.defect_a <= row.bound_a + 1e-9 * (1.0 + row.bound_a));
    CHECK(row.defect_b <= row.bound_b + 1e-9 * (1.0 + row.bound_b));
    // independent recomputation of the defect
    const auto d = compression_defect(a, ps[row.step], row.m);
    CHECK(d.defect == doctest::Approx(row.defect_a).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("monotone split") {
  const auto a = diag({1, -1});
  const auto b = diag({0, 0});
  const auto s = ssf_monotone_split(a, b);
  CHECK(s.c_dominates);
  CHECK(s.parts_nonnegative);
  CHECK(s.identity_holds);
  CHECK(s.c.block(0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(s.c.block(0)(1, 1).real() == doctest::Approx(0.0).scale(1.0));
  CHECK(s.xi_ab.xi.breakpoints() == s.direct.xi.breakpoints());
  CHECK(s.xi_ab.xi.values() == s.direct.xi.values());

  const auto alg = mixed_algebra();
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto x = random_hermitian(alg, seed);
    const auto y = random_hermitian(alg, seed + 7);
    const auto m = ssf_monotone_split(x, y);
    CHECK(m.c_dominates);
    CHECK(m.parts_nonnegative);
    CHECK(m.identity_holds);
  }
}

TEST_CASE("truncation sequence") {
  const auto alg = TraceAlgebra::single(12);
  const auto b = random_hermitian(alg, 41);
  const auto v = random_positive(alg, 6, 42, 4.0);
  const auto a = b + v;
  const double v1 = schatten_norm(v, 1.0);
  const auto rows = ssf_truncation_sequence(a, b, {0, 1, 2, 3, 4, 5, 6, 12});
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].d_error == doctest::Approx(v1));
  CHECK(rows[0].xi_error == doctest::Approx(v1));
  CHECK(rows[0].xi_norm == 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].d_error <= rows[i - 1].d_error + 1e-12);
    CHECK(rows[i].xi_error <= rows[i].d_error + 1e-9 * v1);
    CHECK(rows[i].xi_norm == doctest::Approx(rows[i].d_norm).epsilon(1e-9));
  }
  CHECK(rows[6].d_error <= 1e-9 * v1);
  CHECK(rows[6].xi_error <= 1e-9 * v1);
  CHECK(rows[7].xi_error <= 1e-9 * v1);
  CHECK_THROWS_AS(ssf_truncation_sequence(b, a, {1}), std::domain_error);
}

TEST_CASE("ssf_via_h reproduces the direct shift") {
  const auto a = diag({2, 0});
  const auto b = diag({1, -1});
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto r = ssf_via_h(a, b, BijectionH::h_alpha(alpha));
    const auto direct = ssf_direct(a, b).xi;
    CHECK(route_deviation(r.xi.xi, direct) <= 1e-8 * pair_diameter(a, b));
    // ξ of (h(A), h(B)) is ξ pushed forward through h
    CHECK(r.transformed.breakpoints().front() == doctest::Approx(BijectionH::h_alpha(alpha)(-1.0)));
  }
}

TEST_CASE("ssf_via_h on a wide spectrum") {
  const auto a = diag({1e6, 1, -1e6});
  const auto b = a - diag({0, 0.5, 0});
  const auto r = ssf_via_h(a, b, BijectionH::h_alpha(1.0));
  CHECK(r.xi.xi.breakpoints().size() == 2);
  CHECK(r.xi.xi.breakpoints()[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.xi.xi.breakpoints()[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.xi.xi(0.75) == 1.0);
  CHECK(r.xi.xi.integral() == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("routes agree on 50 seeded pairs") {
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    RandomStream rng(seed);
    const std::size_t n1 = static_cast<std::size_t>(rng.integer(2, 8));
    const std::size_t n2 = static_cast<std::size_t>(rng.integer(2, 5));
    const TraceAlgebra alg({Block{n1, 1.0}, Block{n2, 1.0 / 3.0}});
    const auto a = random_hermitian(alg, seed);
    const auto b = a - random_hermitian(alg, seed + 1000, 0.3);
    const auto direct = ssf_direct(a, b).xi;
    const double diam = pair_diameter(a, b);
    const auto split = ssf_monotone_split(a, b);
    CHECK(same_shift(split.xi_ab.xi, direct, diam));
    for (double alpha : {0.5, 2.0}) {
      CHECK(route_deviation(ssf_via_h(a, b, BijectionH::h_alpha(alpha)).xi.xi, direct) <= 1e-8 * diam);
    }
  }
}

TEST_CASE("pair hash and route deviation") {
  const auto a = diag({1, 2});
  const auto b = diag({1, 3});
  CHECK(pair_hash(a, b).size() == 64);
  CHECK(pair_hash(a, b) == pair_hash(diag({1, 2}), diag({1, 3})));
  CHECK(pair_hash(a, b) != pair_hash(b, a));
  const StepFunction x({0.0, 1.0}, {0, 1, 0});
  const StepFunction y({0.0, 1.0 + 1e-10}, {0, 1, 0});
  const StepFunction z({0.0, 1.0}, {0, 2, 0});
  CHECK(route_deviation(x, y) == doctest::Approx(1e-10).epsilon(1e-3));
  CHECK(std::isinf(route_deviation(x, z)));
  CHECK(same_shift(x, y, 1.0));
  CHECK_FALSE(same_shift(x, z, 1.0));
  // weights summed in another order differ in the last ulp, possibly with a spurious split
  const StepFunction third({0.0, 1.0}, {0, 1.0 / 3.0, 0});
  const StepFunction resummed({0.0, 0.5, 1.0}, {0, (0.1 + 0.2) / 0.9, 1.0 / 3.0, 0});
  CHECK(route_deviation(third, resummed) == 0.0);
  CHECK(same_shift(third, resummed, 1.0));
}
