#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "ssf/random.hpp"
#include "ssf/simd/kernels.hpp"

using namespace ssf;

namespace {

std::vector<double> sample(std::size_t n, std::uint64_t seed, double spread) {
  RandomStream rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = spread * rng.normal();
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels against plain loops") {
  const auto& k = simd::scalar_kernels();
  CHECK(k.isa == simd::Isa::scalar);
  const std::vector<double> a{1, -2, 3};
  const std::vector<double> b{4, 5, -6};
  CHECK(k.dot(a.data(), b.data(), 3) == -24.0);
  CHECK(k.abs_sum(a.data(), 3) == 6.0);
  const std::vector<double> z{3, 4, 0, -2};
  CHECK(k.complex_abs_sum(z.data(), 2) == 7.0);
  const std::vector<double> w{0.5, 1.0, 0.25};
  CHECK(k.weighted_count_above(a.data(), w.data(), 3, 0.0) == 0.75);
  CHECK(k.weighted_count_above(a.data(), w.data(), 3, 1.0) == 0.25);  // strict
  std::vector<double> out(3);
  k.h_alpha(a.data(), 2.0, out.data(), 3);
  CHECK(out[0] == doctest::Approx(1.0 / std::sqrt(5.0)));
  k.h_alpha_derivative(a.data(), 2.0, out.data(), 3);
  CHECK(out[1] == doctest::Approx(4.0 / std::pow(8.0, 1.5)));
  CHECK(k.dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("active kernel selection") {
  const auto& act = simd::active_kernels();
  const char* pin = std::getenv("SSF_SIMD");
  if (pin && std::string(pin) == "scalar") CHECK(act.isa == simd::Isa::scalar);
  if (!simd::avx2_kernels()) CHECK(act.isa == simd::Isa::scalar);
  CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
  CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const auto* v = simd::avx2_kernels();
  if (v == nullptr) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  const auto& s = simd::scalar_kernels();
  CHECK(v->isa == simd::Isa::avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 63u, 64u, 1000u, 4099u}) {
    CAPTURE(n);
    for (double spread : {1e-3, 1.0, 1e6}) {
      const auto x = sample(n, 11 + n, spread);
      const auto y = sample(n, 97 + n, 1.0);
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = std::fabs(y[i]);
      const auto zc = sample(2 * n, 5 + n, spread);

      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::fabs(x[i] * y[i]);
      CHECK(std::fabs(v->dot(x.data(), y.data(), n) - s.dot(x.data(), y.data(), n)) <= 1e-13 * mag);

      const double as = s.abs_sum(x.data(), n);
      CHECK(std::fabs(v->abs_sum(x.data(), n) - as) <= 1e-13 * as);

      const double cs = s.complex_abs_sum(zc.data(), n);
      CHECK(std::fabs(v->complex_abs_sum(zc.data(), n) - cs) <= 1e-13 * cs);

      double wsum = 0.0;
      for (double q : w) wsum += q;
      for (double t : {-spread, 0.0, 0.5 * spread}) {
        CHECK(std::fabs(v->weighted_count_above(x.data(), w.data(), n, t) -
                        s.weighted_count_above(x.data(), w.data(), n, t)) <= 1e-13 * wsum);
      }

      for (double alpha : {1e-3, 1.0, 7.5}) {
        std::vector<double> o1(n), o2(n);
        s.h_alpha(x.data(), alpha, o1.data(), n);
        v->h_alpha(x.data(), alpha, o2.data(), n);
        CHECK(bit_equal(o1, o2));
        s.h_alpha_derivative(x.data(), alpha, o1.data(), n);
        v->h_alpha_derivative(x.data(), alpha, o2.data(), n);
        CHECK(bit_equal(o1, o2));
      }
    }
  }
}

TEST_CASE("AVX2 kernels on special values") {
  const auto* v = simd::avx2_kernels();
  if (v == nullptr) return;
  const auto& s = simd::scalar_kernels();
  const std::vector<double> x{0.0, -0.0, 1e-300, -1e300, 5e-324, 1e154, -3.0, 2.0, 0.5};
  const std::size_t n = x.size();
  std::vector<double> o1(n), o2(n);
  s.h_alpha(x.data(), 1.0, o1.data(), n);
  v->h_alpha(x.data(), 1.0, o2.data(), n);
  CHECK(bit_equal(o1, o2));
  s.h_alpha_derivative(x.data(), 1.0, o1.data(), n);
  v->h_alpha_derivative(x.data(), 1.0, o2.data(), n);
  CHECK(bit_equal(o1, o2));
  const std::vector<double> w(n, 1.0);
  CHECK(v->weighted_count_above(x.data(), w.data(), n, 0.0) == s.weighted_count_above(x.data(), w.data(), n, 0.0));
}
