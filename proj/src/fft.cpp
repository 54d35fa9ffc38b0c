#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace ssf::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

template <class T>
std::unique_ptr<T[], FftwFree> alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

}  // namespace

std::vector<std::complex<double>> real_forward(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto in = alloc<double>(n);
  auto out = alloc<fftw_complex>(n / 2 + 1);
  PlanPtr plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("FFTW: could not create r2c plan");
  std::memcpy(in.get(), x.data(), n * sizeof(double));
  fftw_execute(plan.get());
  std::vector<std::complex<double>> res(n / 2 + 1);
  std::memcpy(static_cast<void*>(res.data()), out.get(), res.size() * sizeof(fftw_complex));
  return res;
}

std::vector<double> real_inverse(std::span<const std::complex<double>> spectrum, std::size_t n) {
  if (n == 0) return {};
  if (spectrum.size() != n / 2 + 1) throw std::invalid_argument("real_inverse: spectrum size mismatch");
  auto in = alloc<fftw_complex>(n / 2 + 1);
  auto out = alloc<double>(n);
  PlanPtr plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("FFTW: could not create c2r plan");
  std::memcpy(static_cast<void*>(in.get()), spectrum.data(), spectrum.size() * sizeof(fftw_complex));
  fftw_execute(plan.get());
  std::vector<double> res(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) res[j] = out[j] * inv;
  return res;
}

}  // namespace ssf::detail
