#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ssf/algebra.hpp"
#include "ssf/w1_function.hpp"

namespace ssf {

struct AcceptanceResult {
  std::string id;  // "AC1" … "AC8"
  std::string description;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SeededPair {
  HermitianOperator a;
  HermitianOperator b;
  std::uint64_t seed;
  bool ordered;  // V = A − B generated positive
};

/// Block dims 2–40 in 1–3 blocks, scales from {1, 1/2, 1/3}, ‖V‖₁ ∈ [0.5, 10].
/// Even seeds draw a positive V, odd seeds a difference of two positives.
SeededPair acceptance_pair(std::uint64_t seed);

/// gp(0,1), gp(1.5,0.5)·2, h_α profiles for α = 1 and 3, and t³ windowed to [−15, 15].
std::vector<W1Function> shipped_functions();

const std::vector<std::string>& acceptance_ids();

/// Runs the selected criteria (all when `only` is empty), printing one line per
/// criterion to `out` as each finishes.
std::vector<AcceptanceResult> run_acceptance(const std::vector<std::string>& only = {}, std::ostream* out = nullptr);

std::string format_result(const AcceptanceResult& r);

}  // namespace ssf
