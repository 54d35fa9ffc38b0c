#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ssf/algebra.hpp"
#include "ssf/bijection.hpp"
#include "ssf/step_function.hpp"

namespace ssf {

enum class Provenance { direct, compression, monotone_split, h_transform };

std::string_view provenance_name(Provenance p);

/// Compactly supported ξ with τ(f(A) − f(B)) = ∫ f'ξ.
struct ShiftFunction {
  StepFunction xi;
  Provenance provenance = Provenance::direct;
  std::string pair_id;  // SHA-256 of the pair's block data
};

/// Hex SHA-256 over block dimensions, scales and entries of A then B.
std::string pair_hash(const HermitianOperator& a, const HermitianOperator& b);

/// Spectral diameter of spec(A) ∪ spec(B); the scale for breakpoint tolerances.
double pair_diameter(const HermitianOperator& a, const HermitianOperator& b);

/// Step-function equality used for route agreement: same breakpoint count,
/// breakpoints within rel_tol·diameter, values within tolerance::value.
bool same_shift(const StepFunction& x, const StepFunction& y, double diameter, double rel_tol = 1e-8);

/// Largest breakpoint displacement when x and y have the same breakpoint count
/// and values within tolerance::value; +inf otherwise.
double route_deviation(const StepFunction& x, const StepFunction& y);

/// ξ = n_A − n_B. Throws std::invalid_argument on an algebra mismatch.
ShiftFunction ssf_direct(const HermitianOperator& a, const HermitianOperator& b);

struct BoundCheck {
  std::string name;
  double left;
  double right;
  double tolerance;
  bool equality;  // |left − right| <= tol, else left <= right + tol
  bool pass;
};

struct BoundsReport {
  bool ordered;  // A ≥ B within the rank tolerance
  std::vector<BoundCheck> checks;
  bool pass() const;
};

/// ‖ξ‖₁ ≤ ‖V‖₁, ∫ξ = τ(V), ‖ξ‖∞ ≤ τ(supp V) at tolerance 1e-9·(1 + ‖V‖₁);
/// for ordered pairs also ‖ξ‖₁ = ‖V‖₁ and ξ ≥ 0.
BoundsReport ssf_bounds_report(const StepFunction& xi, const HermitianOperator& a, const HermitianOperator& b);

struct CompressionStep {
  double projection_trace;
  ShiftFunction xi;  // ξ of (pAp, pBp) in the compressed algebra
  double commutator_a;
  double commutator_b;
};

struct MomentRow {
  std::size_t step;
  int m;
  double moment;             // ∫ m s^{m−1} ξ_n
  double target;             // τ(Aᵐ − Bᵐ)
  double defect_a;           // |τ((pAp)ᵐ − Aᵐp)|
  double defect_b;
  double bound_a;            // m(m−1)/2 ‖[A,p]‖₂² ‖A‖∞^{m−2}
  double bound_b;
  double tail;               // τ((Aᵐ − Bᵐ)(1 − p))
};

struct CompressionResult {
  std::vector<CompressionStep> steps;
  std::vector<MomentRow> moments;
};

/// Requires A ≥ B ≥ 0 and an increasing list of projections; throws
/// std::domain_error otherwise.
CompressionResult ssf_via_compressions(const HermitianOperator& a, const HermitianOperator& b,
                                       const std::vector<HermitianOperator>& projections, int max_moment = 6);

struct MonotoneSplit {
  HermitianOperator c;  // A + (B − A)₊
  ShiftFunction xi_ca;
  ShiftFunction xi_cb;
  ShiftFunction xi_ab;  // ξ_{C,B} − ξ_{C,A}
  ShiftFunction direct;
  bool c_dominates;
  bool parts_nonnegative;
  bool identity_holds;
};

MonotoneSplit ssf_monotone_split(const HermitianOperator& a, const HermitianOperator& b);

struct TruncationRow {
  std::size_t rank;
  double xi_error;  // ‖ξ_{B+D,B} − ξ_{A,B}‖₁
  double d_error;   // ‖D − V‖₁
  double xi_norm;   // ‖ξ_{B+D,B}‖₁
  double d_norm;    // ‖D‖₁
};

/// D = top-r spectral truncation of V = A − B for each rank. Throws
/// std::domain_error unless A ≥ B.
std::vector<TruncationRow> ssf_truncation_sequence(const HermitianOperator& a, const HermitianOperator& b,
                                                   const std::vector<std::size_t>& ranks);

struct HTransformResult {
  ShiftFunction xi;          // breakpoints pulled back through h⁻¹
  StepFunction transformed;  // ξ of (h(A), h(B))
  std::vector<std::string> warnings;
};

HTransformResult ssf_via_h(const HermitianOperator& a, const HermitianOperator& b, const BijectionH& h);

}  // namespace ssf
