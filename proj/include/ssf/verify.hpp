#pragma once

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "ssf/algebra.hpp"
#include "ssf/quadrature.hpp"
#include "ssf/step_function.hpp"
#include "ssf/w1_function.hpp"

namespace ssf {

enum class CheckKind { equality, inequality };

struct VerificationReport {
  std::string name;
  std::string anchor;  // the identity or bound being checked
  double left = 0.0;
  double right = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::equality;
  bool pass = false;
  nlohmann::json metadata = nlohmann::json::object();
};

/// pass = |left − right| <= tol (equality) or left <= right + tol (inequality);
/// NaN never passes.
VerificationReport make_report(std::string name, std::string anchor, double left, double right, double tolerance,
                               CheckKind kind, nlohmann::json metadata = nlohmann::json::object());

/// τ(f(A) − f(B)) from the two spectra.
double trace_diff_direct(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f);

/// ∫ f'ξ = Σ ξ_k (f(r_k) − f(l_k)); ξ must be compactly supported.
double trace_formula_rhs(const W1Function& f, const StepFunction& xi);

struct BirmanSolomyakResult {
  double value;
  double error;
  int evaluations;
  QuadratureRule rule;
};

/// ∫₀¹ τ(f'((1 − z)A + zB)(A − B)) dz. One eigendecomposition per node is
/// shared by all functions of the batch.
std::vector<BirmanSolomyakResult> birman_solomyak(const HermitianOperator& a, const HermitianOperator& b,
                                                  std::span<const W1Function> fs, const QuadratureSpec& q = {});
BirmanSolomyakResult birman_solomyak(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f,
                                     const QuadratureSpec& q = {});

struct PlancherelResult {
  double value;
  double error_estimate;  // |P_N − P_{N/2}|
  SeminormGrid grid;
};

/// 2π ∫ F(f')(s) conj(F(ξ)(s)) ds on the frequency lattice of the periodic grid
/// [−L, L): F(f') from the discrete transform of f' samples, F(ξ) in closed
/// form. Throws std::domain_error unless supp ξ ⊂ (−L, L) and N is a power of
/// two >= 2¹⁰.
PlancherelResult plancherel_pairing(const W1Function& f, const StepFunction& xi, const SeminormGrid& grid);

/// ‖f(A) − f(B)‖₁ <= ‖f‖_{W₁}‖A − B‖₁ at tolerance 1e-9·right.
VerificationReport widom_check(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f);
/// Same with a precomputed ‖f‖_{W₁}.
VerificationReport widom_check(const HermitianOperator& a, const HermitianOperator& b, const W1Function& f,
                               const SeminormResult& seminorm);

/// ‖e^{isA} − e^{isB}‖₁ <= |s|‖A − B‖₁ for each s.
std::vector<VerificationReport> exp_diff_check(const HermitianOperator& a, const HermitianOperator& b,
                                               std::span<const double> s_values);

struct CompressionDefect {
  double defect;  // |τ((pAp)ᵐ − Aᵐp)|
  double bound;   // m(m−1)/2 ‖[A,p]‖₂² ‖A‖∞^{m−2}
  bool pass;      // defect <= bound + 1e-9·(1 + bound)
};

/// Throws std::domain_error for m < 1.
CompressionDefect compression_defect(const HermitianOperator& a, const HermitianOperator& p, int m);

/// ‖[C,p]‖₂², −τ([C,p]²) and 2τ(A_pC²) − 2τ((A_pC)²) with A_p = supp(C)·p·supp(C).
VerificationReport commutator_identity_check(const HermitianOperator& c, const HermitianOperator& p);

struct PositivityWindowReport {
  bool applicable;             // false when the pair is not ordered
  std::vector<double> alphas;
  std::vector<double> values;  // ∫ξ h'_{a,b,α}
  double window_integral;      // ∫ₐᵇ ξ
  double limit_estimate;       // value at the smallest α
  bool nonnegative;            // every value >= −1e-9
  bool converges;              // |value − ∫ₐᵇξ| <= 2α‖ξ‖∞ + 1e-9 for every α
  bool pass() const { return !applicable || (nonnegative && converges); }
};

PositivityWindowReport positivity_window_check(const StepFunction& xi, double a, double b,
                                               std::span<const double> alphas, bool ordered = true);

struct ScalingReport {
  std::vector<double> alphas;
  std::vector<double> values;  // α ∫ h_α' ξ
  double bound;                // ‖h₁‖_{W₁}·‖A − B‖₁
  double seminorm_estimate;    // grid estimate of ‖h₁‖_{W₁}
  double target;               // τ(A − B)
  double reach;                // max |t| over supp ξ
  bool bounded;                // every |value| <= bound + 1e-9·(1 + bound)
  bool asserted;               // largest α >= 10³·reach
  bool converged;              // |value(α_max) − τ(A−B)| <= 1e-6·(1 + |τ(A−B)|)
  bool pass() const { return bounded && (!asserted || converged); }
};

ScalingReport integrability_scaling_check(const HermitianOperator& a, const HermitianOperator& b,
                                          std::span<const double> alphas);
ScalingReport integrability_scaling_check(const StepFunction& xi, double v_trace_norm, double v_trace,
                                          std::span<const double> alphas);

}  // namespace ssf
