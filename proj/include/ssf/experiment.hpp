#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ssf/algebra.hpp"
#include "ssf/quadrature.hpp"
#include "ssf/shift.hpp"
#include "ssf/verify.hpp"
#include "ssf/w1_function.hpp"

namespace ssf {

inline constexpr const char* kVersion = "0.1.0";

enum class GeneratorKind { explicit_blocks, diagonal, random_hermitian, wide_spectrum, random_positive, arrowhead, band };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::diagonal;
  std::optional<std::uint64_t> seed;
  double scale = 1.0;
  double magnitude = 0.0;
  double floor = 0.1;
  std::size_t rank = 1;
  std::size_t avoid_last = 0;
  std::size_t far = 2;
  std::size_t band = 1;
  std::vector<double> values;
  std::vector<Matrix> blocks;
  bool randomized() const;
};

/// Defaults are the module-level tolerances; overrides may only tighten them
/// unless `unsafe_tolerances` is set.
struct Tolerances {
  double trace_formula = 1e-9;
  double birman_solomyak = 1e-7;
  double plancherel = 1e-4;
  double breakpoint = 1e-8;
  double moment = 1e-8;
  double scaling = 1e-6;
};

struct ExperimentConfig {
  std::string name = "experiment";
  TraceAlgebra algebra = TraceAlgebra::single(1);
  GeneratorSpec op;
  GeneratorSpec perturbation;
  std::vector<W1Function> functions;
  std::vector<std::string> routes;
  std::vector<std::string> checks;
  std::vector<std::vector<std::size_t>> projection_ranks;
  std::vector<double> h_alphas{0.5, 1.0, 2.0};
  std::optional<std::pair<double, double>> window;
  std::vector<double> window_alphas{1.0, 0.1, 0.01, 0.001};
  std::vector<double> scaling_alphas{1.0, 1e2, 1e4, 1e8};
  std::vector<double> exp_s_values{-2.0, -0.5, 0.5, 2.0};
  std::vector<std::size_t> truncation_ranks;  // empty: 0..rank(V) and full
  std::vector<int> approximation_orders{4, 8, 16, 32};
  int max_moment = 6;
  QuadratureSpec quadrature;
  SeminormGrid plancherel_grid{64.0, 16384};
  Tolerances tolerances;
  bool unsafe_tolerances = false;
  std::size_t replicates = 1;
  std::optional<std::string> output_dir;
  nlohmann::json raw;
};

inline const std::vector<std::string> kRoutes{"direct", "compression", "monotone_split", "h_transform"};
inline const std::vector<std::string> kChecks{"bounds",      "trace_formula",    "birman_solomyak",
                                              "plancherel",  "widom",            "exp_diff",
                                              "moments",     "positivity_window", "integrability_scaling",
                                              "truncation",  "approximation"};

/// Strict parse; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& p);

struct OperatorPair {
  HermitianOperator a;
  HermitianOperator b;
  std::uint64_t seed;  // operator seed used (0 when deterministic)
};

/// B = A − V. Replicate r adds r to every generator seed.
OperatorPair generate_operators(const ExperimentConfig& cfg, std::size_t replicate = 0);

struct CaseResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<VerificationReport> reports;
  std::vector<std::pair<std::string, ShiftFunction>> shifts;  // file stem, ξ
  std::vector<std::string> notes;
};

/// All selected routes and checks for one replicate.
CaseResult run_case(const ExperimentConfig& cfg, std::size_t replicate,
                    const std::vector<SeminormResult>& seminorms);

struct RunOptions {
  std::optional<std::filesystem::path> out;  // overrides cfg.output_dir
  unsigned jobs = 1;
  std::optional<std::int64_t> seed_override;
  std::ostream* log = nullptr;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::size_t total_checks = 0;
  std::size_t failed_checks = 0;
  bool seed_override_applied = false;
  nlohmann::json outcomes;                                     // per check name
  std::vector<std::pair<std::string, std::string>> files;     // relative path, sha256
  std::vector<CaseResult> cases;
  std::string summary;
};

/// Runs every replicate (in parallel with `jobs` threads), merges reports by
/// check name then seed and, when an output directory is given, writes ξ
/// CSVs with JSON sidecars, SVG plots, reports.jsonl, summary.txt,
/// config.json and manifest.json. Check failures are recorded, not thrown.
RunManifest run_experiment(ExperimentConfig cfg, const RunOptions& opts = {});

/// Reports sorted by check name, then seed, then case.
std::vector<std::pair<const CaseResult*, const VerificationReport*>> merged_reports(const std::vector<CaseResult>& cases);

std::string summary_table(const std::vector<CaseResult>& cases, const std::string& title);

}  // namespace ssf
