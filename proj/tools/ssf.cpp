#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "ssf/acceptance.hpp"
#include "ssf/experiment.hpp"
#include "ssf/io.hpp"
#include "ssf/plot.hpp"

namespace {

constexpr int kConfigError = 64;
constexpr int kIoError = 74;
constexpr int kMaxFailureCode = 63;

int failure_code(std::size_t failed) { return static_cast<int>(std::min<std::size_t>(failed, kMaxFailureCode)); }

std::optional<std::int64_t> seed_override_from_env() {
  const char* raw = std::getenv("SSF_SEED_OVERRIDE");
  if (!raw || !*raw) return std::nullopt;
  std::int64_t v = 0;
  const std::string s(raw);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) {
    throw ssf::ConfigError("SSF_SEED_OVERRIDE", "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

int cmd_run(const std::string& config, const std::string& out, unsigned jobs) {
  ssf::ExperimentConfig cfg;
  ssf::RunOptions opts;
  try {
    cfg = ssf::load_config(config);
    opts.seed_override = seed_override_from_env();
  } catch (const ssf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (!out.empty()) opts.out = out;
  opts.jobs = std::max(1u, jobs);
  if (opts.seed_override && (opts.out || cfg.output_dir)) {
    std::cerr << "note: SSF_SEED_OVERRIDE ignored because a manifest is written\n";
  }
  ssf::RunManifest m;
  try {
    m = ssf::run_experiment(cfg, opts);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  std::cout << m.summary;
  if (m.seed_override_applied) std::cout << "seed override " << *opts.seed_override << " applied\n";
  for (const auto& c : m.cases) {
    for (const auto& n : c.notes) std::cout << "note (case " << c.index << "): " << n << "\n";
  }
  if (!m.files.empty()) {
    std::cout << "wrote " << m.files.size() + 1 << " files to " << (opts.out ? opts.out->string() : *cfg.output_dir) << "\n";
  }
  return failure_code(m.failed_checks);
}

int cmd_check(const std::string& suite, const std::vector<std::string>& only) {
  if (suite != "acceptance") {
    std::cerr << "unknown suite '" << suite << "' (available: acceptance)\n";
    return kConfigError;
  }
  for (const auto& id : only) {
    const auto& ids = ssf::acceptance_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      std::cerr << "unknown criterion '" << id << "'\n";
      return kConfigError;
    }
  }
  const auto results = ssf::run_acceptance(only, &std::cout);
  const auto failed = static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) {
    return !r.pass;
  }));
  double total = 0.0;
  for (const auto& r : results) total += r.seconds;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed in " << total << " s\n";
  return failure_code(failed);
}

int cmd_plot(const std::string& csv, const std::string& svg) {
  ssf::StepFunction xi;
  try {
    xi = ssf::StepFunction::from_csv(ssf::read_text(csv));
  } catch (const std::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    ssf::emit_plot(xi, svg, std::filesystem::path(csv).filename().string());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral shift function toolkit"};
  app.set_version_flag("--version", std::string(ssf::kVersion));
  app.require_subcommand(1);

  std::string config;
  std::string out;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory (overrides output_dir)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string suite;
  std::vector<std::string> only;
  auto* check = app.add_subcommand("check", "Run a verification suite");
  check->add_option("--suite", suite, "Suite name")->required();
  check->add_option("--only", only, "Restrict to these criteria (e.g. AC1 AC4)")->delimiter(',');

  std::string csv;
  std::string svg;
  auto* plot = app.add_subcommand("plot", "Render a xi CSV as SVG");
  plot->add_option("xi_csv", csv, "Step function CSV")->required();
  plot->add_option("out_svg", svg, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (*run) return cmd_run(config, out, jobs);
  if (*check) return cmd_check(suite, only);
  return cmd_plot(csv, svg);
}
