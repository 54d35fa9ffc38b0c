#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "ssf/acceptance.hpp"
#include "ssf/experiment.hpp"
#include "ssf/io.hpp"
#include "ssf/plot.hpp"
#include "ssf/random.hpp"
#include "ssf/spectral.hpp"

using namespace ssf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json::parse(R"({
    "name": "unit",
    "algebra": {"blocks": [{"dim": 4, "scale": 1.0}, {"dim": 2, "scale": 0.5}]},
    "operator": {"type": "random_hermitian", "seed": 7},
    "perturbation": {"type": "random_positive", "rank": 2, "seed": 8},
    "routes": ["direct", "monotone_split", "h_transform"],
    "checks": ["bounds", "trace_formula", "widom", "exp_diff", "positivity_window", "truncation"]
  })");
}

std::string config_error_field(const json& j) {
  try {
    (void)parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ssf_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SSF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  CHECK(config_error_field(base_config()) == "<accepted>");

  auto j = base_config();
  j["colour"] = "blue";
  CHECK(config_error_field(j) == "colour");

  j = base_config();
  j.erase("routes");
  CHECK(config_error_field(j) == "routes");

  j = base_config();
  j["routes"] = json::array();
  CHECK(config_error_field(j) == "routes");

  j = base_config();
  j["routes"] = {"direct", "teleport"};
  CHECK(config_error_field(j).rfind("routes", 0) == 0);

  j = base_config();
  j["operator"].erase("seed");
  CHECK(config_error_field(j) == "operator.seed");

  j = base_config();
  j["perturbation"]["bogus"] = 1;
  CHECK(config_error_field(j).rfind("perturbation", 0) == 0);

  j = base_config();
  j["tolerances"] = {{"trace_formula", 1e-6}};
  CHECK(config_error_field(j) == "tolerances.trace_formula");
  j["unsafe_tolerances"] = true;
  CHECK(config_error_field(j) == "<accepted>");
  j = base_config();
  j["tolerances"] = {{"trace_formula", 1e-11}};
  CHECK(parse_config(j).tolerances.trace_formula == 1e-11);

  j = base_config();
  j["operator"] = {{"type", "diagonal"}, {"values", {1, 2, 3}}};
  CHECK(config_error_field(j) == "operator");

  j = base_config();
  j["replicates"] = 0;
  CHECK(config_error_field(j) == "replicates");

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("generators") {
  auto j = base_config();
  j["operator"] = {{"type", "diagonal"}, {"values", {1, 2, 3, 4, 5, 6}}};
  j["perturbation"] = {{"type", "diagonal"}, {"values", {0, 0, 0, 0, 0, 1}}};
  auto cfg = parse_config(j);
  auto pair = generate_operators(cfg);
  CHECK(pair.a.block(0)(2, 2).real() == 3.0);
  CHECK(pair.a.block(1)(1, 1).real() == 6.0);
  CHECK(pair.b.block(1)(1, 1).real() == 5.0);
  CHECK(pair.a.block(0)(0, 1) == Complex(0.0, 0.0));

  cfg = parse_config(base_config());
  const auto p1 = generate_operators(cfg);
  const auto p2 = generate_operators(cfg);
  for (std::size_t k = 0; k < 2; ++k) CHECK(p1.a.block(k) == p2.a.block(k));
  CHECK(p1.seed == 7);
  const auto r1 = generate_operators(cfg, 1);
  CHECK(r1.seed == 8);
  CHECK(r1.a.block(0) != p1.a.block(0));
  CHECK(dominates(p1.a, p1.b));

  j = base_config();
  j["algebra"] = {{"blocks", {{{"dim", 8}, {"scale", 1.0}}}}};
  j["operator"] = {{"type", "wide_spectrum"}, {"seed", 3}, {"magnitude", 1e6}};
  j["perturbation"] = {{"type", "random_positive"}, {"rank", 1}, {"seed", 4}, {"avoid_last", 2}};
  const auto wide = generate_operators(parse_config(j));
  CHECK(schatten_norm(wide.a, kInfinity) >= 1e6);
  CHECK(support_projection(wide.a - wide.b).trace == 1.0);
}

TEST_CASE("run_experiment with A = B passes everything with a null support") {
  auto j = base_config();
  j["operator"] = {{"type", "diagonal"}, {"values", {1, 2, 3, 4, -1, 0.5}}};
  j["perturbation"] = {{"type", "diagonal"}, {"values", {0, 0, 0, 0, 0, 0}}};
  j["routes"] = {"direct"};
  j["checks"] = {"bounds", "trace_formula", "birman_solomyak", "widom", "exp_diff"};
  const auto out = scratch("null");
  RunOptions opts;
  opts.out = out;
  const auto m = run_experiment(parse_config(j), opts);
  CHECK(m.failed_checks == 0);
  CHECK(m.total_checks > 0);
  const auto side = json::parse(read_text(out / "xi_direct.json"));
  CHECK(side["support"].is_null());
  CHECK(side["l1_norm"].get<double>() == 0.0);
  CHECK(fs::exists(out / "xi_direct.csv"));
  CHECK(fs::exists(out / "xi_direct.svg"));
  CHECK(read_text(out / "xi_direct.svg").find("&#958; &#8801; 0") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("manifest hashes match the written files") {
  const auto out = scratch("manifest");
  RunOptions opts;
  opts.out = out;
  const auto m = run_experiment(parse_config(base_config()), opts);
  CHECK(m.failed_checks == 0);
  const auto man = json::parse(read_text(out / "manifest.json"));
  CHECK(man["config_hash"].get<std::string>() == sha256_hex(base_config().dump()));
  CHECK(man["version"].get<std::string>() == kVersion);
  std::set<std::string> listed;
  for (const auto& f : man["files"]) {
    const auto path = f["path"].get<std::string>();
    listed.insert(path);
    CHECK(sha256_file(out / path) == f["sha256"].get<std::string>());
  }
  for (const auto& e : fs::directory_iterator(out)) {
    if (e.path().filename() != "manifest.json") CHECK(listed.count(e.path().filename().string()) == 1);
  }
  CHECK(listed.count("reports.jsonl") == 1);
  CHECK(listed.count("summary.txt") == 1);
  CHECK(listed.count("config.json") == 1);
  fs::remove_all(out);
}

TEST_CASE("outputs are identical across job counts") {
  auto j = base_config();
  j["replicates"] = 5;
  const auto cfg = parse_config(j);
  const auto o1 = scratch("jobs1");
  const auto o4 = scratch("jobs4");
  RunOptions a;
  a.out = o1;
  a.jobs = 1;
  RunOptions b;
  b.out = o4;
  b.jobs = 4;
  const auto m1 = run_experiment(cfg, a);
  const auto m4 = run_experiment(cfg, b);
  REQUIRE(m1.files.size() == m4.files.size());
  for (std::size_t i = 0; i < m1.files.size(); ++i) {
    CHECK(m1.files[i].first == m4.files[i].first);
    CHECK(m1.files[i].second == m4.files[i].second);
  }
  CHECK(m1.summary == m4.summary);
  fs::remove_all(o1);
  fs::remove_all(o4);
}

TEST_CASE("seed override applies only without an output directory") {
  const auto cfg = parse_config(base_config());
  RunOptions opts;
  opts.seed_override = 99;
  const auto m = run_experiment(cfg, opts);
  CHECK(m.seed_override_applied);
  CHECK(m.cases.at(0).seed == 99);
  const auto out = scratch("override");
  opts.out = out;
  const auto w = run_experiment(cfg, opts);
  CHECK_FALSE(w.seed_override_applied);
  CHECK(w.cases.at(0).seed == 7);
  CHECK(json::parse(read_text(out / "manifest.json"))["seed_override"]["applied"] == false);
  fs::remove_all(out);
}

TEST_CASE("W1 function JSON round trip") {
  const std::vector<W1Function> fs_{W1Function::gaussian_primitive(0.5, 2.0, -1.0),
                                    W1Function::polynomial_window({1, 0, -2}, -3, 4),
                                    W1Function::h_alpha_profile(0.25),
                                    W1Function::sampled(-1.0, 0.5, {0, 1, 3, 3}, {0, 2, 1, 0})};
  for (const auto& f : fs_) {
    const auto g = w1_from_json(to_json(f));
    CHECK(g.family() == f.family());
    for (double t : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
      CHECK(g(t) == f(t));
      CHECK(g.derivative(t) == f.derivative(t));
    }
  }
  CHECK_THROWS_AS(w1_from_json(json::parse(R"({"family": "gaussian_primitive", "params": {"width": 1, "x": 2}})")),
                  ConfigError);
  CHECK_THROWS_AS(w1_from_json(json::parse(R"({"family": "spline"})")), ConfigError);
}

TEST_CASE("plots") {
  const auto zero = render_svg(StepFunction(0.0));
  CHECK(zero.rfind("<svg", 0) == 0);
  CHECK(zero.find("&#958; &#8801; 0") != std::string::npos);
  const auto step = render_svg(StepFunction({0.0, 1.0}, {0.0, 1.0, 0.0}), "demo");
  CHECK(step.find("demo") != std::string::npos);
  CHECK(step.find("&#8747;&#958; = 1") != std::string::npos);
  CHECK(step.find("</svg>") != std::string::npos);
  CHECK_THROWS_AS(emit_plot(StepFunction(0.0), "/nonexistent/dir/x.svg"), std::runtime_error);
}

TEST_CASE("random stream") {
  RandomStream a(5);
  RandomStream b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());
  RandomStream c(6);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = c.integer(2, 4);
    CHECK(k >= 2);
    CHECK(k <= 4);
  }
  double s = 0.0;
  double s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = c.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s / n) < 0.05);
  CHECK(std::fabs(s2 / n - 1.0) < 0.05);
}

TEST_CASE("acceptance pairs") {
  for (std::uint64_t seed : {1000u, 1001u, 1042u, 1099u}) {
    const auto p = acceptance_pair(seed);
    CHECK(p.ordered == (seed % 2 == 0));
    const auto& blocks = p.a.algebra().blocks();
    CHECK(blocks.size() >= 1);
    CHECK(blocks.size() <= 3);
    for (const auto& b : blocks) {
      CHECK(b.dim >= 2);
      CHECK(b.dim <= 40);
      CHECK((b.scale == 1.0 || b.scale == 0.5 || b.scale == 1.0 / 3.0));
    }
    const double v1 = schatten_norm(p.a - p.b, 1.0);
    CHECK(v1 >= 0.5 - 1e-12);
    CHECK(v1 <= 10.0 + 1e-12);
    if (p.ordered) CHECK(dominates(p.a, p.b));
    const auto q = acceptance_pair(seed);
    CHECK(q.a.block(0) == p.a.block(0));
  }
  CHECK(shipped_functions().size() == 5);
  CHECK(acceptance_ids().size() == 8);
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("cli");
  const auto cfg = dir / "cfg.json";
  write_text(cfg, base_config().dump());
  const auto out = dir / "out";

  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("") == 64);
  CHECK(run_cli("frobnicate") == 64);
  CHECK(run_cli("run " + (dir / "missing.json").string()) == 64);
  write_text(dir / "broken.json", "{\"name\": ");
  CHECK(run_cli("run " + (dir / "broken.json").string()) == 64);
  auto bad = base_config();
  bad["routes"] = json::array();
  write_text(dir / "bad.json", bad.dump());
  CHECK(run_cli("run " + (dir / "bad.json").string()) == 64);
  CHECK(run_cli("run " + cfg.string() + " --jobs 0") == 64);

  CHECK(run_cli("run " + cfg.string() + " --out " + out.string() + " --jobs 2") == 0);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(std::system(("SSF_SEED_OVERRIDE=abc " + std::string(SSF_CLI_PATH) + " run " + cfg.string() +
                     " >/dev/null 2>&1; test $? -eq 64")
                        .c_str()) == 0);

  CHECK(run_cli("plot " + (out / "xi_direct.csv").string() + " " + (dir / "p.svg").string()) == 0);
  CHECK(fs::exists(dir / "p.svg"));
  write_text(dir / "junk.csv", "nope\n");
  CHECK(run_cli("plot " + (dir / "junk.csv").string() + " " + (dir / "q.svg").string()) == 64);
  CHECK(run_cli("plot " + (out / "xi_direct.csv").string() + " /nonexistent/dir/q.svg") == 74);

  CHECK(run_cli("check --suite nightly") == 64);
  CHECK(run_cli("check --suite acceptance --only AC9") == 64);
  CHECK(run_cli("check --suite acceptance --only AC4") == 0);
  fs::remove_all(dir);
}

TEST_CASE("failed checks set the exit code") {
  // a Birman-Solomyak tolerance of 1e-300 cannot be met
  const auto dir = scratch("fail");
  auto j = base_config();
  j["checks"] = {"birman_solomyak"};
  j["functions"] = json::array({json::parse(R"({"family": "gaussian_primitive", "params": {"center": 0, "width": 1}})"),
                                 json::parse(R"({"family": "h_alpha_profile", "params": {"alpha": 1}})")});
  j["tolerances"] = {{"birman_solomyak", 1e-300}};
  write_text(dir / "cfg.json", j.dump());
  const int code = run_cli("run " + (dir / "cfg.json").string());
  const auto m = run_experiment(parse_config(j));
  CHECK(m.failed_checks > 0);
  CHECK(code == static_cast<int>(std::min<std::size_t>(m.failed_checks, 63)));
  fs::remove_all(dir);
}
