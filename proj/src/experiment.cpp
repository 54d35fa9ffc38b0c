#include "ssf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ssf/io.hpp"
#include "ssf/plot.hpp"
#include "ssf/random.hpp"
#include "ssf/spectral.hpp"

namespace ssf {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
  }
}

std::string path(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path(where, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path(where, key), "must be finite");
  return x;
}

double positive_number(const json& obj, const std::string& key, const std::string& where) {
  const double x = get_number(obj, key, where);
  if (!(x > 0.0)) throw ConfigError(path(where, key), "must be positive");
  return x;
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(path(where, key), "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json& v, const std::string& where, bool positive) {
  if (!v.is_array()) throw ConfigError(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError(where, "expected an array of numbers");
    if (positive && !(x.get<double>() > 0.0)) throw ConfigError(where, "entries must be positive");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> name_list(const json& v, const std::string& where, const std::vector<std::string>& known) {
  if (!v.is_array()) throw ConfigError(where, "expected an array of names");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw ConfigError(where, "expected an array of names");
    const auto s = x.get<std::string>();
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw ConfigError(where, "unknown entry '" + s + "'");
    }
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

Matrix parse_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(where, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(where, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(where, "entries must be numbers or [re, im] pairs");
      }
    }
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ConfigError(where, "matrix is not Hermitian");
  return m;
}

GeneratorSpec parse_generator(const json& j, const std::string& where, bool perturbation) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  if (!j.contains("type") || !j["type"].is_string()) throw ConfigError(path(where, "type"), "missing generator type");
  const auto type = j["type"].get<std::string>();
  GeneratorSpec g;
  auto opt_seed = [&] {
    if (j.contains("seed")) g.seed = get_count(j, "seed", where);
  };
  if (type == "explicit") {
    reject_unknown(j, {"type", "blocks"}, where);
    g.kind = GeneratorKind::explicit_blocks;
    if (!j.contains("blocks") || !j["blocks"].is_array()) throw ConfigError(path(where, "blocks"), "missing");
    for (std::size_t k = 0; k < j["blocks"].size(); ++k) {
      g.blocks.push_back(parse_matrix(j["blocks"][k], path(where, "blocks[" + std::to_string(k) + "]")));
    }
  } else if (type == "diagonal") {
    reject_unknown(j, {"type", "values"}, where);
    g.kind = GeneratorKind::diagonal;
    if (!j.contains("values")) throw ConfigError(path(where, "values"), "missing");
    g.values = number_list(j["values"], path(where, "values"), false);
  } else if (type == "random_hermitian" && !perturbation) {
    reject_unknown(j, {"type", "seed", "scale"}, where);
    g.kind = GeneratorKind::random_hermitian;
    opt_seed();
    if (j.contains("scale")) g.scale = positive_number(j, "scale", where);
  } else if (type == "wide_spectrum" && !perturbation) {
    reject_unknown(j, {"type", "seed", "scale", "magnitude", "far"}, where);
    g.kind = GeneratorKind::wide_spectrum;
    opt_seed();
    if (!j.contains("magnitude")) throw ConfigError(path(where, "magnitude"), "missing");
    g.magnitude = positive_number(j, "magnitude", where);
    if (j.contains("scale")) g.scale = positive_number(j, "scale", where);
    if (j.contains("far")) g.far = get_count(j, "far", where);
  } else if (type == "arrowhead" && !perturbation) {
    reject_unknown(j, {"type", "seed", "floor"}, where);
    g.kind = GeneratorKind::arrowhead;
    opt_seed();
    if (j.contains("floor")) g.floor = get_number(j, "floor", where);
  } else if (type == "band" && !perturbation) {
    reject_unknown(j, {"type", "seed", "floor", "band"}, where);
    g.kind = GeneratorKind::band;
    opt_seed();
    if (j.contains("floor")) g.floor = get_number(j, "floor", where);
    if (j.contains("band")) g.band = get_count(j, "band", where);
  } else if (type == "random_positive" && perturbation) {
    reject_unknown(j, {"type", "seed", "scale", "rank", "avoid_last"}, where);
    g.kind = GeneratorKind::random_positive;
    opt_seed();
    if (j.contains("scale")) g.scale = positive_number(j, "scale", where);
    if (j.contains("rank")) g.rank = get_count(j, "rank", where);
    if (j.contains("avoid_last")) g.avoid_last = get_count(j, "avoid_last", where);
    if (g.rank == 0) throw ConfigError(path(where, "rank"), "must be at least 1");
  } else {
    throw ConfigError(path(where, "type"), "unsupported generator '" + type + "'");
  }
  if (g.randomized() && !g.seed) throw ConfigError(path(where, "seed"), "randomized generators require a seed");
  return g;
}

void tighten(double& slot, const json& t, const std::string& key, bool unsafe) {
  if (!t.contains(key)) return;
  const double v = positive_number(t, key, "tolerances");
  if (v > slot && !unsafe) {
    throw ConfigError("tolerances." + key, "loosening a default tolerance requires \"unsafe_tolerances\": true");
  }
  slot = v;
}

HermitianOperator build(const GeneratorSpec& g, const TraceAlgebra& alg, std::size_t replicate) {
  const std::uint64_t seed = g.seed.value_or(0) + replicate;
  switch (g.kind) {
    case GeneratorKind::explicit_blocks:
      return HermitianOperator(alg, g.blocks);
    case GeneratorKind::diagonal:
      return HermitianOperator::diagonal(alg, g.values);
    case GeneratorKind::random_hermitian:
      return random_hermitian(alg, seed, g.scale);
    case GeneratorKind::wide_spectrum:
      return wide_spectrum(alg, g.magnitude, seed, g.far, g.scale);
    case GeneratorKind::random_positive:
      return random_positive(alg, g.rank, seed, g.scale, g.avoid_last);
    case GeneratorKind::arrowhead:
      return random_arrowhead(alg, seed, g.floor);
    case GeneratorKind::band:
      return random_band(alg, g.band, seed, g.floor);
  }
  throw std::logic_error("unreachable generator kind");
}

VerificationReport flag_report(std::string name, std::string anchor, bool holds, json meta = json::object()) {
  return make_report(std::move(name), std::move(anchor), holds ? 1.0 : 0.0, 1.0, 0.0, CheckKind::equality,
                     std::move(meta));
}

VerificationReport error_report(const std::string& name, const std::string& anchor, const std::exception& e) {
  return make_report(name, anchor, std::nan(""), 0.0, 0.0, CheckKind::equality, json{{"error", e.what()}});
}

std::string alpha_tag(double alpha) {
  std::string s = format_double(alpha);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  std::replace(s.begin(), s.end(), '+', 'p');
  return s;
}

std::vector<std::vector<std::size_t>> default_projection_ranks(const TraceAlgebra& alg) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t j = 1; j <= 4; ++j) {
    std::vector<std::size_t> r;
    for (const auto& blk : alg.blocks()) r.push_back((blk.dim * j + 3) / 4);
    out.push_back(r);
  }
  return out;
}

std::size_t operator_rank(const HermitianOperator& v) {
  const auto s = spectral_decompose(v);
  const double cut = tolerance::rank * s.norm_inf();
  std::size_t r = 0;
  for (const auto& blk : s.blocks()) {
    for (Eigen::Index i = 0; i < blk.eigenvalues.size(); ++i) r += std::fabs(blk.eigenvalues(i)) > cut ? 1 : 0;
  }
  return r;
}

bool selected(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

}  // namespace

bool GeneratorSpec::randomized() const {
  return kind != GeneratorKind::explicit_blocks && kind != GeneratorKind::diagonal;
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j,
                 {"name", "description", "algebra", "operator", "perturbation", "functions", "routes", "checks",
                  "projections", "h_alphas", "window", "scaling_alphas", "exp_s_values", "truncation_ranks",
                  "approximation_orders", "max_moment", "quadrature", "plancherel_grid", "tolerances",
                  "unsafe_tolerances", "replicates", "output_dir"},
                 "");
  ExperimentConfig cfg;
  cfg.raw = j;
  if (j.contains("name")) {
    if (!j["name"].is_string() || j["name"].get<std::string>().empty()) throw ConfigError("name", "expected a string");
    cfg.name = j["name"].get<std::string>();
  }
  if (j.contains("description") && !j["description"].is_string()) {
    throw ConfigError("description", "expected a string");
  }

  if (!j.contains("algebra")) throw ConfigError("algebra", "missing");
  {
    const auto& a = j["algebra"];
    reject_unknown(a, {"blocks"}, "algebra");
    if (!a.contains("blocks") || !a["blocks"].is_array() || a["blocks"].empty()) {
      throw ConfigError("algebra.blocks", "expected a non-empty array");
    }
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < a["blocks"].size(); ++k) {
      const std::string w = "algebra.blocks[" + std::to_string(k) + "]";
      const auto& b = a["blocks"][k];
      reject_unknown(b, {"dim", "scale"}, w);
      if (!b.contains("dim")) throw ConfigError(w + ".dim", "missing");
      const auto dim = get_count(b, "dim", w);
      const double scale = b.contains("scale") ? positive_number(b, "scale", w) : 1.0;
      blocks.push_back(Block{static_cast<std::size_t>(dim), scale});
    }
    try {
      cfg.algebra = TraceAlgebra(std::move(blocks));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("algebra.blocks", e.what());
    }
  }

  if (!j.contains("operator")) throw ConfigError("operator", "missing");
  cfg.op = parse_generator(j["operator"], "operator", false);
  if (!j.contains("perturbation")) throw ConfigError("perturbation", "missing");
  cfg.perturbation = parse_generator(j["perturbation"], "perturbation", true);

  if (j.contains("functions")) {
    if (!j["functions"].is_array()) throw ConfigError("functions", "expected an array");
    for (std::size_t i = 0; i < j["functions"].size(); ++i) {
      cfg.functions.push_back(w1_from_json(j["functions"][i], "functions[" + std::to_string(i) + "]"));
    }
  } else {
    cfg.functions.push_back(W1Function::gaussian_primitive(0.0, 1.0));
  }

  if (!j.contains("routes")) throw ConfigError("routes", "at least one route is required");
  cfg.routes = name_list(j["routes"], "routes", kRoutes);
  if (cfg.routes.empty()) throw ConfigError("routes", "at least one route is required");
  if (j.contains("checks")) {
    cfg.checks = name_list(j["checks"], "checks", kChecks);
  } else {
    cfg.checks.assign(kChecks.begin(), kChecks.end() - 1);
  }

  if (j.contains("projections")) {
    const auto& p = j["projections"];
    if (!p.is_array() || p.empty()) throw ConfigError("projections", "expected a non-empty array of rank lists");
    for (const auto& step : p) {
      if (!step.is_array() || step.size() != cfg.algebra.block_count()) {
        throw ConfigError("projections", "each entry lists one rank per block");
      }
      std::vector<std::size_t> r;
      for (std::size_t k = 0; k < step.size(); ++k) {
        if (!step[k].is_number_integer() || step[k].get<std::int64_t>() < 0 ||
            step[k].get<std::size_t>() > cfg.algebra.dim(k)) {
          throw ConfigError("projections", "ranks must be integers in [0, dim]");
        }
        r.push_back(step[k].get<std::size_t>());
      }
      if (!cfg.projection_ranks.empty()) {
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (r[k] < cfg.projection_ranks.back()[k]) throw ConfigError("projections", "ranks must be non-decreasing");
        }
      }
      cfg.projection_ranks.push_back(std::move(r));
    }
  }

  if (j.contains("h_alphas")) cfg.h_alphas = number_list(j["h_alphas"], "h_alphas", true);
  if (j.contains("window")) {
    const auto& w = j["window"];
    reject_unknown(w, {"a", "b", "alphas"}, "window");
    if (w.contains("a") != w.contains("b")) throw ConfigError("window", "give both a and b");
    if (w.contains("a")) {
      const double a = get_number(w, "a", "window");
      const double b = get_number(w, "b", "window");
      if (!(a < b)) throw ConfigError("window", "requires a < b");
      cfg.window = std::make_pair(a, b);
    }
    if (w.contains("alphas")) cfg.window_alphas = number_list(w["alphas"], "window.alphas", true);
  }
  if (j.contains("scaling_alphas")) cfg.scaling_alphas = number_list(j["scaling_alphas"], "scaling_alphas", true);
  if (j.contains("exp_s_values")) cfg.exp_s_values = number_list(j["exp_s_values"], "exp_s_values", false);
  if (j.contains("truncation_ranks")) {
    const auto& t = j["truncation_ranks"];
    if (!t.is_array()) throw ConfigError("truncation_ranks", "expected an array of integers");
    for (const auto& r : t) {
      if (!r.is_number_integer() || r.get<std::int64_t>() < 0) {
        throw ConfigError("truncation_ranks", "expected an array of non-negative integers");
      }
      if (!cfg.truncation_ranks.empty() && r.get<std::size_t>() < cfg.truncation_ranks.back()) {
        throw ConfigError("truncation_ranks", "ranks must be ascending");
      }
      cfg.truncation_ranks.push_back(r.get<std::size_t>());
    }
  }
  if (j.contains("approximation_orders")) {
    const auto& t = j["approximation_orders"];
    if (!t.is_array() || t.empty()) throw ConfigError("approximation_orders", "expected an array of integers");
    cfg.approximation_orders.clear();
    for (const auto& n : t) {
      if (!n.is_number_integer() || n.get<int>() < 1) {
        throw ConfigError("approximation_orders", "expected positive integers");
      }
      cfg.approximation_orders.push_back(n.get<int>());
    }
  }
  if (j.contains("max_moment")) {
    const auto m = get_count(j, "max_moment", "");
    if (m < 1 || m > 16) throw ConfigError("max_moment", "must lie in [1, 16]");
    cfg.max_moment = static_cast<int>(m);
  }
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    reject_unknown(q, {"rule", "nodes", "target", "fallback", "max_evaluations"}, "quadrature");
    if (q.contains("rule")) {
      if (!q["rule"].is_string()) throw ConfigError("quadrature.rule", "expected a string");
      const auto r = q["rule"].get<std::string>();
      if (r == "gauss_legendre") {
        cfg.quadrature.rule = QuadratureRule::gauss_legendre;
      } else if (r == "adaptive_simpson") {
        cfg.quadrature.rule = QuadratureRule::adaptive_simpson;
      } else {
        throw ConfigError("quadrature.rule", "unknown rule '" + r + "'");
      }
    }
    if (q.contains("nodes")) cfg.quadrature.nodes = static_cast<int>(get_count(q, "nodes", "quadrature"));
    if (q.contains("target")) cfg.quadrature.target = positive_number(q, "target", "quadrature");
    if (q.contains("max_evaluations")) {
      cfg.quadrature.max_evaluations = static_cast<int>(get_count(q, "max_evaluations", "quadrature"));
    }
    if (q.contains("fallback")) {
      if (!q["fallback"].is_boolean()) throw ConfigError("quadrature.fallback", "expected a boolean");
      cfg.quadrature.fallback = q["fallback"].get<bool>();
    }
    try {
      cfg.quadrature.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("quadrature", e.what());
    }
  }
  if (j.contains("plancherel_grid")) {
    const auto& g = j["plancherel_grid"];
    reject_unknown(g, {"half_width", "points"}, "plancherel_grid");
    if (g.contains("half_width")) cfg.plancherel_grid.half_width = positive_number(g, "half_width", "plancherel_grid");
    if (g.contains("points")) {
      const auto n = get_count(g, "points", "plancherel_grid");
      if (n < 1024 || (n & (n - 1)) != 0) {
        throw ConfigError("plancherel_grid.points", "must be a power of two >= 1024");
      }
      cfg.plancherel_grid.points = static_cast<std::size_t>(n);
    }
  }
  if (j.contains("unsafe_tolerances")) {
    if (!j["unsafe_tolerances"].is_boolean()) throw ConfigError("unsafe_tolerances", "expected a boolean");
    cfg.unsafe_tolerances = j["unsafe_tolerances"].get<bool>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    reject_unknown(t, {"trace_formula", "birman_solomyak", "plancherel", "breakpoint", "moment", "scaling"},
                   "tolerances");
    auto& tol = cfg.tolerances;
    tighten(tol.trace_formula, t, "trace_formula", cfg.unsafe_tolerances);
    tighten(tol.birman_solomyak, t, "birman_solomyak", cfg.unsafe_tolerances);
    tighten(tol.plancherel, t, "plancherel", cfg.unsafe_tolerances);
    tighten(tol.breakpoint, t, "breakpoint", cfg.unsafe_tolerances);
    tighten(tol.moment, t, "moment", cfg.unsafe_tolerances);
    tighten(tol.scaling, t, "scaling", cfg.unsafe_tolerances);
  }
  if (j.contains("replicates")) {
    const auto r = get_count(j, "replicates", "");
    if (r < 1 || r > 100000) throw ConfigError("replicates", "must lie in [1, 100000]");
    cfg.replicates = static_cast<std::size_t>(r);
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }

  // dimension and shape errors surface here rather than mid-run
  for (const auto& [spec, field] : {std::pair{&cfg.op, "operator"}, std::pair{&cfg.perturbation, "perturbation"}}) {
    try {
      (void)build(*spec, cfg.algebra, 0);
    } catch (const std::logic_error& e) {
      throw ConfigError(field, e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& p) {
  std::string text;
  try {
    text = read_text(p);
  } catch (const std::runtime_error& e) {
    throw ConfigError("config", e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

OperatorPair generate_operators(const ExperimentConfig& cfg, std::size_t replicate) {
  HermitianOperator a = build(cfg.op, cfg.algebra, replicate);
  HermitianOperator v = build(cfg.perturbation, cfg.algebra, replicate);
  return {a, a - v, cfg.op.randomized() ? cfg.op.seed.value_or(0) + replicate : 0};
}

CaseResult run_case(const ExperimentConfig& cfg, std::size_t replicate, const std::vector<SeminormResult>& seminorms) {
  CaseResult out;
  out.index = replicate;
  const auto pair = generate_operators(cfg, replicate);
  out.seed = pair.seed;
  const auto& a = pair.a;
  const auto& b = pair.b;
  const HermitianOperator v = a - b;
  const auto direct = ssf_direct(a, b);
  const double diam = std::max(pair_diameter(a, b), 1e-300);
  const bool ordered = dominates(a, b);
  const auto& tol = cfg.tolerances;
  auto& reports = out.reports;
  const std::string prefix = cfg.replicates > 1 ? "case" + std::to_string(replicate) + "_" : "";
  auto guarded = [&](const std::string& name, const std::string& anchor, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      reports.push_back(error_report(name, anchor, e));
    }
  };
  auto route = [&](const std::string& r) { return selected(cfg.routes, r); };
  auto check = [&](const std::string& c) { return selected(cfg.checks, c); };

  if (route("direct")) out.shifts.emplace_back(prefix + "xi_direct", direct);

  if (route("monotone_split")) {
    guarded("monotone_split.identity", "xi_{A,B} = xi_{C,B} - xi_{C,A}, C = A + (B - A)_+", [&] {
      const auto ms = ssf_monotone_split(a, b);
      const double dev = route_deviation(ms.xi_ab.xi, direct.xi);
      reports.push_back(make_report("monotone_split.identity", "xi_{A,B} = xi_{C,B} - xi_{C,A}, C = A + (B - A)_+",
                                    dev, 0.0, tol.breakpoint * diam, CheckKind::equality,
                                    {{"identity_holds", ms.identity_holds}}));
      reports.push_back(flag_report("monotone_split.dominates", "C >= A and C >= B", ms.c_dominates));
      reports.push_back(flag_report("monotone_split.nonnegative", "xi_{C,A} >= 0 and xi_{C,B} >= 0",
                                    ms.parts_nonnegative));
      out.shifts.emplace_back(prefix + "xi_monotone_split", ms.xi_ab);
    });
  }

  if (route("h_transform")) {
    for (double alpha : cfg.h_alphas) {
      const std::string anchor = "xi_{A,B} = xi_{h(A),h(B)} o h, h(t) = t/sqrt(1 + (t/alpha)^2)";
      guarded("h_transform.agreement", anchor, [&] {
        const auto h = BijectionH::h_alpha(alpha);
        const auto r = ssf_via_h(a, b, h);
        const double dev = route_deviation(r.xi.xi, direct.xi);
        reports.push_back(make_report("h_transform.agreement", anchor, dev, 0.0, tol.breakpoint * diam,
                                      CheckKind::equality, {{"alpha", alpha}, {"warnings", r.warnings}}));
        out.shifts.emplace_back(prefix + "xi_h_alpha_" + alpha_tag(alpha), r.xi);
      });
    }
  }

  if (route("compression")) {
    guarded("compression.precondition", "A >= B >= 0", [&] {
      const auto ranks = cfg.projection_ranks.empty() ? default_projection_ranks(cfg.algebra) : cfg.projection_ranks;
      std::vector<HermitianOperator> ps;
      for (const auto& r : ranks) ps.push_back(coordinate_projection(cfg.algebra, r));
      const auto res = ssf_via_compressions(a, b, ps, cfg.max_moment);
      const double norm = std::max({1.0, schatten_norm(a, kInfinity), schatten_norm(b, kInfinity)});
      json trend = json::array();
      for (std::size_t s = 0; s < res.steps.size(); ++s) {
        trend.push_back({{"step", s},
                         {"projection_trace", res.steps[s].projection_trace},
                         {"commutator_a", res.steps[s].commutator_a},
                         {"commutator_b", res.steps[s].commutator_b}});
      }
      for (const auto& row : res.moments) {
        const json meta{{"step", row.step}, {"m", row.m}};
        reports.push_back(make_report("compression.defect_a",
                                      "|tr((pAp)^m - A^m p)| <= m(m-1)/2 ||[A,p]||_2^2 ||A||^(m-2)", row.defect_a,
                                      row.bound_a, 1e-9 * (1.0 + row.bound_a), CheckKind::inequality, meta));
        reports.push_back(make_report("compression.defect_b",
                                      "|tr((pBp)^m - B^m p)| <= m(m-1)/2 ||[B,p]||_2^2 ||B||^(m-2)", row.defect_b,
                                      row.bound_b, 1e-9 * (1.0 + row.bound_b), CheckKind::inequality, meta));
        if (row.step + 1 == res.steps.size()) {
          reports.push_back(make_report(
              "compression.moment_limit", "int m s^(m-1) xi_n(s) ds -> tr(A^m - B^m)", row.moment, row.target,
              tol.moment * std::pow(norm, row.m) * cfg.algebra.total_trace(), CheckKind::equality,
              {{"m", row.m}, {"tail", row.tail}, {"projection_trace", res.steps.back().projection_trace}}));
        }
      }
      const auto& last = res.steps.back();
      if (std::fabs(last.projection_trace - cfg.algebra.total_trace()) <= 1e-12 * cfg.algebra.total_trace()) {
        reports.push_back(make_report("compression.route_agreement", "xi_{pAp,pBp} = xi_{A,B} at p = 1",
                                      route_deviation(last.xi.xi, direct.xi), 0.0, tol.breakpoint * diam,
                                      CheckKind::equality, {{"commutator_trend", trend}}));
      } else {
        out.notes.push_back("compression: final projection is not the identity, route agreement not asserted");
      }
      for (std::size_t s = 0; s < ps.size(); ++s) {
        auto r = commutator_identity_check(a, ps[s]);
        r.metadata["step"] = s;
        reports.push_back(std::move(r));
      }
      out.shifts.emplace_back(prefix + "xi_compression", last.xi);
    });
  }

  const auto& xi = direct.xi;
  std::vector<double> lhs(cfg.functions.size());
  for (std::size_t i = 0; i < cfg.functions.size(); ++i) lhs[i] = trace_diff_direct(a, b, cfg.functions[i]);

  if (check("bounds")) {
    const auto br = ssf_bounds_report(xi, a, b);
    for (const auto& c : br.checks) {
      reports.push_back(make_report("bounds." + c.name, c.name, c.left, c.right, c.tolerance,
                                    c.equality ? CheckKind::equality : CheckKind::inequality,
                                    {{"ordered", br.ordered}}));
    }
  }

  if (check("trace_formula")) {
    for (std::size_t i = 0; i < cfg.functions.size(); ++i) {
      const auto& f = cfg.functions[i];
      guarded("trace_formula", "tr(f(A) - f(B)) = int f'(s) xi(s) ds", [&] {
        reports.push_back(make_report("trace_formula", "tr(f(A) - f(B)) = int f'(s) xi(s) ds", lhs[i],
                                      trace_formula_rhs(f, xi), tol.trace_formula * (1.0 + std::fabs(lhs[i])),
                                      CheckKind::equality, {{"function", f.label()}}));
      });
    }
  }

  if (check("birman_solomyak") && !cfg.functions.empty()) {
    const std::string anchor = "tr(f(A) - f(B)) = int_0^1 tr(f'((1-z)B + zA)(A - B)) dz";
    guarded("birman_solomyak", anchor, [&] {
      const auto bs = birman_solomyak(a, b, cfg.functions, cfg.quadrature);
      for (std::size_t i = 0; i < bs.size(); ++i) {
        reports.push_back(make_report("birman_solomyak", anchor, bs[i].value, lhs[i],
                                      tol.birman_solomyak * (1.0 + std::fabs(lhs[i])), CheckKind::equality,
                                      {{"function", cfg.functions[i].label()},
                                       {"error_estimate", bs[i].error},
                                       {"evaluations", bs[i].evaluations},
                                       {"rule", std::string(rule_name(bs[i].rule))}}));
      }
    });
  }

  if (check("plancherel")) {
    const std::string anchor = "int f' xi = 2 pi int F(f')(s) conj(F(xi)(s)) ds";
    for (std::size_t i = 0; i < cfg.functions.size(); ++i) {
      guarded("plancherel", anchor, [&] {
        const auto p = plancherel_pairing(cfg.functions[i], xi, cfg.plancherel_grid);
        reports.push_back(make_report("plancherel", anchor, p.value, lhs[i],
                                      tol.plancherel * (1.0 + std::fabs(lhs[i])), CheckKind::equality,
                                      {{"function", cfg.functions[i].label()},
                                       {"error_estimate", p.error_estimate},
                                       {"half_width", p.grid.half_width},
                                       {"points", p.grid.points}}));
      });
    }
  }

  if (check("widom")) {
    for (std::size_t i = 0; i < cfg.functions.size(); ++i) {
      guarded("widom", "||f(A) - f(B)||_1 <= ||f||_W1 ||A - B||_1", [&] {
        auto r = i < seminorms.size() ? widom_check(a, b, cfg.functions[i], seminorms[i])
                                      : widom_check(a, b, cfg.functions[i]);
        r.metadata["function"] = cfg.functions[i].label();
        reports.push_back(std::move(r));
      });
    }
  }

  if (check("exp_diff")) {
    guarded("exp_diff", "||exp(isA) - exp(isB)||_1 <= |s| ||A - B||_1", [&] {
      for (auto& r : exp_diff_check(a, b, cfg.exp_s_values)) reports.push_back(std::move(r));
    });
  }

  if (check("moments")) {
    const double norm = std::max({1.0, schatten_norm(a, kInfinity), schatten_norm(b, kInfinity)});
    for (int m = 1; m <= cfg.max_moment; ++m) {
      const double target = a.power(m).trace() - b.power(m).trace();
      reports.push_back(make_report("moments", "int m s^(m-1) xi(s) ds = tr(A^m - B^m)", xi.moment(m), target,
                                    tol.moment * std::pow(norm, m) * cfg.algebra.total_trace(), CheckKind::equality,
                                    {{"m", m}}));
    }
  }

  if (check("positivity_window")) {
    const auto supp = xi.support();
    if (!ordered) {
      out.notes.push_back("positivity_window: pair is not ordered, check skipped");
    } else if (!supp && !cfg.window) {
      out.notes.push_back("positivity_window: xi vanishes, check skipped");
    } else {
      const auto [wa, wb] = cfg.window ? *cfg.window : std::make_pair(supp->first, 0.5 * (supp->first + supp->second));
      guarded("positivity_window.nonnegative", "int xi h'_{a,b,alpha} >= 0", [&] {
        const auto r = positivity_window_check(xi, wa, wb, cfg.window_alphas, ordered);
        const double worst = r.values.empty() ? 0.0 : *std::min_element(r.values.begin(), r.values.end());
        const json meta{{"a", wa}, {"b", wb}, {"alphas", r.alphas}, {"values", r.values}};
        reports.push_back(make_report("positivity_window.nonnegative", "int xi h'_{a,b,alpha} >= 0", -worst, 0.0,
                                      1e-9, CheckKind::inequality, meta));
        const double amin = *std::min_element(r.alphas.begin(), r.alphas.end());
        reports.push_back(make_report("positivity_window.limit", "int xi h'_{a,b,alpha} -> int_a^b xi as alpha -> 0",
                                      r.limit_estimate, r.window_integral, 2.0 * amin * xi.linf_norm() + 1e-9,
                                      CheckKind::equality, meta));
      });
    }
  }

  if (check("integrability_scaling")) {
    guarded("integrability_scaling.bound", "|alpha int h_alpha' xi| <= ||h_1||_W1 ||A - B||_1", [&] {
      const auto r = integrability_scaling_check(xi, schatten_norm(v, 1.0), v.trace(), cfg.scaling_alphas);
      double worst = 0.0;
      for (double x : r.values) worst = std::max(worst, std::fabs(x));
      const json meta{{"alphas", r.alphas}, {"values", r.values}, {"reach", r.reach},
                      {"seminorm_estimate", r.seminorm_estimate}};
      reports.push_back(make_report("integrability_scaling.bound",
                                    "|alpha int h_alpha' xi| <= ||h_1||_W1 ||A - B||_1", worst, r.bound,
                                    1e-9 * (1.0 + r.bound), CheckKind::inequality, meta));
      if (r.asserted) {
        reports.push_back(make_report("integrability_scaling.limit", "alpha int h_alpha' xi -> tr(A - B)",
                                      r.values.back(), r.target, tol.scaling * (1.0 + std::fabs(r.target)),
                                      CheckKind::equality, meta));
      } else {
        out.notes.push_back("integrability_scaling: largest alpha below 1e3 * reach, limit not asserted");
      }
    });
  }

  if (check("truncation")) {
    if (!ordered) {
      out.notes.push_back("truncation: pair is not ordered, check skipped");
    } else {
      guarded("truncation.limit", "||xi_{B+D_r,B} - xi_{A,B}||_1 -> 0", [&] {
        auto ranks = cfg.truncation_ranks;
        if (ranks.empty()) {
          const std::size_t rv = operator_rank(v);
          for (std::size_t r = 0; r <= rv; ++r) ranks.push_back(r);
          if (rv < cfg.algebra.total_dimension()) ranks.push_back(cfg.algebra.total_dimension());
        }
        const auto rows = ssf_truncation_sequence(a, b, ranks);
        const double vn = schatten_norm(v, 1.0);
        for (const auto& row : rows) {
          const json meta{{"rank", row.rank}};
          reports.push_back(make_report("truncation.norm_identity", "||xi_{B+D,B}||_1 = ||D||_1", row.xi_norm,
                                        row.d_norm, 1e-9 * (1.0 + row.d_norm), CheckKind::equality, meta));
          reports.push_back(make_report("truncation.xi_error", "||xi_{B+D,B} - xi_{A,B}||_1 <= ||V - D||_1",
                                        row.xi_error, row.d_error, 1e-9 * (1.0 + vn), CheckKind::inequality, meta));
        }
        reports.push_back(make_report("truncation.limit", "||xi_{B+D_r,B} - xi_{A,B}||_1 -> 0", rows.back().xi_error,
                                      0.0, 1e-9 * (1.0 + vn), CheckKind::equality, {{"rank", rows.back().rank}}));
      });
    }
  }

  if (check("approximation") && replicate == 0) {
    for (const auto& f : cfg.functions) {
      guarded("approximation.decreasing", "||f - f_n||_W1 -> 0", [&] {
        std::vector<double> d;
        for (int n : cfg.approximation_orders) d.push_back(w1_distance(f, approximate_in_w1(f, n)));
        const json meta{{"function", f.label()}, {"orders", cfg.approximation_orders}, {"distances", d}};
        for (std::size_t i = 1; i < d.size(); ++i) {
          reports.push_back(make_report("approximation.decreasing", "||f - f_n||_W1 -> 0", d[i], d[i - 1],
                                        1e-12, CheckKind::inequality, meta));
        }
        if (d.size() == 1) {
          reports.push_back(make_report("approximation.decreasing", "||f - f_n||_W1 -> 0", d[0], d[0], 0.0,
                                        CheckKind::inequality, meta));
        }
      });
    }
  }
  return out;
}

std::vector<std::pair<const CaseResult*, const VerificationReport*>> merged_reports(
    const std::vector<CaseResult>& cases) {
  std::vector<std::pair<const CaseResult*, const VerificationReport*>> all;
  for (const auto& c : cases) {
    for (const auto& r : c.reports) all.emplace_back(&c, &r);
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    if (x.second->name != y.second->name) return x.second->name < y.second->name;
    if (x.first->seed != y.first->seed) return x.first->seed < y.first->seed;
    return x.first->index < y.first->index;
  });
  return all;
}

std::string summary_table(const std::vector<CaseResult>& cases, const std::string& title) {
  struct Row {
    std::size_t passed = 0;
    std::size_t failed = 0;
    double worst = 0.0;  // largest |left - right| / tolerance (equality) or excess ratio
  };
  std::map<std::string, Row> rows;
  for (const auto& [c, r] : merged_reports(cases)) {
    auto& row = rows[r->name];
    (r->pass ? row.passed : row.failed) += 1;
    double ratio;
    if (std::isnan(r->left) || std::isnan(r->right)) {
      ratio = std::numeric_limits<double>::infinity();
    } else if (r->kind == CheckKind::equality) {
      const double gap = std::fabs(r->left - r->right);
      ratio = r->tolerance > 0 ? gap / r->tolerance : (gap == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    } else {
      const double excess = std::max(0.0, r->left - r->right);
      ratio = r->tolerance > 0 ? excess / r->tolerance : (excess == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
    row.worst = std::max(row.worst, ratio);
  }
  std::ostringstream os;
  os << title << "\n";
  os << std::left << std::setw(34) << "check" << std::right << std::setw(8) << "pass" << std::setw(8) << "fail"
     << std::setw(14) << "worst/tol" << "\n";
  os << std::string(64, '-') << "\n";
  std::size_t p = 0;
  std::size_t f = 0;
  for (const auto& [name, row] : rows) {
    std::ostringstream w;
    w << std::setprecision(3) << std::scientific << row.worst;
    os << std::left << std::setw(34) << name << std::right << std::setw(8) << row.passed << std::setw(8) << row.failed
       << std::setw(14) << w.str() << "\n";
    p += row.passed;
    f += row.failed;
  }
  os << std::string(64, '-') << "\n";
  os << std::left << std::setw(34) << "total" << std::right << std::setw(8) << p << std::setw(8) << f << "\n";
  return os.str();
}

RunManifest run_experiment(ExperimentConfig cfg, const RunOptions& opts) {
  RunManifest m;
  m.version = kVersion;
  m.config_hash = sha256_hex(cfg.raw.dump());
  std::optional<std::filesystem::path> out_dir = opts.out;
  if (!out_dir && cfg.output_dir) out_dir = std::filesystem::path(*cfg.output_dir);

  if (opts.seed_override && !out_dir) {
    const auto s = static_cast<std::uint64_t>(*opts.seed_override);
    if (cfg.op.randomized()) cfg.op.seed = s;
    if (cfg.perturbation.randomized()) cfg.perturbation.seed = s + 1;
    m.seed_override_applied = true;
  }

  std::vector<SeminormResult> seminorms;
  if (selected(cfg.checks, "widom")) {
    for (const auto& f : cfg.functions) seminorms.push_back(w1_seminorm(f));
  }

  m.cases.resize(cfg.replicates);
  std::vector<std::exception_ptr> errors(cfg.replicates);
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.replicates; i = next++) {
      try {
        m.cases[i] = run_case(cfg, i, seminorms);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      if (opts.log) {
        std::lock_guard lock(log_mu);
        *opts.log << "case " << i << " done\n";
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(cfg.replicates)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  m.outcomes = json::object();
  for (const auto& [c, r] : merged_reports(m.cases)) {
    auto& o = m.outcomes[r->name];
    if (o.is_null()) o = {{"pass", 0}, {"fail", 0}};
    o[r->pass ? "pass" : "fail"] = o[r->pass ? "pass" : "fail"].get<std::size_t>() + 1;
    ++m.total_checks;
    if (!r->pass) ++m.failed_checks;
  }
  m.summary = summary_table(m.cases, cfg.name);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
      write_text(*out_dir / name, text);
      written.push_back(name);
    };
    for (const auto& c : m.cases) {
      for (const auto& [stem, xi] : c.shifts) {
        emit(stem + ".csv", xi.xi.to_csv());
        emit(stem + ".json", shift_sidecar(xi).dump(2) + "\n");
        const std::string svg = stem + ".svg";
        emit_plot(xi.xi, *out_dir / svg, cfg.name + ": " + stem);
        written.push_back(svg);
      }
    }
    std::string lines;
    for (const auto& [c, r] : merged_reports(m.cases)) {
      auto j = to_json(*r);
      j["case"] = c->index;
      j["seed"] = c->seed;
      lines += j.dump() + "\n";
    }
    emit("reports.jsonl", lines);
    std::string notes;
    for (const auto& c : m.cases) {
      for (const auto& n : c.notes) notes += "case " + std::to_string(c.index) + ": " + n + "\n";
    }
    emit("summary.txt", m.summary + (notes.empty() ? "" : "\nnotes\n" + notes));
    emit("config.json", cfg.raw.dump(2) + "\n");

    std::sort(written.begin(), written.end());
    json files = json::array();
    for (const auto& f : written) {
      const auto h = sha256_file(*out_dir / f);
      m.files.emplace_back(f, h);
      files.push_back({{"path", f}, {"sha256", h}});
    }
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream stamp;
    stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    const json manifest{{"name", cfg.name},
                        {"version", m.version},
                        {"config_hash", m.config_hash},
                        {"generated_at", stamp.str()},
                        {"replicates", cfg.replicates},
                        {"seed_override", {{"requested", opts.seed_override ? json(*opts.seed_override) : json(nullptr)},
                                           {"applied", m.seed_override_applied}}},
                        {"total_checks", m.total_checks},
                        {"failed_checks", m.failed_checks},
                        {"outcomes", m.outcomes},
                        {"files", files}};
    write_text(*out_dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return m;
}

}  // namespace ssf
