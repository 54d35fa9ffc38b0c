#include "ssf/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace ssf {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + "." + key, "unknown field");
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key, "missing");
  if (!obj[key].is_number()) throw ConfigError(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key, "missing");
  const auto& a = obj[key];
  if (!a.is_array()) throw ConfigError(where + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw ConfigError(where + "." + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json to_json(const W1Function& f) {
  json params;
  if (const auto* g = f.as_gaussian()) {
    params = {{"center", g->center}, {"width", g->width}, {"amplitude", g->amplitude}};
  } else if (const auto* p = f.as_polynomial_window()) {
    params = {{"coefficients", p->coefficients}, {"a", p->a}, {"b", p->b}};
  } else if (const auto* h = f.as_h_alpha()) {
    params = {{"alpha", h->alpha}};
  } else if (const auto* s = f.as_sampled()) {
    std::vector<double> grid;
    for (std::size_t i = 0; i < s->values.size(); ++i) grid.push_back(s->start + s->step * static_cast<double>(i));
    params = {{"grid", grid}, {"values", s->values}};
    if (s->explicit_derivatives) params["derivatives"] = s->derivatives;
  }
  return {{"family", std::string(f.family_name())}, {"params", params}};
}

W1Function w1_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"family", "params"}, where);
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError(where + ".family", "missing family name");
  if (!j.contains("params")) throw ConfigError(where + ".params", "missing");
  const std::string fam = j["family"].get<std::string>();
  const auto& p = j["params"];
  const std::string pw = where + ".params";
  try {
    if (fam == "gaussian_primitive") {
      reject_unknown(p, {"center", "width", "amplitude"}, pw);
      return W1Function::gaussian_primitive(number(p, "center", pw), number(p, "width", pw),
                                            number_or(p, "amplitude", 1.0, pw));
    }
    if (fam == "polynomial_window") {
      reject_unknown(p, {"coefficients", "a", "b"}, pw);
      return W1Function::polynomial_window(numbers(p, "coefficients", pw), number(p, "a", pw), number(p, "b", pw));
    }
    if (fam == "h_alpha_profile") {
      reject_unknown(p, {"alpha"}, pw);
      return W1Function::h_alpha_profile(number(p, "alpha", pw));
    }
    if (fam == "sampled") {
      reject_unknown(p, {"grid", "values", "derivatives"}, pw);
      const auto grid = numbers(p, "grid", pw);
      auto values = numbers(p, "values", pw);
      if (grid.size() != values.size()) throw ConfigError(pw + ".values", "length differs from grid");
      if (grid.size() < 2) throw ConfigError(pw + ".grid", "at least two points required");
      const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expect = grid.front() + step * static_cast<double>(i);
        if (std::fabs(grid[i] - expect) > 1e-9 * std::max(1.0, std::fabs(step) * static_cast<double>(grid.size()))) {
          throw ConfigError(pw + ".grid", "spacing must be uniform");
        }
      }
      std::vector<double> derivs;
      if (p.contains("derivatives")) derivs = numbers(p, "derivatives", pw);
      return W1Function::sampled(grid.front(), step, std::move(values), std::move(derivs));
    }
  } catch (const std::domain_error& e) {
    throw ConfigError(pw, e.what());
  }
  throw ConfigError(where + ".family", "unknown family '" + fam + "'");
}

json to_json(const VerificationReport& r) {
  return {{"name", r.name},
          {"anchor", r.anchor},
          {"left", r.left},
          {"right", r.right},
          {"tolerance", r.tolerance},
          {"kind", r.kind == CheckKind::equality ? "equality" : "inequality"},
          {"pass", r.pass},
          {"metadata", r.metadata}};
}

json shift_sidecar(const ShiftFunction& xi) {
  json supp = nullptr;
  if (const auto s = xi.xi.support()) supp = {s->first, s->second};
  return {{"provenance", std::string(provenance_name(xi.provenance))},
          {"pair_hash", xi.pair_id},
          {"integral", xi.xi.integral()},
          {"l1_norm", xi.xi.l1_norm()},
          {"linf_norm", xi.xi.linf_norm()},
          {"support", supp},
          {"breakpoints", xi.xi.breakpoints().size()}};
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_text(p)); }

void write_text(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace ssf
