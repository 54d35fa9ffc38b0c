#pragma once

#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ssf/algebra.hpp"
#include "ssf/shift.hpp"
#include "ssf/verify.hpp"
#include "ssf/w1_function.hpp"

namespace ssf {

/// Invalid user input; `field` is the JSON path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// {"family": ..., "params": {...}}; sampled functions carry "grid" and
/// "values" (and optionally "derivatives").
nlohmann::json to_json(const W1Function& f);
/// Strict: unknown keys, missing parameters and a non-uniform sampled grid
/// raise ConfigError naming `where`.
W1Function w1_from_json(const nlohmann::json& j, const std::string& where = "function");

nlohmann::json to_json(const VerificationReport& r);

/// {provenance, pair_hash, integral, l1_norm, linf_norm, support, breakpoints}
nlohmann::json shift_sidecar(const ShiftFunction& xi);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& p);

/// Writes `text` to `p`, throwing std::runtime_error on failure.
void write_text(const std::filesystem::path& p, std::string_view text);
std::string read_text(const std::filesystem::path& p);

}  // namespace ssf
