#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bml/error.hpp"

namespace bml {

/// Run configuration. Text grammar, one entry per line:
///
///   # comment
///   key = value          # trailing comment
///   output.dir = "path with spaces"
///
/// Keys: grid.n, grid.L, time.T, time.dt, mollify.n, sigma, scenario,
/// output.dir, output.cadence, seed, verify.suites, verify.inject_fault.
/// Missing keys keep their defaults; unknown or repeated keys are errors.
struct RunConfig {
  std::size_t grid_n = 256;
  double grid_L = 8.0;
  double time_T = 1.0;
  double time_dt = 1e-3;
  int mollify_n = 4;
  double sigma = 0.5;
  std::string scenario = "single_atom";
  std::string output_dir = "bml-out";
  std::size_t output_cadence = 100;
  std::uint64_t seed = 20240611;
  /// Suite names; {"all"} expands to every registered suite.
  std::vector<std::string> verify_suites = {"all"};
  std::string inject_fault = "none";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public DomainError {
 public:
  ConfigError(std::size_t line, std::size_t column, std::string key, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string key_;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);
/// Range checks shared by the parser and programmatic callers.
void validate_config(const RunConfig& c);

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace bml
