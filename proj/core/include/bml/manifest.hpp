#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bml/suites.hpp"

namespace bml {

inline constexpr const char* kToolVersion = "0.3.0";

/// Run record written next to the outputs of every subcommand.
struct Manifest {
  std::string command;
  std::string config_hash;  ///< fnv1a_hex of the config file bytes
  std::string config_path;
  std::string tool_version = kToolVersion;
  std::string started;      ///< UTC, ISO 8601
  std::string finished;
  std::vector<SuiteResult> suites;
  std::vector<std::pair<std::string, std::string>> artifacts;  ///< (kind, relative path)
  std::string status = "ok";

  /// Conjunction of the suite results.
  bool passed() const;
};

std::string utc_timestamp();
std::string manifest_json(const Manifest& m);
/// Writes to a temporary file in the same directory, then renames.
void write_manifest(const std::filesystem::path& path, const Manifest& m);
/// Same temp-then-rename protocol for arbitrary text.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bml
