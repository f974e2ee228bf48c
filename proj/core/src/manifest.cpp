#include "bml/manifest.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "json.hpp"

namespace bml {

bool Manifest::passed() const {
  for (const auto& s : suites) {
    if (!s.passed) return false;
  }
  return true;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string manifest_json(const Manifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["config_hash"] = m.config_hash;
  j["config_path"] = m.config_path;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["status"] = m.status;
  j["passed"] = m.passed();
  j["suites"] = nlohmann::json::array();
  for (const auto& s : m.suites) {
    nlohmann::json js;
    js["name"] = s.name;
    js["passed"] = s.passed;
    js["seconds"] = s.seconds;
    js["metrics"] = nlohmann::json::array();
    for (const auto& mt : s.metrics) {
      js["metrics"].push_back({{"name", mt.name},
                               {"value", number(mt.value)},
                               {"threshold", number(mt.threshold)},
                               {"kind", mt.upper ? "max" : "min"},
                               {"passed", mt.passed}});
    }
    js["notes"] = s.notes;
    j["suites"].push_back(std::move(js));
  }
  j["artifacts"] = nlohmann::json::array();
  for (const auto& [kind, path] : m.artifacts) j["artifacts"].push_back({{"kind", kind}, {"path", path}});
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  write_file_atomic(path, manifest_json(m));
}

}  // namespace bml
