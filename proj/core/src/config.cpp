#include "bml/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "bml/scenarios.hpp"
#include "bml/suites.hpp"

namespace bml {

ConfigError::ConfigError(std::size_t line, std::size_t column, std::string key,
                         const std::string& message)
    : DomainError((line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": "
                        : std::string()) +
                  (key.empty() ? "" : key + ": ") + message),
      line_(line),
      column_(column),
      key_(std::move(key)) {}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
  std::size_t key_col;
  std::size_t value_col;
};

double parse_double(const Entry& e) {
  const char* b = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(b, &end);
  if (end == b || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(e.line, e.value_col, e.key, "expected a finite number, got '" + e.value + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const Entry& e) {
  if (e.value.empty() || e.value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(e.line, e.value_col, e.key, "expected a nonnegative integer, got '" + e.value + "'");
  }
  errno = 0;
  const auto v = std::strtoull(e.value.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError(e.line, e.value_col, e.key, "integer out of range");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

void check_range(const RunConfig& c, const std::vector<Entry>* entries) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    if (entries) {
      for (const auto& e : *entries) {
        if (e.key == key) throw ConfigError(e.line, e.value_col, key, msg);
      }
    }
    throw ConfigError(0, 0, key, msg);
  };
  if (!is_power_of_two(c.grid_n) || c.grid_n < 16 || c.grid_n > 4096) {
    fail("grid.n", "must be a power of two in [16, 4096], got " + std::to_string(c.grid_n));
  }
  if (!(c.grid_L > 0.0)) fail("grid.L", "must be positive");
  if (!(c.time_T > 0.0)) fail("time.T", "must be positive");
  if (!(c.time_dt > 0.0) || c.time_dt > c.time_T) fail("time.dt", "must lie in ]0, time.T]");
  if (c.mollify_n < 1) fail("mollify.n", "must be >= 1");
  const double h = 2.0 * c.grid_L / static_cast<double>(c.grid_n);
  if (1.0 / c.mollify_n < 3.0 * h) {
    fail("mollify.n", "mollifier radius 1/" + std::to_string(c.mollify_n) +
                          " spans fewer than 3 cells; increase grid.n or decrease grid.L");
  }
  if (!(c.sigma > 0.0 && c.sigma < 2.0)) fail("sigma", "must lie in ]0, 2[");
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end()) {
    fail("scenario", "unknown scenario '" + c.scenario + "'");
  }
  if (c.output_dir.empty()) fail("output.dir", "must not be empty");
  const auto& suites = suite_names();
  for (const auto& s : c.verify_suites) {
    if (s != "all" && std::find(suites.begin(), suites.end(), s) == suites.end()) {
      fail("verify.suites", "unknown suite '" + s + "'");
    }
  }
  if (c.inject_fault != "none" && c.inject_fault != "bony_sign_flip") {
    fail("verify.inject_fault", "must be 'none' or 'bony_sign_flip'");
  }
}

std::string quote_if_needed(const std::string& s) {
  const bool plain = !s.empty() && s.find_first_of(" \t#\"") == std::string::npos;
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void validate_config(const RunConfig& c) { check_range(c, nullptr); }

RunConfig parse_config(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] == '#') continue;
    const std::size_t key_col = pos + 1;
    const std::size_t eq = line.find('=', pos);
    if (eq == std::string::npos) throw ConfigError(lineno, key_col, "", "expected 'key = value'");
    std::string key = line.substr(pos, eq - pos);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw ConfigError(lineno, key_col, key, "malformed key");
    }
    std::size_t vpos = line.find_first_not_of(" \t", eq + 1);
    std::string value;
    std::size_t value_col = (vpos == std::string::npos ? line.size() : vpos) + 1;
    if (vpos != std::string::npos && line[vpos] == '"') {
      std::size_t i = vpos + 1;
      bool closed = false;
      for (; i < line.size(); ++i) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          value += line[++i];
        } else if (line[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          value += line[i];
        }
      }
      if (!closed) throw ConfigError(lineno, value_col, key, "unterminated string");
      const std::size_t rest = line.find_first_not_of(" \t", i);
      if (rest != std::string::npos && line[rest] != '#') {
        throw ConfigError(lineno, rest + 1, key, "unexpected text after string");
      }
    } else if (vpos != std::string::npos) {
      const std::size_t hash = line.find('#', vpos);
      value = line.substr(vpos, hash == std::string::npos ? std::string::npos : hash - vpos);
      value.erase(value.find_last_not_of(" \t") + 1);
    }
    for (const auto& e : entries) {
      if (e.key == key) {
        throw ConfigError(lineno, key_col, key, "duplicate key (first set on line " +
                                                    std::to_string(e.line) + ")");
      }
    }
    entries.push_back({key, value, lineno, key_col, value_col});
  }

  RunConfig c;
  for (const auto& e : entries) {
    const auto& k = e.key;
    if (k == "grid.n") {
      c.grid_n = static_cast<std::size_t>(parse_unsigned(e));
    } else if (k == "grid.L") {
      c.grid_L = parse_double(e);
    } else if (k == "time.T") {
      c.time_T = parse_double(e);
    } else if (k == "time.dt") {
      c.time_dt = parse_double(e);
    } else if (k == "mollify.n") {
      const auto v = parse_unsigned(e);
      if (v > 1000000) throw ConfigError(e.line, e.value_col, k, "value too large");
      c.mollify_n = static_cast<int>(v);
    } else if (k == "sigma") {
      c.sigma = parse_double(e);
    } else if (k == "scenario") {
      c.scenario = e.value;
    } else if (k == "output.dir") {
      c.output_dir = e.value;
    } else if (k == "output.cadence") {
      c.output_cadence = static_cast<std::size_t>(parse_unsigned(e));
    } else if (k == "seed") {
      c.seed = parse_unsigned(e);
    } else if (k == "verify.suites") {
      c.verify_suites = split_list(e.value);
    } else if (k == "verify.inject_fault") {
      c.inject_fault = e.value;
    } else {
      throw ConfigError(e.line, e.key_col, k, "unknown key");
    }
  }
  check_range(c, &entries);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(0, 0, "", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "grid.n = " << c.grid_n << '\n'
     << "grid.L = " << format_double(c.grid_L) << '\n'
     << "time.T = " << format_double(c.time_T) << '\n'
     << "time.dt = " << format_double(c.time_dt) << '\n'
     << "mollify.n = " << c.mollify_n << '\n'
     << "sigma = " << format_double(c.sigma) << '\n'
     << "scenario = " << quote_if_needed(c.scenario) << '\n'
     << "output.dir = " << quote_if_needed(c.output_dir) << '\n'
     << "output.cadence = " << c.output_cadence << '\n'
     << "seed = " << c.seed << '\n';
  os << "verify.suites = \"";
  for (std::size_t i = 0; i < c.verify_suites.size(); ++i) os << (i ? "," : "") << c.verify_suites[i];
  os << "\"\n"
     << "verify.inject_fault = " << quote_if_needed(c.inject_fault) << '\n';
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bml
