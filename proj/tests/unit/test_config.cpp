#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bml/config.hpp"
#include "bml/manifest.hpp"
#include "json.hpp"

using namespace bml;

namespace {

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError for: " << text);
  throw;
}

}  // namespace

TEST_CASE("defaults and comments") {
  const auto c = parse_config("# nothing\n\n   # indented comment\n");
  CHECK(c == RunConfig{});
  CHECK(c.grid_n == 256);
  CHECK(c.mollify_n == 4);
  CHECK(c.verify_suites == std::vector<std::string>{"all"});
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("values, strings and trailing comments") {
  const auto c = parse_config(
      "grid.n = 64   # small\n"
      "grid.L=4\r\n"
      "time.T = 0.25\n"
      "time.dt = 1e-3\n"
      "mollify.n = 2\n"
      "scenario = two_atom\n"
      "output.dir = \"out dir/with \\\"quotes\\\"\"  # c\n"
      "verify.suites = partition, bony\n"
      "seed = 7\n");
  CHECK(c.grid_n == 64);
  CHECK(c.grid_L == 4.0);
  CHECK(c.time_dt == 1e-3);
  CHECK(c.scenario == "two_atom");
  CHECK(c.output_dir == "out dir/with \"quotes\"");
  CHECK(c.verify_suites == std::vector<std::string>{"partition", "bony"});
  CHECK(c.seed == 7);
}

TEST_CASE("serialize round trip") {
  RunConfig c;
  c.grid_n = 128;
  c.grid_L = 3.3;
  c.time_T = 0.1;
  c.time_dt = 1.0 / 3.0 * 1e-2;
  c.mollify_n = 3;
  c.sigma = 0.75;
  c.scenario = "rotation_test";
  c.output_dir = "a \"b\" c";
  c.verify_suites = {"partition", "measures"};
  c.inject_fault = "bony_sign_flip";
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("range errors name the key, line and value column") {
  const auto e = parse_error("scenario = single_atom\ngrid.n = 100\n");
  CHECK(e.key() == "grid.n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 10);
  CHECK(std::string(e.what()).find("grid.n") != std::string::npos);

  CHECK(parse_error("grid.n = 8\n").key() == "grid.n");
  CHECK(parse_error("grid.n = 8192\n").key() == "grid.n");
  CHECK(parse_error("grid.L = -1\n").key() == "grid.L");
  CHECK(parse_error("time.T = 0\n").key() == "time.T");
  CHECK(parse_error("time.T = 1\ntime.dt = 2\n").key() == "time.dt");
  CHECK(parse_error("mollify.n = 0\n").key() == "mollify.n");
  // radius 1/n must cover at least three cells: n = 16, L = 8 gives h = 1.
  CHECK(parse_error("grid.n = 16\nmollify.n = 1\n").key() == "mollify.n");
  CHECK(parse_error("sigma = 2\n").key() == "sigma");
  CHECK(parse_error("scenario = vortex_street\n").key() == "scenario");
  CHECK(parse_error("output.dir = \"\"\n").key() == "output.dir");
  CHECK(parse_error("verify.suites = partition, nope\n").key() == "verify.suites");
  CHECK(parse_error("verify.inject_fault = everything\n").key() == "verify.inject_fault");
}

TEST_CASE("syntax errors") {
  auto e = parse_error("grid.n 64\n");
  CHECK(e.line() == 1);
  CHECK(std::string(e.what()).find("expected 'key = value'") != std::string::npos);

  e = parse_error("\n\n  grid.n = 64\n  grid.n = 32\n");
  CHECK(e.line() == 4);
  CHECK(e.column() == 3);
  CHECK(std::string(e.what()).find("duplicate") != std::string::npos);

  e = parse_error("grid.m = 64\n");
  CHECK(e.key() == "grid.m");
  CHECK(std::string(e.what()).find("unknown key") != std::string::npos);

  CHECK(std::string(parse_error("grid n = 64\n").what()).find("malformed key") != std::string::npos);
  CHECK(std::string(parse_error("output.dir = \"abc\n").what()).find("unterminated") != std::string::npos);
  CHECK(parse_error("output.dir = \"abc\" x\n").column() == 20);
  CHECK(parse_error("time.T = fast\n").column() == 10);
  CHECK(parse_error("grid.n = -64\n").key() == "grid.n");
  CHECK(parse_error("time.T = 1e999\n").key() == "time.T");
}

TEST_CASE("empty suite list is allowed") {
  const auto c = parse_config("verify.suites = \"\"\n");
  CHECK(c.verify_suites.empty());
  CHECK(parse_config("verify.suites = all\n").verify_suites == std::vector<std::string>{"all"});
}

TEST_CASE("load_config reports missing files") {
  CHECK_THROWS_AS(load_config("/nonexistent/bml.cfg"), ConfigError);
}

TEST_CASE("fnv1a test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("manifest json and atomic writes") {
  Manifest m;
  m.command = "verify";
  m.config_hash = fnv1a_hex("x");
  m.started = utc_timestamp();
  m.finished = m.started;
  SuiteResult a;
  a.name = "alpha";
  a.check("margin", 0.5, 1.0);
  a.check("nan", std::nan(""), 1.0);
  SuiteResult b;
  b.name = "beta";
  b.check("floor", 2.0, 1.0, false);
  b.require("flag", true);
  CHECK_FALSE(a.passed);
  CHECK(b.passed);
  m.suites = {b};
  CHECK(m.passed());
  m.suites.push_back(a);
  CHECK_FALSE(m.passed());
  m.artifacts = {{"csv", "verify.csv"}};

  const auto j = nlohmann::json::parse(manifest_json(m));
  CHECK(j["command"] == "verify");
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["passed"] == false);
  CHECK(j["suites"].size() == 2);
  CHECK(j["suites"][1]["metrics"][1]["value"] == "nan");
  CHECK(j["suites"][0]["metrics"][0]["kind"] == "min");
  CHECK(j["artifacts"][0]["path"] == "verify.csv");
  CHECK(m.started.size() == 20);
  CHECK(m.started.back() == 'Z');

  const auto dir = std::filesystem::temp_directory_path() / "bml_manifest_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_manifest(dir / "manifest.json", m);
  write_file_atomic(dir / "note.txt", "first");
  write_file_atomic(dir / "note.txt", "second");
  std::ifstream in(dir / "note.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "note.txt.tmp"));
  CHECK(nlohmann::json::parse(std::ifstream(dir / "manifest.json"))["command"] == "verify");
  std::filesystem::remove_all(dir);
}
