// Runs the acceptance criteria as suites and prints one line per criterion.
// Optional arguments select criteria by number, e.g. `acceptance 1 6`.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "bml/suites.hpp"

namespace {

struct Criterion {
  int id;
  const char* suite;
  const char* title;
  double limit_minutes;
};

const std::vector<Criterion> kCriteria = {
    {1, "partition", "partition of unity and reconstruction", 1},
    {2, "bony", "Bony identity", 2},
    {3, "product_estimate", "product-estimate corpus", 5},
    {4, "log_interp", "log-interpolation", 2},
    {5, "heat_smoothing", "heat smoothing", 2},
    {6, "measures", "measure invariants", 2},
    {7, "solver", "solver identities", 10},
    {8, "flowmap", "Lagrangian suite", 3},
    {9, "ladder", "approximation ladder", 15},
    {10, "stability", "stability and determinism", 15},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all_passed = true;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    bml::SuiteOptions opt;
    opt.log = &std::cerr;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      const auto r = bml::run_suite(c.suite, opt);
      ok = r.passed;
      for (const auto& m : r.metrics) {
        if (!m.passed) detail += " [" + m.name + "=" + std::to_string(m.value) + "]";
      }
    } catch (const std::exception& e) {
      detail = std::string(" [error: ") + e.what() + "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > 60.0 * c.limit_minutes) {
      ok = false;
      detail += " [runtime over limit]";
    }
    all_passed = all_passed && ok;
    std::printf("criterion %d %s  %-40s %8.1f s (limit %.0f min)%s\n", c.id, ok ? "PASS" : "FAIL",
                c.title, secs, c.limit_minutes, detail.c_str());
    std::fflush(stdout);
  }
  return all_passed ? 0 : 1;
}
