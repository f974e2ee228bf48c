#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bml/harmonic_checks.hpp"
#include "bml/solver.hpp"

namespace bml {

/// A measured quantity compared against a threshold. `upper` selects
/// value <= threshold, otherwise value >= threshold.
struct Metric {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = true;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
  std::vector<EstimateRow> rows;  ///< inequality rows for the verify CSV
  double seconds = 0.0;

  /// Records a metric and folds it into `passed`.
  void check(std::string metric, double value, double threshold, bool upper = true);
  void require(std::string metric, bool ok);
};

struct SuiteOptions {
  std::uint64_t seed = 20240611;
  bool flip_bony_remainder = false;
  std::ostream* log = nullptr;
};

/// Registered suite names in execution order.
const std::vector<std::string>& suite_names();
/// Suites selected by "all".
const std::vector<std::string>& default_suites();

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

// Individual suites.
SuiteResult suite_partition(const SuiteOptions& opt);
SuiteResult suite_bony(const SuiteOptions& opt);
SuiteResult suite_product_estimate(const SuiteOptions& opt);
SuiteResult suite_log_interp(const SuiteOptions& opt);
SuiteResult suite_heat_smoothing(const SuiteOptions& opt);
SuiteResult suite_measures(const SuiteOptions& opt);
SuiteResult suite_flowmap(const SuiteOptions& opt);
SuiteResult suite_solver(const SuiteOptions& opt);
SuiteResult suite_ladder(const SuiteOptions& opt);
SuiteResult suite_stability(const SuiteOptions& opt);

/// Positivity tolerance 1e-8 max(theta) + 2 T g, where g is the largest
/// undershoot of e^{s Delta} mu^(n) over s in [0, T] on the grid.
double positivity_tolerance(const AtomicMeasure& mu, int mollify_n, const Grid& g, double T,
                            double theta_max);

/// Mollification ladder: runs the same scenario for each n and compares atom
/// measures at common output times.
struct LadderSettings {
  std::vector<int> levels = {8, 16, 32, 64};
  std::size_t grid_n = 512;
  double L = 1.0;
  double T = 0.5;
  double dt = 5e-3;
  std::size_t cadence = 10;
  std::string scenario = "single_atom";
};

struct LadderRun {
  int level = 0;
  std::vector<std::pair<double, AtomicMeasure>> history;
  double max_atom_speed = 0.0;
  double total_variation = 0.0;
};

struct LadderReport {
  std::vector<LadderRun> runs;
  /// sup over output times of d(mu_n, mu_2n), one entry per consecutive pair.
  std::vector<double> cauchy;
  /// max over time pairs of d(mu(s2), mu(s1)) - TV max_speed |s2 - s1|.
  double equicontinuity_excess = 0.0;
};

LadderReport ladder_study(const LadderSettings& s);
void write_ladder_csv(const std::filesystem::path& dir, const LadderReport& r);

}  // namespace bml
