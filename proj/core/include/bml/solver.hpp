#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "bml/grid.hpp"
#include "bml/measures.hpp"

namespace bml {

/// Temperature, vorticity and the source atoms at time t. The velocity is
/// always derived from omega by Biot-Savart.
struct SolverState {
  double t = 0.0;
  RealField theta;
  RealField omega;
  AtomicMeasure atoms;
};

struct StepConfig {
  double dt = 1e-3;
  int mollify_n = 4;
  double cfl_cap = 0.5;
  int max_halvings = 8;
  /// Diagnostic mode: drop every transport term and keep atoms fixed.
  bool freeze_velocity = false;
};

struct StepReport {
  double dt = 0.0;               ///< requested step
  std::size_t substeps = 1;      ///< 2^halvings
  double max_speed = 0.0;        ///< grid max |v| at the start of the step
  double max_atom_speed = 0.0;   ///< max |v| at the atoms over all stages
};

/// Advances (theta, omega) by dt for
///   theta_t = -v.grad theta + Delta theta + mu^(n)
///   omega_t = -v.grad omega + Delta omega + d1 theta
/// with the third-order exponential Runge-Kutta scheme of Cox and Matthews
/// (diffusion exact, advection and forcing explicit, 2/3-rule products). The
/// atoms ride the same stages with the matching Kutta weights, and the
/// forcing of each stage is mollified at that stage's atom positions.
/// The step is split into 2^k equal substeps when dt * max|v| exceeds
/// cfl_cap * spacing; NumericalAbort after max_halvings or on non-finite
/// values (the state is left untouched).
StepReport step(SolverState& state, const StepConfig& cfg);

/// One row of diagnostics.csv.
struct DiagnosticsRow {
  double t = 0.0;
  double tv_mu = 0.0;
  double support_radius = 0.0;
  double theta_min = 0.0;
  double theta_L1 = 0.0;
  double theta_L2 = 0.0;
  double theta_Besov = 0.0;  ///< ||theta||_{B^{2-sigma}_{4/(4-sigma), inf}}
  double v_L2 = 0.0;
  double omega_L2 = 0.0;
  double grad_omega_L2 = 0.0;
  double energy_ineq_margin = 0.0;
  double L1_identity_residual = 0.0;
};

/// Column names of diagnostics.csv, in order.
const std::vector<std::string>& diagnostics_columns();
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows);

/// Per-state quantities used by the monitors.
struct StateNorms {
  double theta_integral = 0.0;
  double theta_L1 = 0.0;
  double theta_L2 = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double omega_L2 = 0.0;
  double grad_omega_L2 = 0.0;
  double v_L2 = 0.0;
  /// ||theta + d1 omega||^2 + ||d2 omega||^2, the exact energy margin.
  double energy_margin_exact = 0.0;
};
StateNorms state_norms(const SolverState& s);

/// |int theta(t) - int theta0 - t TV| / (int theta0 + t TV + 1).
double mass_identity_residual(double theta_integral, double theta0_integral, double tv, double t);

/// Trapezoidal margin of d/dt ||omega||^2 + ||grad omega||^2 <= ||theta||^2
/// between two consecutive states.
double energy_margin(const StateNorms& before, const StateNorms& after, double dt);

/// Pressure with zero mean from
///   grad p = grad (-Delta)^{-1} div(v.grad v) - grad d2 (-Delta)^{-1} theta.
RealField recover_pressure(const RealField& theta, const RealField& omega);

/// L2 norm of v_t + v.grad v - Delta v + grad p - (theta - mean theta) e2 at
/// `mid`, with v_t from the central difference of prev and next.
double momentum_residual(const SolverState& prev, const SolverState& mid, const SolverState& next);

struct RunSettings {
  double T = 1.0;
  StepConfig step;
  double sigma = 0.5;
  /// Snapshot cadence in steps (0 disables snapshots).
  std::size_t cadence = 0;
  /// Directory for snapshots; empty disables file output.
  std::filesystem::path output_dir;
  /// Store atom measures at every cadence point (also without output_dir).
  bool keep_atom_history = false;
  /// When false only t, tv_mu and support_radius are filled in each row.
  bool full_diagnostics = true;
};

struct RunResult {
  SolverState final_state;
  std::vector<DiagnosticsRow> rows;
  std::vector<double> support_bound;  ///< R0 + sum dt * max atom speed, per row
  /// ||theta + d1 omega||^2 + ||d2 omega||^2 per row (full diagnostics only).
  std::vector<double> exact_margin;
  std::vector<std::pair<double, AtomicMeasure>> atom_history;
  double max_atom_speed = 0.0;
  std::size_t steps = 0;
};

using StepObserver = std::function<void(const SolverState& before, const SolverState& after,
                                        const StepReport& report)>;

/// Runs to T in equal steps of at most cfg.step.dt. Rejects negative theta0.
RunResult run(SolverState initial, const RunSettings& settings, const StepObserver& observer = {});

/// Distances between two final states (the finer one is resampled onto the
/// coarser grid for the field norms).
struct StateDistance {
  double bl = 0.0;
  double theta_L2 = 0.0;
  double omega_L2 = 0.0;
};
StateDistance state_distance(const SolverState& a, const SolverState& b);

}  // namespace bml
