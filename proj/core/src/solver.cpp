#include "bml/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "bml/error.hpp"
#include "bml/fft.hpp"
#include "bml/littlewood_paley.hpp"
#include "bml/snapshot_io.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

namespace {

using complex = std::complex<double>;

/// phi_1, phi_2, phi_3 of the exponential integrators at z <= 0.
void phi_functions(double z, double& p1, double& p2, double& p3) {
  if (std::abs(z) < 0.5) {
    // phi_k(z) = sum_j z^j / (j + k)!
    double term1 = 1.0, term2 = 0.5, term3 = 1.0 / 6.0;
    p1 = p2 = p3 = 0.0;
    for (int j = 0; j < 24; ++j) {
      p1 += term1;
      p2 += term2;
      p3 += term3;
      term1 *= z / (j + 2);
      term2 *= z / (j + 3);
      term3 *= z / (j + 4);
    }
    return;
  }
  const double em = std::expm1(z);
  p1 = em / z;
  p2 = (em - z) / (z * z);
  p3 = (em - z - 0.5 * z * z) / (z * z * z);
}

struct EtdTable {
  std::size_t n = 0;
  double L = 0.0;
  double h = 0.0;
  std::vector<double> e_half, e_full, a1, b1, w1, w2, w3;
};

const EtdTable& etd_table(const Grid& g, double h) {
  thread_local EtdTable tab;
  if (tab.n == g.n() && tab.L == g.half_length() && tab.h == h) return tab;
  tab.n = g.n();
  tab.L = g.half_length();
  tab.h = h;
  const std::size_t sz = g.spectral_size();
  for (auto* v : {&tab.e_half, &tab.e_full, &tab.a1, &tab.b1, &tab.w1, &tab.w2, &tab.w3}) {
    v->assign(sz, 0.0);
  }
  const std::size_t nc = g.spectral_cols();
  for (std::size_t r = 0; r < g.n(); ++r) {
    const double k2 = g.wavenumber(g.row_mode(r));
    for (std::size_t c = 0; c < nc; ++c) {
      const double k1 = g.wavenumber(g.col_mode(c));
      const double lam = k1 * k1 + k2 * k2;
      const std::size_t i = r * nc + c;
      double p1, p2, p3, q1, q2, q3;
      phi_functions(-lam * h, p1, p2, p3);
      phi_functions(-lam * h * 0.5, q1, q2, q3);
      tab.e_half[i] = std::exp(-0.5 * lam * h);
      tab.e_full[i] = std::exp(-lam * h);
      tab.a1[i] = 0.5 * h * q1;
      tab.b1[i] = h * p1;
      tab.w1[i] = h * (p1 - 3.0 * p2 + 4.0 * p3);
      tab.w2[i] = h * (4.0 * p2 - 8.0 * p3);
      tab.w3[i] = h * (4.0 * p3 - p2);
    }
  }
  return tab;
}

struct Tendency {
  SpectralField theta;
  SpectralField omega;
  std::vector<Vec2> atom_velocity;
};

RealField pointwise_dot(const RealField& a1, const RealField& b1, const RealField& a2,
                        const RealField& b2) {
  RealField out(a1.grid());
  for (std::size_t k = 0; k < out.values().size(); ++k) out[k] = a1[k] * b1[k] + a2[k] * b2[k];
  return out;
}

Tendency tendency(const SpectralField& th, const SpectralField& om, const AtomicMeasure& atoms,
                  const StepConfig& cfg) {
  const Grid& g = th.grid();
  Tendency out{forward_transform(mollify(atoms, cfg.mollify_n, g).field), spectral_derivative(th, 0),
               std::vector<Vec2>(atoms.size())};
  if (cfg.freeze_velocity) return out;

  const auto [v1h, v2h] = biot_savart_spectral(om);
  const auto v1 = inverse_transform(dealias(v1h));
  const auto v2 = inverse_transform(dealias(v2h));
  const auto thd = dealias(th);
  const auto omd = dealias(om);
  const auto adv_th = dealias(forward_transform(pointwise_dot(
      v1, inverse_transform(spectral_derivative(thd, 0)), v2,
      inverse_transform(spectral_derivative(thd, 1)))));
  const auto adv_om = dealias(forward_transform(pointwise_dot(
      v1, inverse_transform(spectral_derivative(omd, 0)), v2,
      inverse_transform(spectral_derivative(omd, 1)))));
  out.theta -= adv_th;
  out.omega -= adv_om;

  if (!atoms.empty()) {
    const auto pos = atoms.positions();
    const SpectralField* fields[2] = {&v1h, &v2h};
    std::vector<double> vals(2 * pos.size());
    eval_spectral_at_points(fields, pos, vals);
    for (std::size_t i = 0; i < pos.size(); ++i) out.atom_velocity[i] = {vals[i], vals[pos.size() + i]};
  }
  return out;
}

double grid_speed(const SpectralField& om) {
  const auto [v1h, v2h] = biot_savart_spectral(om);
  const auto v1 = inverse_transform(v1h);
  const auto v2 = inverse_transform(v2h);
  double m = 0.0;
  for (std::size_t k = 0; k < v1.values().size(); ++k) m = std::max(m, std::hypot(v1[k], v2[k]));
  return m;
}

void check_atoms_in_box(const AtomicMeasure& atoms, const Grid& g) {
  const double lim = 0.875 * g.half_length();
  for (const auto& a : atoms.atoms()) {
    if (std::abs(a.position.x) > lim || std::abs(a.position.y) > lim) {
      throw DomainError("solver: atom left the box safety margin; enlarge grid.L");
    }
  }
}

AtomicMeasure displaced(const AtomicMeasure& atoms, const std::vector<Vec2>& base,
                        std::initializer_list<std::pair<double, const std::vector<Vec2>*>> terms) {
  AtomicMeasure out = atoms;
  std::vector<Vec2> pos = base;
  for (const auto& [c, v] : terms) {
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] += c * (*v)[i];
  }
  out.set_positions(pos);
  return out;
}

/// One exponential RK3 substep of size h; returns max atom speed over stages.
double substep(SpectralField& th, SpectralField& om, AtomicMeasure& atoms, double h,
               const StepConfig& cfg) {
  const auto& tab = etd_table(th.grid(), h);
  const std::size_t sz = tab.e_full.size();
  const auto x0 = atoms.positions();

  const auto n1 = tendency(th, om, atoms, cfg);
  SpectralField th2(th.grid()), om2(th.grid());
  for (std::size_t i = 0; i < sz; ++i) {
    th2.coeffs()[i] = tab.e_half[i] * th.coeffs()[i] + tab.a1[i] * n1.theta.coeffs()[i];
    om2.coeffs()[i] = tab.e_half[i] * om.coeffs()[i] + tab.a1[i] * n1.omega.coeffs()[i];
  }
  const auto atoms2 = displaced(atoms, x0, {{0.5 * h, &n1.atom_velocity}});

  const auto n2 = tendency(th2, om2, atoms2, cfg);
  SpectralField th3(th.grid()), om3(th.grid());
  for (std::size_t i = 0; i < sz; ++i) {
    th3.coeffs()[i] = tab.e_full[i] * th.coeffs()[i] +
                      tab.b1[i] * (2.0 * n2.theta.coeffs()[i] - n1.theta.coeffs()[i]);
    om3.coeffs()[i] = tab.e_full[i] * om.coeffs()[i] +
                      tab.b1[i] * (2.0 * n2.omega.coeffs()[i] - n1.omega.coeffs()[i]);
  }
  const auto atoms3 =
      displaced(atoms, x0, {{2.0 * h, &n2.atom_velocity}, {-h, &n1.atom_velocity}});

  const auto n3 = tendency(th3, om3, atoms3, cfg);
  for (std::size_t i = 0; i < sz; ++i) {
    th.coeffs()[i] = tab.e_full[i] * th.coeffs()[i] + tab.w1[i] * n1.theta.coeffs()[i] +
                     tab.w2[i] * n2.theta.coeffs()[i] + tab.w3[i] * n3.theta.coeffs()[i];
    om.coeffs()[i] = tab.e_full[i] * om.coeffs()[i] + tab.w1[i] * n1.omega.coeffs()[i] +
                     tab.w2[i] * n2.omega.coeffs()[i] + tab.w3[i] * n3.omega.coeffs()[i];
  }
  std::vector<Vec2> x1 = x0;
  double speed = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    x1[i] += (h / 6.0) * (n1.atom_velocity[i] + 4.0 * n2.atom_velocity[i] + n3.atom_velocity[i]);
    speed = std::max({speed, norm(n1.atom_velocity[i]), norm(n2.atom_velocity[i]),
                      norm(n3.atom_velocity[i])});
  }
  atoms.set_positions(x1);
  return speed;
}

}  // namespace

StepReport step(SolverState& state, const StepConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw DomainError("step: dt must be positive");
  const Grid& g = state.theta.grid();
  require_same_grid(g, state.omega.grid(), "step");
  if (!state.theta.all_finite() || !state.omega.all_finite()) {
    throw NumericalAbort("step: non-finite state at t = " + std::to_string(state.t));
  }
  StepReport rep;
  rep.dt = cfg.dt;

  auto th = forward_transform(state.theta);
  auto om = forward_transform(state.omega);
  rep.max_speed = cfg.freeze_velocity ? 0.0 : grid_speed(om);
  int halvings = 0;
  while (cfg.dt / std::ldexp(1.0, halvings) * rep.max_speed > cfg.cfl_cap * g.spacing()) {
    if (++halvings > cfg.max_halvings) {
      throw NumericalAbort("step: CFL condition not met after " + std::to_string(cfg.max_halvings) +
                           " halvings at t = " + std::to_string(state.t));
    }
  }
  rep.substeps = std::size_t{1} << halvings;
  const double h = cfg.dt / static_cast<double>(rep.substeps);

  AtomicMeasure atoms = state.atoms;
  for (std::size_t k = 0; k < rep.substeps; ++k) {
    if (k > 0 && !cfg.freeze_velocity && h * grid_speed(om) > cfg.cfl_cap * g.spacing()) {
      throw NumericalAbort("step: CFL violated inside a substep at t = " + std::to_string(state.t));
    }
    rep.max_atom_speed = std::max(rep.max_atom_speed, substep(th, om, atoms, h, cfg));
    check_atoms_in_box(atoms, g);
  }
  auto theta = inverse_transform(th, state.theta.label());
  auto omega = inverse_transform(om, state.omega.label());
  if (!theta.all_finite() || !omega.all_finite()) {
    throw NumericalAbort("step: non-finite values at t = " + std::to_string(state.t + cfg.dt));
  }
  state.theta = std::move(theta);
  state.omega = std::move(omega);
  state.atoms = std::move(atoms);
  state.t += cfg.dt;
  return rep;
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "t",        "tv_mu",    "support_radius", "theta_min",     "theta_L1",           "theta_L2",
      "theta_Besov", "v_L2", "omega_L2",       "grad_omega_L2", "energy_ineq_margin", "L1_identity_residual"};
  return cols;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.t << ',' << r.tv_mu << ',' << r.support_radius << ',' << r.theta_min << ','
       << r.theta_L1 << ',' << r.theta_L2 << ',' << r.theta_Besov << ',' << r.v_L2 << ','
       << r.omega_L2 << ',' << r.grad_omega_L2 << ',' << r.energy_ineq_margin << ','
       << r.L1_identity_residual << '\n';
  }
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_diagnostics_csv(os, rows);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

StateNorms state_norms(const SolverState& s) {
  StateNorms n;
  n.theta_integral = integral(s.theta);
  n.theta_L1 = lp_norm(s.theta, 1.0);
  n.theta_L2 = l2_norm(s.theta);
  n.theta_min = min_value(s.theta);
  n.theta_max = *std::max_element(s.theta.values().begin(), s.theta.values().end());
  const auto th = forward_transform(s.theta);
  const auto om = forward_transform(s.omega);
  const auto d1 = spectral_derivative(om, 0);
  const auto d2 = spectral_derivative(om, 1);
  n.omega_L2 = l2_norm(om);
  n.grad_omega_L2 = std::hypot(l2_norm(d1), l2_norm(d2));
  const auto [v1, v2] = biot_savart_spectral(om);
  n.v_L2 = std::hypot(l2_norm(v1), l2_norm(v2));
  const double a = l2_norm(th + d1);
  const double b = l2_norm(d2);
  n.energy_margin_exact = a * a + b * b;
  return n;
}

double mass_identity_residual(double theta_integral, double theta0_integral, double tv, double t) {
  const double expected = theta0_integral + t * tv;
  return std::abs(theta_integral - expected) / (expected + 1.0);
}

double energy_margin(const StateNorms& before, const StateNorms& after, double dt) {
  const auto sq = [](double x) { return x * x; };
  const double theta_sq = 0.5 * (sq(before.theta_L2) + sq(after.theta_L2));
  const double grad_sq = 0.5 * (sq(before.grad_omega_L2) + sq(after.grad_omega_L2));
  const double ddt = (sq(after.omega_L2) - sq(before.omega_L2)) / dt;
  return theta_sq - ddt - grad_sq;
}

namespace {

/// Spectral (v . grad) v with 2/3-rule products.
std::pair<SpectralField, SpectralField> velocity_advection(const SpectralField& v1h,
                                                           const SpectralField& v2h) {
  const auto v1 = inverse_transform(dealias(v1h));
  const auto v2 = inverse_transform(dealias(v2h));
  auto comp = [&](const SpectralField& f) {
    const auto fd = dealias(f);
    return dealias(forward_transform(pointwise_dot(v1, inverse_transform(spectral_derivative(fd, 0)),
                                                   v2, inverse_transform(spectral_derivative(fd, 1)))));
  };
  return {comp(v1h), comp(v2h)};
}

SpectralField pressure_spectral(const SpectralField& th, const SpectralField& om) {
  const auto [v1h, v2h] = biot_savart_spectral(om);
  const auto [a1, a2] = velocity_advection(v1h, v2h);
  auto div = spectral_derivative(a1, 0) + spectral_derivative(a2, 1);
  auto p = inverse_neg_laplacian(div);
  p -= spectral_derivative(inverse_neg_laplacian(th), 1);
  return p;
}

}  // namespace

RealField recover_pressure(const RealField& theta, const RealField& omega) {
  return inverse_transform(pressure_spectral(forward_transform(theta), forward_transform(omega)), "p");
}

double momentum_residual(const SolverState& prev, const SolverState& mid, const SolverState& next) {
  const double dt2 = next.t - prev.t;
  if (!(dt2 > 0.0)) throw DomainError("momentum_residual: states must be ordered in time");
  const auto om_prev = forward_transform(prev.omega);
  const auto om_mid = forward_transform(mid.omega);
  const auto om_next = forward_transform(next.omega);
  const auto th = forward_transform(mid.theta);
  const auto [p1, p2] = biot_savart_spectral(om_prev);
  const auto [n1, n2] = biot_savart_spectral(om_next);
  const auto [v1, v2] = biot_savart_spectral(om_mid);
  const auto [a1, a2] = velocity_advection(v1, v2);
  const auto p = pressure_spectral(th, om_mid);

  SpectralField r1 = (1.0 / dt2) * (n1 - p1);
  SpectralField r2 = (1.0 / dt2) * (n2 - p2);
  r1 += a1;
  r2 += a2;
  r1 -= spectral_laplacian(v1);
  r2 -= spectral_laplacian(v2);
  r1 += spectral_derivative(p, 0);
  r2 += spectral_derivative(p, 1);
  SpectralField buoy = th;
  buoy.coeffs()[0] = 0.0;
  r2 -= buoy;
  return std::hypot(l2_norm(r1), l2_norm(r2));
}

RunResult run(SolverState initial, const RunSettings& settings, const StepObserver& observer) {
  if (!(settings.T > 0.0)) throw DomainError("run: T must be positive");
  if (!(settings.sigma > 0.0 && settings.sigma < 2.0)) throw DomainError("run: sigma must lie in ]0,2[");
  const Grid& g = initial.theta.grid();
  require_same_grid(g, initial.omega.grid(), "run");
  {
    const double mn = min_value(initial.theta);
    if (mn < -1e-14 * (1.0 + linf_norm(initial.theta))) {
      throw DomainError("run: initial temperature must be nonnegative (min = " + std::to_string(mn) + ")");
    }
  }
  check_atoms_in_box(initial.atoms, g);
  if (!settings.output_dir.empty()) std::filesystem::create_directories(settings.output_dir);

  const DyadicPartition partition(g);
  const BesovParams besov{2.0 - settings.sigma, 4.0 / (4.0 - settings.sigma), kInf};
  const double tv = total_variation(initial.atoms);
  const double theta0_int = integral(initial.theta);

  RunResult res{initial, {}, {}, {}, {}, 0.0, 0};
  auto make_row = [&](const SolverState& s, const StateNorms& n, double margin) {
    DiagnosticsRow r;
    r.t = s.t;
    r.tv_mu = total_variation(s.atoms);
    r.support_radius = support_radius(s.atoms);
    if (!settings.full_diagnostics) return r;
    r.theta_min = n.theta_min;
    r.theta_L1 = n.theta_L1;
    r.theta_L2 = n.theta_L2;
    r.theta_Besov = besov_norm(s.theta, besov, partition);
    r.v_L2 = n.v_L2;
    r.omega_L2 = n.omega_L2;
    r.grad_omega_L2 = n.grad_omega_L2;
    r.energy_ineq_margin = margin;
    r.L1_identity_residual = mass_identity_residual(n.theta_integral, theta0_int, tv, s.t - initial.t);
    return r;
  };
  auto emit = [&](const SolverState& s, std::size_t index) {
    if (settings.cadence == 0 || index % settings.cadence != 0) return;
    if (settings.keep_atom_history) res.atom_history.emplace_back(s.t, s.atoms);
    if (settings.output_dir.empty()) return;
    char tag[32];
    std::snprintf(tag, sizeof tag, "%06zu", index);
    write_snapshot(settings.output_dir / ("theta_" + std::string(tag) + ".bmlf"), s.theta, s.t);
    write_snapshot(settings.output_dir / ("omega_" + std::string(tag) + ".bmlf"), s.omega, s.t);
    write_measure_csv(settings.output_dir / ("atoms_" + std::string(tag) + ".csv"), s.atoms);
  };

  const auto steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(settings.T / settings.step.dt - 1e-9)));
  StepConfig cfg = settings.step;
  cfg.dt = settings.T / static_cast<double>(steps);
  const double t0 = initial.t;

  SolverState state = std::move(initial);
  const auto norms_of = [&](const SolverState& s) {
    return settings.full_diagnostics ? state_norms(s) : StateNorms{};
  };
  auto norms = norms_of(state);
  res.rows.push_back(make_row(state, norms, norms.energy_margin_exact));
  double bound = support_radius(state.atoms);
  res.support_bound.push_back(bound);
  res.exact_margin.push_back(norms.energy_margin_exact);
  emit(state, 0);

  for (std::size_t k = 1; k <= steps; ++k) {
    std::optional<SolverState> before;
    if (observer) before = state;
    const auto rep = step(state, cfg);
    state.t = t0 + static_cast<double>(k) * cfg.dt;
    bound += cfg.dt * rep.max_atom_speed;
    res.max_atom_speed = std::max(res.max_atom_speed, rep.max_atom_speed);
    const auto next = norms_of(state);
    res.rows.push_back(make_row(state, next, energy_margin(norms, next, cfg.dt)));
    res.support_bound.push_back(bound);
    res.exact_margin.push_back(next.energy_margin_exact);
    norms = next;
    if (observer) observer(*before, state, rep);
    emit(state, k);
  }
  res.steps = steps;
  res.final_state = std::move(state);
  return res;
}

StateDistance state_distance(const SolverState& a, const SolverState& b) {
  StateDistance d;
  d.bl = bl_distance(a.atoms, b.atoms);
  const bool a_coarse = a.theta.grid().n() <= b.theta.grid().n();
  const Grid& g = a_coarse ? a.theta.grid() : b.theta.grid();
  const auto& fine = a_coarse ? b : a;
  const auto& coarse = a_coarse ? a : b;
  d.theta_L2 = l2_norm(resample(fine.theta, g) - coarse.theta);
  d.omega_L2 = l2_norm(resample(fine.omega, g) - coarse.omega);
  return d;
}

}  // namespace bml
