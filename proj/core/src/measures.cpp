#include "bml/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "bml/error.hpp"
#include "bml/fft.hpp"
#include "bml/simplex.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

namespace {

void check_atom(Vec2 x, double w) {
  if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw DomainError("atom position not finite");
  if (!std::isfinite(w) || w < 0.0) throw DomainError("atom weight must be finite and >= 0");
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) check_atom(a.position, a.weight);
}

void AtomicMeasure::add(Vec2 position, double weight) {
  check_atom(position, weight);
  atoms_.push_back({position, weight});
}

std::vector<Vec2> AtomicMeasure::positions() const {
  std::vector<Vec2> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.position);
  return out;
}

void AtomicMeasure::set_positions(std::span<const Vec2> positions) {
  if (positions.size() != atoms_.size()) throw DomainError("set_positions: size mismatch");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    check_atom(positions[i], atoms_[i].weight);
    atoms_[i].position = positions[i];
  }
}

bool operator==(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.atoms_[i].position == b.atoms_[i].position) || a.atoms_[i].weight != b.atoms_[i].weight) {
      return false;
    }
  }
  return true;
}

double total_variation(const AtomicMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight;
  return s;
}

double support_radius(const AtomicMeasure& mu) {
  double r = 0.0;
  for (const auto& a : mu.atoms()) r = std::max(r, norm(a.position));
  return r;
}

double mollifier(Vec2 x) {
  const double r2 = x.x * x.x + x.y * x.y;
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2)) / kMollifierMass;
}

MollifiedDensity mollify(const AtomicMeasure& mu, int n, const Grid& g) {
  if (n < 1) throw DomainError("mollify: n must be >= 1");
  const double radius = 1.0 / n;
  const double h = g.spacing();
  if (radius < 3.0 * h) {
    throw DomainError("mollify: radius 1/" + std::to_string(n) +
                      " spans fewer than 3 grid cells; refine the grid");
  }
  if (2.0 * radius >= 2.0 * g.half_length()) throw DomainError("mollify: radius exceeds the box");
  const double L = g.half_length();
  const auto N = static_cast<long>(g.n());
  RealField field(g, "mu_density");
  const double scale = static_cast<double>(n) * n;
  std::vector<std::pair<std::size_t, double>> stencil;
  for (const auto& atom : mu.atoms()) {
    if (atom.weight == 0.0) continue;
    const Vec2 x = atom.position;
    const long i0 = static_cast<long>(std::ceil((x.x - radius + L) / h));
    const long i1 = static_cast<long>(std::floor((x.x + radius + L) / h));
    const long j0 = static_cast<long>(std::ceil((x.y - radius + L) / h));
    const long j1 = static_cast<long>(std::floor((x.y + radius + L) / h));
    stencil.clear();
    double sum = 0.0;
    for (long j = j0; j <= j1; ++j) {
      const double dy = (-L + static_cast<double>(j) * h - x.y) * n;
      for (long i = i0; i <= i1; ++i) {
        const double dx = (-L + static_cast<double>(i) * h - x.x) * n;
        const double val = scale * mollifier({dx, dy});
        if (val == 0.0) continue;
        const auto wi = static_cast<std::size_t>(((i % N) + N) % N);
        const auto wj = static_cast<std::size_t>(((j % N) + N) % N);
        stencil.emplace_back(wj * g.n() + wi, val);
        sum += val;
      }
    }
    if (!(sum > 0.0)) throw InternalError("mollify: empty stencil");
    const double norm_factor = atom.weight / (sum * g.cell_area());
    for (const auto& [k, val] : stencil) field[k] += val * norm_factor;
  }
  return MollifiedDensity{mu, n, std::move(field)};
}

double bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  // Merge coincident points; the ordered map fixes a canonical ordering.
  std::map<std::pair<double, double>, std::pair<double, double>> merged;
  for (const auto& a : mu.atoms()) merged[{a.position.x, a.position.y}].first += a.weight;
  for (const auto& a : nu.atoms()) merged[{a.position.x, a.position.y}].second += a.weight;

  std::vector<Vec2> pts;
  std::vector<double> c;
  for (const auto& [key, w] : merged) {
    const double net = w.first - w.second;
    if (net == 0.0) continue;
    pts.push_back({key.first, key.second});
    c.push_back(net);
  }
  if (c.empty()) return 0.0;
  // The value is invariant under c -> -c (f -> -f), so fix the sign of the
  // first coefficient; this makes d(mu, nu) and d(nu, mu) the same program.
  if (c.front() < 0.0) {
    for (auto& x : c) x = -x;
  }

  // Shift g = f + 1 in [0, 2] so the origin is feasible.
  const std::size_t m = pts.size();
  LinearProgram lp;
  lp.objective = c;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(m, 0.0);
    row[i] = 1.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(2.0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double d = norm(pts[i] - pts[j]);
      if (d >= 2.0) continue;
      std::vector<double> row(m, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(d);
    }
  }
  const auto sol = solve_lp(lp);
  double shift = 0.0;
  for (double x : c) shift += x;
  return std::max(0.0, sol.value - shift);
}

AtomicMeasure transport_atoms(const AtomicMeasure& mu0, const VelocityTimeline& v, double t0,
                              double t1, double dt, TransportTrace* trace) {
  if (!(dt > 0.0)) throw DomainError("transport_atoms: dt must be positive");
  if (!(t1 >= t0)) throw DomainError("transport_atoms: t1 must be >= t0");
  AtomicMeasure mu = mu0;
  auto x = mu.positions();
  const std::size_t na = x.size();
  const auto box = v.box();
  auto check_margin = [&](const std::vector<Vec2>& pos) {
    if (!box) return;
    const double lim = 0.875 * box->half_length();
    for (const auto& p : pos) {
      if (std::abs(p.x) > lim || std::abs(p.y) > lim) {
        throw DomainError("transport_atoms: atom left the box safety margin; enlarge grid.L");
      }
    }
  };
  double bound = support_radius(mu0);
  if (trace && trace->times.empty()) {
    trace->times.push_back(t0);
    trace->support.push_back(support_radius(mu0));
    trace->support_bound.push_back(bound);
  } else if (trace) {
    bound = trace->support_bound.back();
  }
  if (t1 == t0 || na == 0) return mu;

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((t1 - t0) / dt - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(steps);
  std::vector<Vec2> k1(na), k2(na), k3(na), k4(na), tmp(na);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    v.sample(t, x, k1);
    for (std::size_t i = 0; i < na; ++i) tmp[i] = x[i] + (0.5 * h) * k1[i];
    v.sample(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < na; ++i) tmp[i] = x[i] + (0.5 * h) * k2[i];
    v.sample(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < na; ++i) tmp[i] = x[i] + h * k3[i];
    v.sample(t + h, tmp, k4);
    double speed = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      speed = std::max({speed, norm(k1[i]), norm(k2[i]), norm(k3[i]), norm(k4[i])});
    }
    check_margin(x);
    bound += h * speed;
    if (trace) {
      mu.set_positions(x);
      trace->times.push_back(t + h);
      trace->support.push_back(support_radius(mu));
      trace->support_bound.push_back(bound);
    }
  }
  mu.set_positions(x);
  return mu;
}

RealField eulerian_advect_density(const RealField& rho0, const VelocityTimeline& v, double t0,
                                  double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw DomainError("eulerian_advect_density: bad time range");
  const Grid& g = rho0.grid();
  auto rho = forward_transform(rho0);
  if (T == 0.0) return rho0;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt - 1e-9)));
  const double h = T / static_cast<double>(steps);

  struct Stage {
    SpectralField v1, v2;
  };
  auto velocity_at = [&](double t) {
    auto [a, b] = v.on_grid(t, g);
    double vmax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) vmax = std::max(vmax, std::hypot(a[k], b[k]));
    if (h * vmax > 0.5 * g.spacing()) {
      throw DomainError("eulerian_advect_density: CFL violated (dt * max|v| > 0.5 * cell)");
    }
    return Stage{forward_transform(a), forward_transform(b)};
  };
  auto rhs = [&](const SpectralField& r, const Stage& s) {
    auto out = product_dealiased(s.v1, spectral_derivative(r, 0));
    out += product_dealiased(s.v2, spectral_derivative(r, 1));
    out *= -1.0;
    return out;
  };

  Stage s0 = velocity_at(t0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + static_cast<double>(n) * h;
    const Stage sh = velocity_at(t + 0.5 * h);
    Stage s1 = velocity_at(t + h);
    const auto k1 = rhs(rho, s0);
    const auto k2 = rhs(rho + (0.5 * h) * k1, sh);
    const auto k3 = rhs(rho + (0.5 * h) * k2, sh);
    const auto k4 = rhs(rho + h * k3, s1);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s0 = std::move(s1);
  }
  return inverse_transform(rho, rho0.label());
}

void write_measure_csv(std::ostream& os, const AtomicMeasure& mu) {
  os << "# atomic-measure v1\nx,y,weight\n" << std::setprecision(17);
  for (const auto& a : mu.atoms()) {
    os << a.position.x << ',' << a.position.y << ',' << a.weight << '\n';
  }
}

void write_measure_csv(const std::filesystem::path& path, const AtomicMeasure& mu) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_measure_csv(os, mu);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

AtomicMeasure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# atomic-measure v1", 0) != 0) {
    throw DomainError("measure CSV: missing '# atomic-measure v1' header");
  }
  AtomicMeasure mu;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line == "x,y,weight") continue;
    std::istringstream ss(line);
    double vals[3];
    for (int k = 0; k < 3; ++k) {
      std::string cell;
      if (!std::getline(ss, cell, k < 2 ? ',' : '\n')) {
        throw DomainError("measure CSV line " + std::to_string(lineno) + ": expected x,y,weight");
      }
      try {
        std::size_t used = 0;
        vals[k] = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw DomainError("measure CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    mu.add({vals[0], vals[1]}, vals[2]);
  }
  return mu;
}

AtomicMeasure read_measure_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_measure_csv(is);
}

}  // namespace bml
