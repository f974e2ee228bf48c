#include "bml/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "bml/error.hpp"

namespace bml {

FlowMap identity_flow(std::vector<Vec2> seeds, double t0) {
  FlowMap fm;
  fm.t0 = t0;
  fm.time = t0;
  fm.positions = seeds;
  fm.grads.assign(seeds.size(), Mat2::identity());
  fm.smallness.assign(seeds.size(), 0.0);
  fm.seeds = std::move(seeds);
  return fm;
}

void advance_flow(FlowMap& fm, const VelocityTimeline& v, double t1, double dt) {
  if (!(dt > 0.0)) throw DomainError("advance_flow: dt must be positive");
  if (!(t1 >= fm.time)) throw DomainError("advance_flow: cannot integrate backwards");
  if (t1 == fm.time) return;
  const std::size_t ns = fm.seeds.size();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((t1 - fm.time) / dt - 1e-9)));
  const double h = (t1 - fm.time) / static_cast<double>(steps);
  const auto box = v.box();

  std::vector<Vec2> xs(ns), vel(ns);
  std::vector<Mat2> jac(ns);
  std::vector<Vec2> kx[4];
  std::vector<Mat2> kg[4];
  for (int s = 0; s < 4; ++s) {
    kx[s].resize(ns);
    kg[s].resize(ns);
  }
  std::vector<double> stage_norm(ns);
  const double c[4] = {0.0, 0.5, 0.5, 1.0};
  const double w[4] = {1.0, 2.0, 2.0, 1.0};

  for (std::size_t step = 0; step < steps; ++step) {
    const double t = fm.time;
    double stage_sup = 0.0;
    double grid_sup = 0.0;
    std::fill(stage_norm.begin(), stage_norm.end(), 0.0);
    for (int s = 0; s < 4; ++s) {
      std::vector<Mat2> gs(ns);
      for (std::size_t i = 0; i < ns; ++i) {
        if (s == 0) {
          xs[i] = fm.positions[i];
          gs[i] = fm.grads[i];
        } else {
          xs[i] = fm.positions[i] + (c[s] * h) * kx[s - 1][i];
          gs[i] = fm.grads[i] + (c[s] * h) * kg[s - 1][i];
        }
      }
      v.sample(t + c[s] * h, xs, vel, jac);
      grid_sup = std::max(grid_sup, v.gradient_sup(t + c[s] * h));
      for (std::size_t i = 0; i < ns; ++i) {
        kx[s][i] = vel[i];
        kg[s][i] = jac[i] * gs[i];
        stage_norm[i] += w[s] * operator_norm(kg[s][i]);
        stage_sup = std::max(stage_sup, operator_norm(jac[i]));
      }
    }
    for (std::size_t i = 0; i < ns; ++i) {
      fm.positions[i] += (h / 6.0) * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
      fm.grads[i] += (h / 6.0) * (kg[0][i] + 2.0 * kg[1][i] + 2.0 * kg[2][i] + kg[3][i]);
      fm.smallness[i] += (h / 6.0) * stage_norm[i];
    }
    fm.grad_log_bound += h * std::max(grid_sup, stage_sup);
    fm.time = t + h;
    if (box) {
      const double lim = 0.875 * box->half_length();
      for (const auto& p : fm.positions) {
        if (std::abs(p.x) > lim || std::abs(p.y) > lim) {
          throw DomainError("advance_flow: seed left the box safety margin");
        }
      }
    }
  }
  fm.time = t1;
}

FlowMap integrate_flow(const VelocityTimeline& v, std::vector<Vec2> seeds, double t0, double T,
                       double dt) {
  auto fm = identity_flow(std::move(seeds), t0);
  advance_flow(fm, v, t0 + T, dt);
  return fm;
}

FlowMap compose(const FlowMap& first, const FlowMap& second) {
  if (first.positions.size() != second.seeds.size()) {
    throw DomainError("compose: seed count mismatch");
  }
  FlowMap out = second;
  out.t0 = first.t0;
  out.seeds = first.seeds;
  for (std::size_t i = 0; i < out.grads.size(); ++i) {
    out.grads[i] = second.grads[i] * first.grads[i];
    out.smallness[i] = first.smallness[i] + second.smallness[i];
  }
  out.grad_log_bound = first.grad_log_bound + second.grad_log_bound;
  return out;
}

GradientBound gradient_bound_check(const FlowMap& fm) {
  GradientBound r;
  for (const auto& G : fm.grads) r.lhs = std::max(r.lhs, operator_norm(G));
  if (fm.grads.empty()) r.lhs = 1.0;
  r.bound = std::exp(fm.grad_log_bound);
  r.margin = r.bound - r.lhs;
  r.holds = r.lhs <= r.bound * (1.0 + 1e-6);
  return r;
}

InverseGradient neumann_inverse(const FlowMap& fm, int terms) {
  if (terms < 0) throw DomainError("neumann_inverse: terms must be >= 0");
  InverseGradient out;
  out.series_terms = terms;
  for (double s : fm.smallness) out.smallness = std::max(out.smallness, s);
  if (out.smallness > 0.5) {
    throw DomainError("neumann_inverse: integral of |grad v| is " + std::to_string(out.smallness) +
                      " > 1/2; shorten the time window");
  }
  out.within_bounds = true;
  const Mat2 I = Mat2::identity();
  for (std::size_t i = 0; i < fm.grads.size(); ++i) {
    const Mat2 E = fm.grads[i] - I;
    // Horner form of sum_{k=0}^{K} (-E)^k.
    Mat2 A = I;
    for (int k = 0; k < terms; ++k) A = I - E * A;
    const double s = fm.smallness[i];
    const double res = operator_norm(A * fm.grads[i] - I);
    const double bound = std::pow(s, terms + 1) / (1.0 - s);
    const double dev = operator_norm(A - I);
    // Roundoff floor for the residual: a few ulps of the matrix entries.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + operator_norm(fm.grads[i]));
    if (!(res <= bound + floor) || !(dev <= 2.0 * s + floor)) out.within_bounds = false;
    out.A.push_back(A);
    out.residual.push_back(res);
    out.residual_bound.push_back(bound);
    out.deviation.push_back(dev);
  }
  return out;
}

std::vector<Vec2> seed_lattice(const Grid& g, std::size_t stride, double fraction) {
  if (stride == 0) throw DomainError("seed_lattice: stride must be positive");
  const double lim = fraction * g.half_length();
  std::vector<Vec2> out;
  for (std::size_t j = 0; j < g.n(); j += stride) {
    for (std::size_t i = 0; i < g.n(); i += stride) {
      const Vec2 y{g.coord(i), g.coord(j)};
      if (std::abs(y.x) <= lim && std::abs(y.y) <= lim) out.push_back(y);
    }
  }
  return out;
}

double lagrangian_source_check(const AtomicMeasure& mu0, const AtomicMeasure& transported,
                               const FlowMap& fm, std::size_t first_seed) {
  const std::size_t na = mu0.size();
  if (transported.size() != na || first_seed + na > fm.seeds.size()) {
    throw DomainError("lagrangian_source_check: atom and seed sets do not match");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    if (!(fm.seeds[first_seed + i] == mu0.atoms()[i].position)) {
      throw DomainError("lagrangian_source_check: flow map was not seeded at the atoms");
    }
    if (transported.atoms()[i].weight != mu0.atoms()[i].weight) {
      throw DomainError("lagrangian_source_check: atom weights changed");
    }
    worst = std::max(worst, norm(transported.atoms()[i].position - fm.positions[first_seed + i]));
  }
  return worst;
}

void write_flowmap_csv(std::ostream& os, const FlowMap& fm) {
  os << "y1,y2,X1,X2,g11,g12,g21,g22,detg\n" << std::setprecision(17);
  for (std::size_t i = 0; i < fm.seeds.size(); ++i) {
    const auto& G = fm.grads[i];
    os << fm.seeds[i].x << ',' << fm.seeds[i].y << ',' << fm.positions[i].x << ','
       << fm.positions[i].y << ',' << G.a[0] << ',' << G.a[1] << ',' << G.a[2] << ',' << G.a[3]
       << ',' << det(G) << '\n';
  }
}

void write_flowmap_csv(const std::filesystem::path& path, const FlowMap& fm) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_flowmap_csv(os, fm);
}

}  // namespace bml
