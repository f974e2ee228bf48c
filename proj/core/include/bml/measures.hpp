#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bml/geometry.hpp"
#include "bml/grid.hpp"
#include "bml/velocity.hpp"

namespace bml {

struct Atom {
  Vec2 position;
  double weight = 0.0;
};

/// Finite nonnegative combination of Dirac masses. Zero-weight atoms are kept
/// so that indices stay stable under transport.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  void add(Vec2 position, double weight);
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  std::vector<Vec2> positions() const;
  void set_positions(std::span<const Vec2> positions);

  friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b);

 private:
  std::vector<Atom> atoms_;
};

double total_variation(const AtomicMeasure& mu);
/// max |x| over atoms (0 for the empty measure).
double support_radius(const AtomicMeasure& mu);

/// Integral of exp(-1/(1-|x|^2)) over the unit disk.
inline constexpr double kMollifierMass = 0.466512393178330068879556171897;

/// Normalised bump: exp(-1/(1-|x|^2)) / kMollifierMass on |x| < 1, else 0.
double mollifier(Vec2 x);

struct MollifiedDensity {
  AtomicMeasure source;
  int n = 1;
  RealField field;
};

/// sum_i w_i n^2 phi(n (x - x_i)) on the periodic grid. Each atom's stencil
/// is rescaled so that its discrete integral equals w_i exactly. Throws
/// DomainError if the radius 1/n spans fewer than 3 cells.
MollifiedDensity mollify(const AtomicMeasure& mu, int n, const Grid& g);

/// Bounded-Lipschitz distance sup { int f d(mu - nu) : |f| <= 1, Lip f <= 1 }.
///
/// Only the values of f at the atoms matter: any assignment obeying the two
/// constraints on the atom set extends to the plane (McShane extension
/// min_i (f_i + |x - x_i|) clipped to [-1, 1] keeps both bounds), so the
/// supremum equals the finite linear program over atom values.
double bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

struct TransportTrace {
  std::vector<double> times;
  std::vector<double> support;
  /// Running R0 + sum_steps dt * max stage speed at the atoms.
  std::vector<double> support_bound;
};

/// Pushes atoms along v with classical RK4 over [t0, t1] using steps of at
/// most dt. Weights are copied unchanged. If the timeline lives on a periodic
/// box, atoms must stay within 7/8 of the half-length.
AtomicMeasure transport_atoms(const AtomicMeasure& mu0, const VelocityTimeline& v, double t0,
                              double t1, double dt, TransportTrace* trace = nullptr);

/// Pseudo-spectral solution of rho_t + v . grad rho = 0 with RK4 steps and a
/// dealiased advection product. Requires dt * max|v| <= 0.5 * spacing.
RealField eulerian_advect_density(const RealField& rho0, const VelocityTimeline& v, double t0,
                                  double T, double dt);

/// CSV with header "# atomic-measure v1" followed by "x,y,weight" rows.
void write_measure_csv(std::ostream& os, const AtomicMeasure& mu);
void write_measure_csv(const std::filesystem::path& path, const AtomicMeasure& mu);
AtomicMeasure read_measure_csv(std::istream& is);
AtomicMeasure read_measure_csv(const std::filesystem::path& path);

}  // namespace bml
