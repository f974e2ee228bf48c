#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bml/geometry.hpp"
#include "bml/grid.hpp"
#include "bml/measures.hpp"
#include "bml/velocity.hpp"

namespace bml {

/// Positions X(t, y) and gradients G = grad_y X(t, y) for a set of seeds y.
struct FlowMap {
  double t0 = 0.0;
  double time = 0.0;
  std::vector<Vec2> seeds;
  std::vector<Vec2> positions;
  std::vector<Mat2> grads;
  /// Per seed: RK4-weighted sum of h ||J(X) G|| over the stages. Bounds ||G - I||.
  std::vector<double> smallness;
  /// sum over steps of h * max(grid sup ||grad v||, stage sup at the seeds).
  double grad_log_bound = 0.0;
};

/// X = y, G = I at time t0.
FlowMap identity_flow(std::vector<Vec2> seeds, double t0);

/// Advances the flow map to t1 with classical RK4 on (X, G), where
/// dG/dt = J(t, X) G.
void advance_flow(FlowMap& fm, const VelocityTimeline& v, double t1, double dt);

FlowMap integrate_flow(const VelocityTimeline& v, std::vector<Vec2> seeds, double t0, double T,
                       double dt);

/// Flow from `first.t0` to `second.time`, where second's seeds are first's
/// positions: X = X2, G = G2 * G1.
FlowMap compose(const FlowMap& first, const FlowMap& second);

struct GradientBound {
  double lhs = 0.0;    ///< max over seeds of ||G||
  double bound = 0.0;  ///< exp(grad_log_bound)
  double margin = 0.0; ///< bound - lhs
  bool holds = false;  ///< lhs <= bound (1 + 1e-6)
};

GradientBound gradient_bound_check(const FlowMap& fm);

struct InverseGradient {
  std::vector<Mat2> A;
  int series_terms = 0;
  double smallness = 0.0;                ///< max over seeds
  std::vector<double> residual;          ///< ||A G - I||
  std::vector<double> residual_bound;    ///< s^{K+1} / (1 - s)
  std::vector<double> deviation;         ///< ||A - I||
  bool within_bounds = false;            ///< residual <= bound and ||A - I|| <= 2 s
};

/// A = sum_{k=0}^{K} (-1)^k (G - I)^k. Throws DomainError if some seed's
/// smallness exceeds 1/2.
InverseGradient neumann_inverse(const FlowMap& fm, int terms = 32);

/// Grid nodes with index stride `stride` inside |x|_inf <= fraction * L.
std::vector<Vec2> seed_lattice(const Grid& g, std::size_t stride, double fraction);

/// max_i |transported_i - X(atom_i)| where the atoms of mu0 occupy
/// fm.seeds[first_seed ..]. Throws if the flow map seeds do not match.
double lagrangian_source_check(const AtomicMeasure& mu0, const AtomicMeasure& transported,
                               const FlowMap& fm, std::size_t first_seed);

/// CSV with header y1,y2,X1,X2,g11,g12,g21,g22,detg.
void write_flowmap_csv(std::ostream& os, const FlowMap& fm);
void write_flowmap_csv(const std::filesystem::path& path, const FlowMap& fm);

}  // namespace bml
