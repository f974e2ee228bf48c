#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bml/corpus.hpp"
#include "bml/littlewood_paley.hpp"

namespace bml {

/// One evaluated inequality instance. The constant on the right is taken as 1,
/// so ratio = lhs / rhs is the smallest constant that makes this row hold.
struct EstimateRow {
  std::string id;
  int variant = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::size_t grid_n = 0;
};

double safe_ratio(double lhs, double rhs);

struct EstimateReport {
  std::vector<EstimateRow> rows;
  double fitted_constant = 0.0;  ///< max ratio over rows
};

EstimateReport summarize(std::vector<EstimateRow> rows);

/// Product estimates for divergence-free v and scalar theta, with parameters
/// s and p:
///   1: ||v.grad th||_{B^-s_{p,inf}}  vs (||v||_2 + ||grad v||_2) weighted_sup(th, s, p)
///      (s in ]0,1[, p in [1, inf])
///   2: ||v.grad th||_{B^s_{p,inf}}   vs ||v||_{2p} ||th||_{B^{1+s}_{2p,inf}}
///                                      + ||v||_{B^s_{2p,inf}} ||grad th||_{2p}
///      (s in ]0,1[, p in [1, 2])
///   3: ||v.grad v||_{B^s_{p,inf}}    vs ||grad v||_{B^s_{p,inf}} ||v||_inf
///                                      + ||v||_{B^s_{p,inf}} ||grad v||_inf
///      (s > 0, p in [1, inf]; theta unused)
/// Vector and matrix valued norms use the pointwise Euclidean magnitude.
EstimateRow product_estimate(const FieldPair& pair, int variant, double s, double p,
                             const DyadicPartition& partition);

EstimateReport verify_product_estimate(std::span<const FieldPair> corpus, int variant, double s,
                                       double p);

/// Cut-off level N of the log-interpolation argument (d = 2 by default):
///   N = 2                                  if B <= 2 L1,
///   N = floor(log2(B / L1) / a) + 1        otherwise, a = 2 + d - s - d/p,
/// clamped to N >= 2.
int log_interp_level(double besov, double l1, double s, double p, int d = 2);

struct LogInterpResult {
  double lhs = 0.0;          ///< weighted_sup(theta, s, p)
  double rhs = 0.0;          ///< interpolation bound with C = 1
  double ratio = 0.0;
  int level = 0;             ///< N
  double l1 = 0.0;
  double besov = 0.0;        ///< ||theta||_{B^{2-s}_{p,inf}}
  double split_bound = 0.0;  ///< 2^{N(1+d-s-d/p)} sqrt(N) L1 + 2^{-N} sqrt(N) B
};

LogInterpResult log_interp_check(const RealField& theta, double s, double p);
LogInterpResult log_interp_check(const RealField& theta, double s, double p,
                                 const DyadicPartition& partition);

/// Forcing sampled at time t (same grid as the initial datum).
using Forcing = std::function<RealField(double)>;

struct HeatSmoothingResult {
  double lhs = 0.0;  ///< max_t ||u(t)||_{B^s_{p,inf}}
  double rhs = 0.0;  ///< ||u0||_{B^s_{p,inf}} + (1+T) max_t ||f(t)||_{B^{s-2}_{p,inf}}
  double ratio = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
  RealField final_state;
};

/// Integrating-factor weights for u' = -lambda u + f with f linear on [0, tau]:
/// u(tau) = e^{-lambda tau} u(0) + phi1 f(0) + phi2 (f(tau) - f(0)).
struct ExpWeights {
  double decay;
  double phi1;
  double phi2;
};
ExpWeights exp_weights(double lambda, double tau);

/// Solves u_t - Delta u = f exactly for forcing piecewise linear between the
/// `steps` + 1 sample times of [0, T].
HeatSmoothingResult heat_smoothing_check(const RealField& u0, const Forcing& forcing, double s,
                                         double p, double T, std::size_t steps);

}  // namespace bml
