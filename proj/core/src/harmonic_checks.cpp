#include "bml/harmonic_checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bml/error.hpp"
#include "bml/fft.hpp"
#include "bml/parallel.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  if (rhs == 0.0) return std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

EstimateReport summarize(std::vector<EstimateRow> rows) {
  EstimateReport r;
  for (const auto& row : rows) r.fitted_constant = std::max(r.fitted_constant, row.ratio);
  r.rows = std::move(rows);
  return r;
}

namespace {

double vec_besov(std::span<const RealField* const> comps, double s, double p,
                 const DyadicPartition& partition) {
  std::vector<ShellDecomposition> parts;
  for (const auto* c : comps) parts.push_back(decompose(*c, partition));
  return besov_from_shell_norms(shell_lp_norms(parts, p), s, kInf);
}

double scalar_besov(const RealField& f, double s, double p, const DyadicPartition& partition) {
  return besov_from_shell_norms(shell_lp_norms(decompose(f, partition), p), s, kInf);
}

RealField advect(const RealField& v1, const RealField& v2, const RealField& f) {
  const auto [f1, f2] = gradient(f);
  auto out = product_padded(v1, f1);
  out += product_padded(v2, f2);
  return out;
}

}  // namespace

EstimateRow product_estimate(const FieldPair& pair, int variant, double s, double p,
                             const DyadicPartition& partition) {
  if (!(p >= 1.0)) throw DomainError("product_estimate: p must be >= 1");
  const auto& v1 = pair.v1;
  const auto& v2 = pair.v2;
  const auto& th = pair.theta;
  EstimateRow row{pair.id, variant, 0.0, 0.0, 0.0, th.grid().n()};

  switch (variant) {
    case 1: {
      if (!(s > 0.0 && s < 1.0)) throw DomainError("variant 1 needs s in ]0,1[");
      row.lhs = scalar_besov(advect(v1, v2, th), -s, p, partition);
      const auto [a11, a12] = gradient(v1);
      const auto [a21, a22] = gradient(v2);
      const std::array<const RealField*, 2> vc{&v1, &v2};
      const std::array<const RealField*, 4> gc{&a11, &a12, &a21, &a22};
      row.rhs = (lp_norm(vc, 2.0) + lp_norm(gc, 2.0)) * weighted_sup(th, s, p, partition);
      break;
    }
    case 2: {
      if (!(s > 0.0 && s < 1.0)) throw DomainError("variant 2 needs s in ]0,1[");
      if (!(p <= 2.0)) throw DomainError("variant 2 needs p in [1,2]");
      row.lhs = scalar_besov(advect(v1, v2, th), s, p, partition);
      const auto [t1, t2] = gradient(th);
      const std::array<const RealField*, 2> vc{&v1, &v2};
      const std::array<const RealField*, 2> tc{&t1, &t2};
      row.rhs = lp_norm(vc, 2.0 * p) * scalar_besov(th, 1.0 + s, 2.0 * p, partition) +
                vec_besov(vc, s, 2.0 * p, partition) * lp_norm(tc, 2.0 * p);
      break;
    }
    case 3: {
      if (!(s > 0.0)) throw DomainError("variant 3 needs s > 0");
      const auto w1 = advect(v1, v2, v1);
      const auto w2 = advect(v1, v2, v2);
      const std::array<const RealField*, 2> wc{&w1, &w2};
      row.lhs = vec_besov(wc, s, p, partition);
      const auto [a11, a12] = gradient(v1);
      const auto [a21, a22] = gradient(v2);
      const std::array<const RealField*, 2> vc{&v1, &v2};
      const std::array<const RealField*, 4> gc{&a11, &a12, &a21, &a22};
      row.rhs = vec_besov(gc, s, p, partition) * lp_norm(vc, kInf) +
                vec_besov(vc, s, p, partition) * lp_norm(gc, kInf);
      break;
    }
    default:
      throw DomainError("product_estimate: variant must be 1, 2 or 3");
  }
  row.ratio = safe_ratio(row.lhs, row.rhs);
  return row;
}

EstimateReport verify_product_estimate(std::span<const FieldPair> corpus, int variant, double s,
                                       double p) {
  if (corpus.empty()) return {};
  const DyadicPartition partition(corpus.front().theta.grid());
  std::vector<EstimateRow> rows(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    rows[i] = product_estimate(corpus[i], variant, s, p, partition);
  });
  return summarize(std::move(rows));
}

int log_interp_level(double besov, double l1, double s, double p, int d) {
  if (!(l1 > 0.0)) throw DomainError("log_interp_level: L1 norm must be positive");
  if (besov <= 2.0 * l1) return 2;
  const double a = 2.0 + d - s - d / p;
  // The small offset keeps exact powers of two on the closed side of floor.
  const double q = std::log2(besov / l1) / a;
  const int level = static_cast<int>(std::floor(q + 1e-12)) + 1;
  return std::max(level, 2);
}

LogInterpResult log_interp_check(const RealField& theta, double s, double p,
                                 const DyadicPartition& partition) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("log_interp_check: s must lie in ]0,1[");
  LogInterpResult r;
  r.l1 = lp_norm(theta, 1.0);
  if (!(r.l1 > 0.0)) throw DomainError("log_interp_check: theta must be nonzero");
  const auto norms = shell_lp_norms(decompose(theta, partition), p);
  r.besov = besov_from_shell_norms(norms, 2.0 - s, kInf);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const int k = static_cast<int>(i) - 1;
    r.lhs = std::max(r.lhs, std::exp2(k * (1.0 - s)) * std::sqrt(k + 2.0) * norms[i]);
  }
  const int d = 2;
  const double a = 2.0 + d - s - d / p;
  r.level = log_interp_level(r.besov, r.l1, s, p, d);
  r.rhs = std::pow(r.l1, 1.0 / a) * std::pow(r.besov, (a - 1.0) / a) *
              std::sqrt(std::log(std::exp(1.0) + r.besov / r.l1)) +
          r.l1;
  const double N = r.level;
  r.split_bound = std::exp2(N * (a - 1.0)) * std::sqrt(N) * r.l1 + std::exp2(-N) * std::sqrt(N) * r.besov;
  r.ratio = safe_ratio(r.lhs, r.rhs);
  return r;
}

LogInterpResult log_interp_check(const RealField& theta, double s, double p) {
  return log_interp_check(theta, s, p, DyadicPartition(theta.grid()));
}

ExpWeights exp_weights(double lambda, double tau) {
  const double x = lambda * tau;
  ExpWeights w{std::exp(-x), 0.0, 0.0};
  if (x < 1e-2) {
    // Taylor series; truncation error below x^6 / 720.
    const double x2 = x * x;
    w.phi1 = tau * (1.0 - x / 2.0 + x2 / 6.0 - x2 * x / 24.0 + x2 * x2 / 120.0 - x2 * x2 * x / 720.0);
    w.phi2 = tau * (0.5 - x / 6.0 + x2 / 24.0 - x2 * x / 120.0 + x2 * x2 / 720.0 - x2 * x2 * x / 5040.0);
  } else {
    const double em = -std::expm1(-x);
    w.phi1 = em / lambda;
    w.phi2 = 1.0 / lambda - em / (lambda * x);
  }
  return w;
}

HeatSmoothingResult heat_smoothing_check(const RealField& u0, const Forcing& forcing, double s,
                                         double p, double T, std::size_t steps) {
  if (!(T > 0.0)) throw DomainError("heat_smoothing_check: T must be positive");
  if (steps == 0) throw DomainError("heat_smoothing_check: steps must be positive");
  const Grid& g = u0.grid();
  const DyadicPartition partition(g);
  const double tau = T / static_cast<double>(steps);

  const std::size_t nc = g.spectral_cols();
  std::vector<ExpWeights> weights(g.spectral_size());
  for (std::size_t r = 0; r < g.n(); ++r) {
    const double k2 = g.wavenumber(g.row_mode(r));
    for (std::size_t c = 0; c < nc; ++c) {
      const double k1 = g.wavenumber(g.col_mode(c));
      weights[r * nc + c] = exp_weights(k1 * k1 + k2 * k2, tau);
    }
  }

  HeatSmoothingResult out{0.0, 0.0, 0.0, {}, {}, u0};
  auto uh = forward_transform(u0);
  auto f_prev = forcing(0.0);
  require_same_grid(g, f_prev.grid(), "heat_smoothing_check");
  auto fh_prev = forward_transform(f_prev);
  double f_sup = scalar_besov(f_prev, s - 2.0, p, partition);
  out.times.push_back(0.0);
  out.norms.push_back(scalar_besov(u0, s, p, partition));

  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * tau;
    const auto f_next = forcing(t);
    const auto fh_next = forward_transform(f_next);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const auto& w = weights[i];
      const auto f0 = fh_prev.coeffs()[i];
      uh.coeffs()[i] = w.decay * uh.coeffs()[i] + w.phi1 * f0 + w.phi2 * (fh_next.coeffs()[i] - f0);
    }
    f_sup = std::max(f_sup, scalar_besov(f_next, s - 2.0, p, partition));
    out.final_state = inverse_transform(uh, "u");
    out.times.push_back(t);
    out.norms.push_back(scalar_besov(out.final_state, s, p, partition));
    fh_prev = fh_next;
  }
  out.lhs = *std::max_element(out.norms.begin(), out.norms.end());
  out.rhs = out.norms.front() + (1.0 + T) * f_sup;
  out.ratio = safe_ratio(out.lhs, out.rhs);
  return out;
}

}  // namespace bml
