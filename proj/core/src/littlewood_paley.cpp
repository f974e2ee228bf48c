#include "bml/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bml/error.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

namespace {

constexpr double kInner = 3.0 / 4.0;
constexpr double kOuter = 4.0 / 3.0;

double bump_tail(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// C-infinity step from 0 (t <= 0) to 1 (t >= 1).
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump_tail(t);
  const double b = bump_tail(1.0 - t);
  return a / (a + b);
}

SpectralField apply_real_multiplier(const SpectralField& f, const std::vector<double>& m) {
  SpectralField out(f.grid());
  for (std::size_t k = 0; k < m.size(); ++k) out.coeffs()[k] = m[k] * f.coeffs()[k];
  return out;
}

void check_shell(int j, int j_max) {
  if (j < -1 || j > j_max) {
    throw DomainError("shell index " + std::to_string(j) + " outside [-1, " +
                      std::to_string(j_max) + "]");
  }
}

}  // namespace

double DyadicPartition::low_pass(double radius) {
  if (radius <= kInner) return 1.0;
  if (radius >= kOuter) return 0.0;
  return 1.0 - smooth_step((radius - kInner) / (kOuter - kInner));
}

double DyadicPartition::annulus(double radius) { return low_pass(0.5 * radius) - low_pass(radius); }

DyadicPartition::DyadicPartition(const Grid& grid) : grid_(grid) {
  if (grid.n() < 16) throw DomainError("dyadic partition needs n >= 16 for shells j >= 0");
  const double kmax = grid.max_wavenumber();
  j_max_ = 0;
  while (kInner * std::ldexp(1.0, j_max_ + 1) < kmax) ++j_max_;

  const std::size_t nc = grid.spectral_cols();
  multipliers_.assign(shell_count(), std::vector<double>(grid.spectral_size()));
  for (std::size_t r = 0; r < grid.n(); ++r) {
    const double k2 = grid.wavenumber(grid.row_mode(r));
    for (std::size_t c = 0; c < nc; ++c) {
      const double k1 = grid.wavenumber(grid.col_mode(c));
      const double kmag = std::hypot(k1, k2);
      for (int j = -1; j <= j_max_; ++j) {
        multipliers_[static_cast<std::size_t>(j + 1)][r * nc + c] = weight(j, kmag);
      }
    }
  }
}

double DyadicPartition::weight(int j, double kmag) const {
  if (j < 0) return low_pass(kmag);
  return annulus(std::ldexp(kmag, -j));
}

const std::vector<double>& DyadicPartition::shell_multiplier(int j) const {
  check_shell(j, j_max_);
  return multipliers_[static_cast<std::size_t>(j + 1)];
}

double DyadicPartition::partition_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < grid_.spectral_size(); ++k) {
    double s = 0.0;
    for (const auto& m : multipliers_) s += m[k];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

ShellDecomposition::ShellDecomposition(const RealField& source, const DyadicPartition& partition)
    : source_(source) {
  require_same_grid(source.grid(), partition.grid(), "decompose");
  const auto fh = forward_transform(source);
  for (int j = -1; j <= partition.j_max(); ++j) {
    spectra_.push_back(apply_real_multiplier(fh, partition.shell_multiplier(j)));
    blocks_.push_back(inverse_transform(spectra_.back(), "Delta_" + std::to_string(j)));
  }
}

const RealField& ShellDecomposition::block(int j) const {
  check_shell(j, j_max());
  return blocks_[static_cast<std::size_t>(j + 1)];
}

const SpectralField& ShellDecomposition::block_spectrum(int j) const {
  check_shell(j, j_max());
  return spectra_[static_cast<std::size_t>(j + 1)];
}

SpectralField ShellDecomposition::low_sum_spectrum(int j) const {
  SpectralField out(source_.grid());
  for (int k = -1; k <= std::min(j - 1, j_max()); ++k) out += block_spectrum(k);
  return out;
}

RealField ShellDecomposition::reconstruct() const {
  RealField out(source_.grid(), source_.label());
  for (const auto& b : blocks_) out += b;
  return out;
}

ShellDecomposition decompose(const RealField& f, const DyadicPartition& partition) {
  return ShellDecomposition(f, partition);
}

std::vector<double> shell_lp_norms(const ShellDecomposition& d, double p) {
  std::vector<double> out;
  for (int j = -1; j <= d.j_max(); ++j) out.push_back(lp_norm(d.block(j), p));
  return out;
}

std::vector<double> shell_lp_norms(std::span<const ShellDecomposition> components, double p) {
  if (components.empty()) return {};
  std::vector<double> out;
  for (int j = -1; j <= components.front().j_max(); ++j) {
    std::vector<const RealField*> parts;
    for (const auto& c : components) parts.push_back(&c.block(j));
    out.push_back(lp_norm(parts, p));
  }
  return out;
}

void BesovParams::validate() const {
  if (!(p >= 1.0)) throw DomainError("Besov index p must be >= 1");
  if (!(r >= 1.0)) throw DomainError("Besov index r must be >= 1");
  if (!(s >= -2.0 && s <= 4.0)) throw DomainError("Besov regularity s must lie in [-2, 4]");
}

double besov_from_shell_norms(std::span<const double> shell_norms, double s, double r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < shell_norms.size(); ++i) {
    const int j = static_cast<int>(i) - 1;
    const double term = std::exp2(j * s) * shell_norms[i];
    if (std::isinf(r)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, r);
    }
  }
  return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

double besov_norm(const RealField& f, const BesovParams& bp, const DyadicPartition& partition) {
  bp.validate();
  const auto norms = shell_lp_norms(decompose(f, partition), bp.p);
  return besov_from_shell_norms(norms, bp.s, bp.r);
}

double besov_norm(const RealField& f, const BesovParams& bp) {
  return besov_norm(f, bp, DyadicPartition(f.grid()));
}

double besov_norm(std::span<const RealField* const> components, const BesovParams& bp) {
  bp.validate();
  if (components.empty()) return 0.0;
  const DyadicPartition partition(components.front()->grid());
  std::vector<ShellDecomposition> parts;
  for (const auto* c : components) parts.push_back(decompose(*c, partition));
  return besov_from_shell_norms(shell_lp_norms(parts, bp.p), bp.s, bp.r);
}

double weighted_sup(const RealField& f, double s, double p, const DyadicPartition& partition) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("weighted_sup: s must lie in ]0,1[");
  const auto norms = shell_lp_norms(decompose(f, partition), p);
  double best = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const int k = static_cast<int>(i) - 1;
    best = std::max(best, std::exp2(k * (1.0 - s)) * std::sqrt(k + 2.0) * norms[i]);
  }
  return best;
}

double weighted_sup(const RealField& f, double s, double p) {
  return weighted_sup(f, s, p, DyadicPartition(f.grid()));
}

namespace {

void require_divergence_free(const RealField& v1, const RealField& v2, double tol) {
  const auto a = spectral_derivative(forward_transform(v1), 0);
  const auto b = spectral_derivative(forward_transform(v2), 1);
  const double scale = l2_norm(a) + l2_norm(b);
  const double div = l2_norm(a + b);
  if (div > tol * scale) {
    throw DomainError("bony_terms: velocity is not divergence-free (|div v| = " +
                      std::to_string(div) + ")");
  }
}

/// a1 * b1 + a2 * b2 computed exactly.
SpectralField dot_product(const SpectralField& a1, const SpectralField& a2,
                          const SpectralField& b1, const SpectralField& b2) {
  auto out = product_padded(a1, b1);
  out += product_padded(a2, b2);
  return out;
}

}  // namespace

std::vector<BonyTerms> bony_decomposition(const RealField& v1, const RealField& v2,
                                          const RealField& theta,
                                          const DyadicPartition& partition,
                                          const BonyOptions& options) {
  require_same_grid(v1.grid(), theta.grid(), "bony_terms");
  require_same_grid(v2.grid(), theta.grid(), "bony_terms");
  require_divergence_free(v1, v2, options.divergence_tolerance);

  const Grid& g = theta.grid();
  const auto dv1 = decompose(v1, partition);
  const auto dv2 = decompose(v2, partition);
  const auto dth = decompose(theta, partition);
  const int jm = partition.j_max();

  auto grad = [](const SpectralField& f) {
    return std::pair{spectral_derivative(f, 0), spectral_derivative(f, 1)};
  };

  // Per-k products, independent of q.
  std::vector<SpectralField> low_high, high_low, remainder;
  for (int k = -1; k <= jm; ++k) {
    const auto sv1 = dv1.low_sum_spectrum(k - 1);
    const auto sv2 = dv2.low_sum_spectrum(k - 1);
    const auto [g1, g2] = grad(dth.block_spectrum(k));
    low_high.push_back(k >= 1 ? dot_product(sv1, sv2, g1, g2) : SpectralField(g));

    const auto [s1, s2] = grad(dth.low_sum_spectrum(k - 1));
    const auto& b1 = dv1.block_spectrum(k);
    const auto& b2 = dv2.block_spectrum(k);
    high_low.push_back(k >= 1 ? dot_product(b1, b2, s1, s2) : SpectralField(g));

    SpectralField tilde(g);
    for (int l = k - 1; l <= k + 1; ++l) {
      if (l >= -1 && l <= jm) tilde += dth.block_spectrum(l);
    }
    const auto [t1, t2] = grad(tilde);
    remainder.push_back(dot_product(b1, b2, t1, t2));
  }

  std::vector<BonyTerms> out;
  for (int q = -1; q <= jm; ++q) {
    SpectralField i_sum(g), ii_sum(g), iii_sum(g);
    for (int k = std::max(-1, q - 4); k <= std::min(jm, q + 4); ++k) {
      i_sum += low_high[static_cast<std::size_t>(k + 1)];
      ii_sum += high_low[static_cast<std::size_t>(k + 1)];
    }
    for (int k = std::max(-1, q - 3); k <= jm; ++k) iii_sum += remainder[static_cast<std::size_t>(k + 1)];
    if (options.flip_remainder_sign) iii_sum *= -1.0;

    const auto& m = partition.shell_multiplier(q);
    out.push_back(BonyTerms{q, inverse_transform(apply_real_multiplier(i_sum, m), "I_q"),
                            inverse_transform(apply_real_multiplier(ii_sum, m), "II_q"),
                            inverse_transform(apply_real_multiplier(iii_sum, m), "III_q")});
  }
  return out;
}

BonyTerms bony_terms(const RealField& v1, const RealField& v2, const RealField& theta, int q,
                     const DyadicPartition& partition, const BonyOptions& options) {
  check_shell(q, partition.j_max());
  auto all = bony_decomposition(v1, v2, theta, partition, options);
  return std::move(all[static_cast<std::size_t>(q + 1)]);
}

RealField transport_block(const RealField& v1, const RealField& v2, const RealField& theta,
                          int q, const DyadicPartition& partition) {
  check_shell(q, partition.j_max());
  const auto th = forward_transform(theta);
  const auto prod = dot_product(forward_transform(v1), forward_transform(v2),
                                spectral_derivative(th, 0), spectral_derivative(th, 1));
  return inverse_transform(apply_real_multiplier(prod, partition.shell_multiplier(q)),
                           "Delta_q(v.grad theta)");
}

}  // namespace bml
