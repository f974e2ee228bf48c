#pragma once

#include <limits>
#include <span>
#include <vector>

#include "bml/grid.hpp"

namespace bml {

/// Smooth dyadic partition of unity on the lattice of a Grid.
///
/// The low-pass profile chi is radial, equal to 1 on |xi| <= 3/4 and 0 on
/// |xi| >= 4/3, with the transition built from exp(-1/x). The annular profile
/// is phi(xi) = chi(xi/2) - chi(xi), supported in 3/4 <= |xi| <= 8/3. Shell
/// j = -1 uses chi, shells j >= 0 use phi(2^-j xi), where xi is the physical
/// wavenumber (pi/L) m. The partial sums telescope:
///   chi(xi) + sum_{j=0}^{J} phi(2^-j xi) = chi(2^-(J+1) xi),
/// so j_max is the smallest J for which chi(2^-(J+1) .) is 1 on the whole
/// lattice; higher shells would be empty.
class DyadicPartition {
 public:
  explicit DyadicPartition(const Grid& grid);

  static double low_pass(double radius);
  static double annulus(double radius);

  const Grid& grid() const { return grid_; }
  int j_max() const { return j_max_; }
  std::size_t shell_count() const { return static_cast<std::size_t>(j_max_ + 2); }

  /// Multiplier of shell j at wavenumber magnitude |k|.
  double weight(int j, double kmag) const;
  /// Multiplier of shell j over the stored half spectrum.
  const std::vector<double>& shell_multiplier(int j) const;

  /// max over lattice wavenumbers of |chi + sum_j phi_j - 1|.
  double partition_defect() const;

 private:
  Grid grid_;
  int j_max_ = 0;
  std::vector<std::vector<double>> multipliers_;  // index j + 1
};

/// Delta_j f for j = -1 .. j_max.
class ShellDecomposition {
 public:
  ShellDecomposition(const RealField& source, const DyadicPartition& partition);

  const RealField& source() const { return source_; }
  int j_max() const { return static_cast<int>(blocks_.size()) - 2; }
  const RealField& block(int j) const;
  const SpectralField& block_spectrum(int j) const;
  /// S_j f = sum_{-1 <= k <= j-1} Delta_k f (zero for j <= -1).
  SpectralField low_sum_spectrum(int j) const;
  RealField reconstruct() const;

 private:
  RealField source_;
  std::vector<RealField> blocks_;
  std::vector<SpectralField> spectra_;
};

ShellDecomposition decompose(const RealField& f, const DyadicPartition& partition);

/// Per-shell L^p norms ||Delta_j f||_{L^p}, indexed j + 1.
std::vector<double> shell_lp_norms(const ShellDecomposition& d, double p);
/// Per-shell norms of a vector field (pointwise Euclidean magnitude).
std::vector<double> shell_lp_norms(std::span<const ShellDecomposition> components, double p);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovParams {
  double s = 0.0;
  double p = 2.0;
  double r = 2.0;

  /// Throws DomainError unless p, r >= 1 and s in [-2, 4].
  void validate() const;
};

/// || {2^{js} a_j}_{j >= -1} ||_{l^r} for precomputed shell norms a_j.
double besov_from_shell_norms(std::span<const double> shell_norms, double s, double r);

double besov_norm(const RealField& f, const BesovParams& bp);
double besov_norm(const RealField& f, const BesovParams& bp, const DyadicPartition& partition);
double besov_norm(std::span<const RealField* const> components, const BesovParams& bp);

/// sup_{k >= -1} 2^{k(1-s)} sqrt(k+2) ||Delta_k f||_{L^p}, s in ]0,1[.
double weighted_sup(const RealField& f, double s, double p);
double weighted_sup(const RealField& f, double s, double p, const DyadicPartition& partition);

/// Bony splitting of Delta_q (v . grad theta):
///   I_q   = sum_{|k-q|<=4} Delta_q(S_{k-1} v . grad Delta_k theta)
///   II_q  = sum_{|k-q|<=4} Delta_q(Delta_k v . grad S_{k-1} theta)
///   III_q = sum_{k>=q-3}   Delta_q(Delta_k v . grad Dtilde_k theta)
/// with Dtilde_k = Delta_{k-1} + Delta_k + Delta_{k+1}. Products are exact
/// (3/2-padded), so the three terms regroup Delta_q(v . grad theta).
struct BonyTerms {
  int q = -1;
  RealField low_high;   ///< I_q
  RealField high_low;   ///< II_q
  RealField remainder;  ///< III_q
};

struct BonyOptions {
  double divergence_tolerance = 1e-8;
  /// Fault injection for mutation testing of the verification harness.
  bool flip_remainder_sign = false;
};

std::vector<BonyTerms> bony_decomposition(const RealField& v1, const RealField& v2,
                                          const RealField& theta,
                                          const DyadicPartition& partition,
                                          const BonyOptions& options = {});
BonyTerms bony_terms(const RealField& v1, const RealField& v2, const RealField& theta, int q,
                     const DyadicPartition& partition, const BonyOptions& options = {});

/// Delta_q(v . grad theta) from the exact product, without any splitting.
RealField transport_block(const RealField& v1, const RealField& v2, const RealField& theta,
                          int q, const DyadicPartition& partition);

}  // namespace bml
