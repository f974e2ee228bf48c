#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bml/fft.hpp"
#include "bml/geometry.hpp"
#include "bml/grid.hpp"

namespace bml {

// ---------------------------------------------------------------------------
// Differentiation. Odd derivatives drop the Nyquist modes, which have no
// real-valued derivative on the lattice.
// ---------------------------------------------------------------------------

/// d/dx_axis in spectral space (axis 0 = x1, axis 1 = x2).
SpectralField spectral_derivative(const SpectralField& f, int axis);
SpectralField spectral_laplacian(const SpectralField& f);
/// (-Delta)^{-1} with the k = 0 coefficient set to zero.
SpectralField inverse_neg_laplacian(const SpectralField& f);

std::pair<RealField, RealField> gradient(const RealField& f);
RealField divergence(const RealField& v1, const RealField& v2);
RealField laplacian(const RealField& f);
/// curl v = d1 v2 - d2 v1.
RealField curl(const RealField& v1, const RealField& v2);

struct Velocity {
  RealField v1;
  RealField v2;
  double removed_mean = 0.0;  ///< mean of omega projected out before inversion
  bool mean_flagged = false;  ///< |mean| exceeded 1e-8 * max|omega|
};

/// Divergence-free velocity with curl v = omega - mean(omega).
/// Orientation: v = (d2 psi, -d1 psi) with -Delta psi = omega.
Velocity biot_savart(const RealField& omega);
std::pair<SpectralField, SpectralField> biot_savart_spectral(const SpectralField& omega_hat);

/// Multiplies every mode by exp(-|k|^2 t). Throws on t < 0.
SpectralField heat_propagate(const SpectralField& f, double t);
RealField heat_propagate(const RealField& f, double t);

// ---------------------------------------------------------------------------
// Dealiasing and products.
// ---------------------------------------------------------------------------

/// Largest retained |m| per axis under the 2/3 rule (floor(n/3)).
std::size_t dealias_cutoff(std::size_t n);
/// Zeroes every mode with max(|m1|, |m2|) > dealias_cutoff(n). Idempotent.
SpectralField dealias(const SpectralField& f);

/// Alias-free product of two dealiased fields computed on the grid; the
/// result is dealiased as well.
SpectralField product_dealiased(const SpectralField& a, const SpectralField& b);

/// Exact product of the Nyquist-free parts of `a` and `b`, projected onto the
/// Nyquist-free lattice. Computed on a 3/2-padded grid.
RealField product_padded(const RealField& a, const RealField& b);
SpectralField product_padded(const SpectralField& a, const SpectralField& b);

// ---------------------------------------------------------------------------
// Off-grid evaluation (trigonometric interpolation).
// ---------------------------------------------------------------------------

/// Evaluates the trigonometric interpolant of `f` at arbitrary points; points
/// are wrapped into the periodic box. Exact at grid nodes.
std::vector<double> eval_at_points(const RealField& f, std::span<const Vec2> points);

/// Evaluates several spectral fields (same grid) at the same points.
/// Output layout: out[field * points.size() + p].
void eval_spectral_at_points(std::span<const SpectralField* const> fields,
                             std::span<const Vec2> points, std::span<double> out);

// ---------------------------------------------------------------------------
// Integrals and norms on the box. L^2 norms agree with the Parseval sum; other
// L^p norms use the cell-weighted grid quadrature, L^inf is the grid maximum.
// ---------------------------------------------------------------------------

double integral(const RealField& f);
double mean(const RealField& f);
double l2_norm(const RealField& f);
double l2_norm(const SpectralField& f);
double lp_norm(const RealField& f, double p);
double linf_norm(const RealField& f);
double min_value(const RealField& f);
/// L^p norm of the pointwise Euclidean magnitude of a vector/tensor field.
double lp_norm(std::span<const RealField* const> components, double p);

/// Band-limited resampling onto a grid with the same box (zero-padding or
/// truncation of the Nyquist-free spectrum).
RealField resample(const RealField& f, const Grid& target);

/// Real field sampled from a function of position.
template <typename Fn>
RealField sample(const Grid& g, Fn&& fn, std::string label = {}) {
  RealField out(g, std::move(label));
  for (std::size_t j = 0; j < g.n(); ++j) {
    for (std::size_t i = 0; i < g.n(); ++i) out.at(i, j) = fn(g.coord(i), g.coord(j));
  }
  return out;
}

}  // namespace bml
