#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bml/grid.hpp"

namespace bml {

/// Random real trigonometric polynomial with integer modes |m1|, |m2| <= max_mode
/// and amplitudes ~ N(0,1) / (1 + |m|^2)^(decay/2). The coefficients depend only
/// on (seed, max_mode, decay), so the same function is produced on every grid
/// with n > 3 * max_mode and the same box.
RealField random_band_limited(const Grid& g, std::uint64_t seed, int max_mode, double decay,
                              bool zero_mean = true);

/// exp(-|x - c|^2 / (2 w^2)) sampled on the grid.
RealField gaussian_bump(const Grid& g, double cx, double cy, double width, double amplitude = 1.0);

/// A divergence-free velocity v = grad^perp psi and a scalar theta.
struct FieldPair {
  std::string id;
  RealField v1;
  RealField v2;
  RealField theta;
};

/// v = (d2 psi, -d1 psi) computed spectrally, hence exactly divergence-free.
std::pair<RealField, RealField> perp_gradient(const RealField& psi);

/// Deterministic mixed corpus: band-limited pairs and Gaussian-built pairs.
std::vector<FieldPair> product_corpus(const Grid& g, std::size_t count, std::uint64_t seed);

/// Positive bumps and bump mixtures of varying width, for interpolation checks.
std::vector<RealField> bump_family(const Grid& g, std::size_t count, std::uint64_t seed);

}  // namespace bml
