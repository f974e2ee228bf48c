#include "bml/corpus.hpp"

#include <cmath>
#include <random>

#include "bml/error.hpp"
#include "bml/fft.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

RealField random_band_limited(const Grid& g, std::uint64_t seed, int max_mode, double decay,
                              bool zero_mean) {
  if (max_mode < 1 || 3 * static_cast<std::size_t>(max_mode) >= g.n()) {
    throw DomainError("random_band_limited: max_mode must satisfy 1 <= 3*max_mode < n");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField fh(g);
  auto row_of = [&](int m) {
    return m >= 0 ? static_cast<std::size_t>(m) : g.n() - static_cast<std::size_t>(-m);
  };
  for (int m1 = 0; m1 <= max_mode; ++m1) {
    for (int m2 = -max_mode; m2 <= max_mode; ++m2) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (m1 == 0 && m2 < 0) continue;
      const double amp = std::pow(1.0 + m1 * m1 + m2 * m2, -0.5 * decay);
      std::complex<double> a(amp * re, amp * im);
      if (m1 == 0 && m2 == 0) {
        fh.at(0, 0) = zero_mean ? 0.0 : amp * re;
        continue;
      }
      fh.at(row_of(m2), static_cast<std::size_t>(m1)) = a;
      if (m1 == 0) fh.at(row_of(-m2), 0) = std::conj(a);
    }
  }
  return inverse_transform(fh, "random");
}

RealField gaussian_bump(const Grid& g, double cx, double cy, double width, double amplitude) {
  if (!(width > 0.0)) throw DomainError("gaussian_bump: width must be positive");
  const double s = 1.0 / (2.0 * width * width);
  return sample(
      g,
      [&](double x, double y) {
        const double dx = x - cx;
        const double dy = y - cy;
        return amplitude * std::exp(-s * (dx * dx + dy * dy));
      },
      "gaussian");
}

std::pair<RealField, RealField> perp_gradient(const RealField& psi) {
  const auto ph = forward_transform(psi);
  return {inverse_transform(spectral_derivative(ph, 1), "v1"),
          inverse_transform(-1.0 * spectral_derivative(ph, 0), "v2")};
}

std::vector<FieldPair> product_corpus(const Grid& g, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = g.half_length();
  std::vector<FieldPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t s1 = rng();
    const std::uint64_t s2 = rng();
    const double r[6] = {unit(rng), unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
    RealField psi(g);
    RealField theta(g);
    std::string kind;
    if (i % 2 == 0) {
      const int mm = 3 + static_cast<int>(r[0] * 8.0);
      psi = random_band_limited(g, s1, mm, 2.0 + 2.0 * r[1]);
      theta = random_band_limited(g, s2, mm, 1.5 + 2.0 * r[2]);
      kind = "band";
    } else {
      const double w1 = L * (0.08 + 0.15 * r[0]);
      const double w2 = L * (0.06 + 0.15 * r[1]);
      psi = gaussian_bump(g, L * (r[2] - 0.5) * 0.5, L * (r[3] - 0.5) * 0.5, w1);
      theta = gaussian_bump(g, L * (r[4] - 0.5) * 0.5, L * (r[5] - 0.5) * 0.5, w2);
      kind = "gauss";
    }
    auto [v1, v2] = perp_gradient(psi);
    theta.set_label("theta");
    out.push_back(FieldPair{kind + "-" + std::to_string(i), std::move(v1), std::move(v2),
                            std::move(theta)});
  }
  return out;
}

std::vector<RealField> bump_family(const Grid& g, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = g.half_length();
  std::vector<RealField> out;
  for (std::size_t i = 0; i < count; ++i) {
    // Widths sweep from 0.2 L down to 0.05 L.
    const double frac = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    const double width = L * 0.2 * std::pow(0.25, frac);
    const double cx = L * 0.3 * (unit(rng) - 0.5);
    const double cy = L * 0.3 * (unit(rng) - 0.5);
    auto f = gaussian_bump(g, cx, cy, width);
    if (i % 3 == 2) f += gaussian_bump(g, -cx, cy + 0.2 * L, 1.7 * width, 0.5);
    f.set_label("bump-" + std::to_string(i));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace bml
