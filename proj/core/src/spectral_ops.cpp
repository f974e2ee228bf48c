#include "bml/spectral_ops.hpp"

#include <algorithm>
#include <cmath>

#include "bml/error.hpp"
#include "bml/parallel.hpp"

namespace bml {

namespace {

using complex = std::complex<double>;

/// Calls fn(index, m1, m2) over the stored half spectrum.
template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  const std::size_t nc = g.spectral_cols();
  for (std::size_t r = 0; r < g.n(); ++r) {
    const auto m2 = g.row_mode(r);
    for (std::size_t c = 0; c < nc; ++c) fn(r * nc + c, g.col_mode(c), m2);
  }
}

double wavenumber_sq(const Grid& g, std::ptrdiff_t m1, std::ptrdiff_t m2) {
  const double k1 = g.wavenumber(m1);
  const double k2 = g.wavenumber(m2);
  return k1 * k1 + k2 * k2;
}

}  // namespace

SpectralField spectral_derivative(const SpectralField& f, int axis) {
  if (axis != 0 && axis != 1) throw DomainError("spectral_derivative: axis must be 0 or 1");
  const Grid& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](std::size_t idx, std::ptrdiff_t m1, std::ptrdiff_t m2) {
    const std::ptrdiff_t m = axis == 0 ? m1 : m2;
    if (g.is_nyquist(m)) return;
    out.coeffs()[idx] = complex(0.0, g.wavenumber(m)) * f.coeffs()[idx];
  });
  return out;
}

SpectralField spectral_laplacian(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](std::size_t idx, std::ptrdiff_t m1, std::ptrdiff_t m2) {
    out.coeffs()[idx] = -wavenumber_sq(g, m1, m2) * f.coeffs()[idx];
  });
  return out;
}

SpectralField inverse_neg_laplacian(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](std::size_t idx, std::ptrdiff_t m1, std::ptrdiff_t m2) {
    if (m1 == 0 && m2 == 0) return;
    out.coeffs()[idx] = f.coeffs()[idx] / wavenumber_sq(g, m1, m2);
  });
  return out;
}

std::pair<RealField, RealField> gradient(const RealField& f) {
  const auto fh = forward_transform(f);
  return {inverse_transform(spectral_derivative(fh, 0), "d1 " + f.label()),
          inverse_transform(spectral_derivative(fh, 1), "d2 " + f.label())};
}

RealField divergence(const RealField& v1, const RealField& v2) {
  require_same_grid(v1.grid(), v2.grid(), "divergence");
  auto d = spectral_derivative(forward_transform(v1), 0);
  d += spectral_derivative(forward_transform(v2), 1);
  return inverse_transform(d, "div");
}

RealField laplacian(const RealField& f) {
  return inverse_transform(spectral_laplacian(forward_transform(f)), "lap " + f.label());
}

RealField curl(const RealField& v1, const RealField& v2) {
  require_same_grid(v1.grid(), v2.grid(), "curl");
  auto c = spectral_derivative(forward_transform(v2), 0);
  c -= spectral_derivative(forward_transform(v1), 1);
  return inverse_transform(c, "curl");
}

std::pair<SpectralField, SpectralField> biot_savart_spectral(const SpectralField& omega_hat) {
  const auto psi = inverse_neg_laplacian(omega_hat);
  auto v1 = spectral_derivative(psi, 1);
  auto v2 = spectral_derivative(psi, 0);
  v2 *= -1.0;
  return {std::move(v1), std::move(v2)};
}

Velocity biot_savart(const RealField& omega) {
  const auto wh = forward_transform(omega);
  const double m = wh.coeffs()[0].real();
  const double scale = linf_norm(omega);
  auto [v1, v2] = biot_savart_spectral(wh);
  Velocity out{inverse_transform(v1, "v1"), inverse_transform(v2, "v2"), m,
               std::abs(m) > 1e-8 * scale};
  return out;
}

SpectralField heat_propagate(const SpectralField& f, double t) {
  if (!(t >= 0.0)) throw DomainError("heat_propagate: negative duration");
  const Grid& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](std::size_t idx, std::ptrdiff_t m1, std::ptrdiff_t m2) {
    out.coeffs()[idx] = std::exp(-wavenumber_sq(g, m1, m2) * t) * f.coeffs()[idx];
  });
  return out;
}

RealField heat_propagate(const RealField& f, double t) {
  return inverse_transform(heat_propagate(forward_transform(f), t), f.label());
}

std::size_t dealias_cutoff(std::size_t n) { return n / 3; }

SpectralField dealias(const SpectralField& f) {
  const Grid& g = f.grid();
  const auto cut = static_cast<std::ptrdiff_t>(dealias_cutoff(g.n()));
  SpectralField out(f);
  for_each_mode(g, [&](std::size_t idx, std::ptrdiff_t m1, std::ptrdiff_t m2) {
    if (std::abs(m1) > cut || std::abs(m2) > cut) out.coeffs()[idx] = 0.0;
  });
  return out;
}

SpectralField product_dealiased(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "product_dealiased");
  const auto pa = inverse_transform(dealias(a));
  const auto pb = inverse_transform(dealias(b));
  RealField prod(a.grid());
  for (std::size_t k = 0; k < prod.values().size(); ++k) prod[k] = pa[k] * pb[k];
  return dealias(forward_transform(prod));
}

SpectralField product_padded(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "product_padded");
  const Grid& g = a.grid();
  const std::size_t n = g.n();
  const std::size_t big = 3 * n / 2;
  const std::size_t nc = g.spectral_cols();
  const std::size_t bc = big / 2 + 1;
  const auto half = static_cast<std::ptrdiff_t>(n / 2);

  auto embed = [&](const SpectralField& f) {
    std::vector<complex> padded(big * bc);
    for (std::size_t r = 0; r < n; ++r) {
      const auto m2 = g.row_mode(r);
      if (m2 == -half) continue;
      const std::size_t rb = m2 >= 0 ? static_cast<std::size_t>(m2)
                                     : big - static_cast<std::size_t>(-m2);
      for (std::size_t c = 0; c + 1 < nc; ++c) padded[rb * bc + c] = f.coeffs()[r * nc + c];
    }
    std::vector<double> values(big * big);
    fft_c2r(big, padded, values);
    return values;
  };

  const auto va = embed(a);
  const auto vb = embed(b);
  std::vector<double> prod(big * big);
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = va[k] * vb[k];
  std::vector<complex> spec(big * bc);
  fft_r2c(big, prod, spec);

  SpectralField out(g);
  const double norm = 1.0 / static_cast<double>(big * big);
  for (std::size_t r = 0; r < n; ++r) {
    const auto m2 = g.row_mode(r);
    if (m2 == -half) continue;
    const std::size_t rb = m2 >= 0 ? static_cast<std::size_t>(m2)
                                   : big - static_cast<std::size_t>(-m2);
    for (std::size_t c = 0; c + 1 < nc; ++c) out.coeffs()[r * nc + c] = norm * spec[rb * bc + c];
  }
  return out;
}

RealField product_padded(const RealField& a, const RealField& b) {
  return inverse_transform(product_padded(forward_transform(a), forward_transform(b)));
}

void eval_spectral_at_points(std::span<const SpectralField* const> fields,
                             std::span<const Vec2> points, std::span<double> out) {
  if (fields.empty()) return;
  const Grid& g = fields.front()->grid();
  for (const auto* f : fields) require_same_grid(g, f->grid(), "eval_spectral_at_points");
  if (out.size() != fields.size() * points.size()) {
    throw DomainError("eval_spectral_at_points: output buffer has the wrong size");
  }
  const std::size_t n = g.n();
  const std::size_t nc = g.spectral_cols();
  const double L = g.half_length();
  const std::size_t np = points.size();

  parallel_for(np, [&](std::size_t p) {
    const Vec2 x = points[p];
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) {
      throw DomainError("eval_at_points: non-finite point coordinate");
    }
    // Offsets from the first node; phases are 2L-periodic so no wrap needed
    // beyond keeping the argument small.
    const double ox = std::fmod(x.x + L, 2.0 * L);
    const double oy = std::fmod(x.y + L, 2.0 * L);
    std::vector<complex> e1(nc);
    std::vector<complex> e2(n);
    for (std::size_t c = 0; c < nc; ++c) {
      const auto m = g.col_mode(c);
      const double arg = g.wavenumber(m) * ox;
      e1[c] = g.is_nyquist(m) ? complex(std::cos(arg), 0.0) : std::polar(1.0, arg);
      if (c != 0 && c != n / 2) e1[c] *= 2.0;
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto m = g.row_mode(r);
      const double arg = g.wavenumber(m) * oy;
      e2[r] = g.is_nyquist(m) ? complex(std::cos(arg), 0.0) : std::polar(1.0, arg);
    }
    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
      const auto& coeffs = fields[fi]->coeffs();
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        complex row = 0.0;
        const complex* cr = coeffs.data() + r * nc;
        for (std::size_t c = 0; c < nc; ++c) row += cr[c] * e1[c];
        acc += (row * e2[r]).real();
      }
      out[fi * np + p] = acc;
    }
  });
}

std::vector<double> eval_at_points(const RealField& f, std::span<const Vec2> points) {
  const auto fh = forward_transform(f);
  const SpectralField* ptr = &fh;
  std::vector<double> out(points.size());
  eval_spectral_at_points(std::span<const SpectralField* const>(&ptr, 1), points, out);
  return out;
}

double integral(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_area();
}

double mean(const RealField& f) { return integral(f) / f.grid().box_area(); }

double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_area());
}

double l2_norm(const SpectralField& f) {
  const Grid& g = f.grid();
  const std::size_t nc = g.spectral_cols();
  double s = 0.0;
  for (std::size_t r = 0; r < g.n(); ++r) {
    for (std::size_t c = 0; c < nc; ++c) s += f.column_weight(c) * std::norm(f.coeffs()[r * nc + c]);
  }
  return std::sqrt(s * g.box_area());
}

double linf_norm(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const RealField& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

double lp_norm(const RealField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  if (std::isinf(p)) return linf_norm(f);
  if (p == 2.0) return l2_norm(f);
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_area(), 1.0 / p);
}

double lp_norm(std::span<const RealField* const> components, double p) {
  if (components.empty()) return 0.0;
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  const Grid& g = components.front()->grid();
  for (const auto* c : components) require_same_grid(g, c->grid(), "lp_norm");
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double m2 = 0.0;
    for (const auto* c : components) m2 += (*c)[k] * (*c)[k];
    const double mag = std::sqrt(m2);
    if (std::isinf(p)) {
      acc = std::max(acc, mag);
    } else {
      acc += std::pow(mag, p);
    }
  }
  if (std::isinf(p)) return acc;
  return std::pow(acc * g.cell_area(), 1.0 / p);
}

RealField resample(const RealField& f, const Grid& target) {
  const Grid& g = f.grid();
  if (g.half_length() != target.half_length()) throw DomainError("resample: box sizes differ");
  if (g == target) return f;
  const auto src = forward_transform(f);
  const auto keep = static_cast<std::ptrdiff_t>(std::min(g.n(), target.n()) / 2);
  SpectralField out(target);
  for (std::size_t r = 0; r < target.n(); ++r) {
    const auto m2 = target.row_mode(r);
    if (std::abs(m2) >= keep) continue;
    const std::size_t rs = m2 >= 0 ? static_cast<std::size_t>(m2)
                                   : g.n() - static_cast<std::size_t>(-m2);
    for (std::size_t c = 0; c < static_cast<std::size_t>(keep); ++c) out.at(r, c) = src.at(rs, c);
  }
  return inverse_transform(out, f.label());
}

}  // namespace bml
