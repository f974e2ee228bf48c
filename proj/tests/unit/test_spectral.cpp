#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "bml/error.hpp"
#include "bml/fft.hpp"
#include "bml/snapshot_io.hpp"
#include "bml/spectral_ops.hpp"

using namespace bml;
using Catch::Matchers::WithinAbs;

namespace {

RealField noise(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  RealField f(g);
  for (auto& v : f.values()) v = nd(rng);
  return f;
}

double max_diff(const RealField& a, const RealField& b) { return linf_norm(a - b); }

}  // namespace

TEST_CASE("forward and inverse transforms round-trip, DC is the mean") {
  const Grid g(32, 3.0);
  const auto f = noise(g, 1);
  const auto fh = forward_transform(f);
  CHECK_THAT(fh.at(0, 0).real(), WithinAbs(mean(f), 1e-14));
  CHECK(max_diff(inverse_transform(fh), f) < 1e-13);
}

TEST_CASE("spectral derivative of a trigonometric mode") {
  const Grid g(32, 2.0);
  const double k = g.wavenumber(3), l = g.wavenumber(5);
  const auto f = sample(g, [&](double x, double y) { return std::sin(k * x) * std::cos(l * y); });
  const auto [d1, d2] = gradient(f);
  const auto e1 = sample(g, [&](double x, double y) { return k * std::cos(k * x) * std::cos(l * y); });
  const auto e2 = sample(g, [&](double x, double y) { return -l * std::sin(k * x) * std::sin(l * y); });
  CHECK(max_diff(d1, e1) < 1e-12);
  CHECK(max_diff(d2, e2) < 1e-12);
}

TEST_CASE("odd derivatives drop the Nyquist mode") {
  const Grid g(16, 1.0);
  const auto f = sample(g, [&](double x, double) { return std::cos(g.wavenumber(8) * x); });
  const auto [d1, d2] = gradient(f);
  CHECK(linf_norm(d1) < 1e-14);
  CHECK(linf_norm(d2) < 1e-14);
}

TEST_CASE("padded product equals the direct Fourier convolution") {
  const Grid g(16, 1.5);
  const auto ah = forward_transform(noise(g, 2));
  const auto bh = forward_transform(noise(g, 3));
  const int n = 16, half = n / 2;
  // Full coefficient tables over |m| < n/2 from the half spectrum.
  auto full = [&](const SpectralField& f, int m1, int m2) -> std::complex<double> {
    auto row = [&](int m) { return static_cast<std::size_t>(m >= 0 ? m : m + n); };
    if (m1 >= 0) return f.at(row(m2), static_cast<std::size_t>(m1));
    return std::conj(f.at(row(-m2), static_cast<std::size_t>(-m1)));
  };
  const auto prod = product_padded(ah, bh);
  double worst = 0.0;
  for (int m2 = -half + 1; m2 < half; ++m2) {
    for (int m1 = 0; m1 < half; ++m1) {
      std::complex<double> acc = 0.0;
      for (int p2 = -half + 1; p2 < half; ++p2) {
        for (int p1 = -half + 1; p1 < half; ++p1) {
          const int q1 = m1 - p1, q2 = m2 - p2;
          if (std::abs(q1) >= half || std::abs(q2) >= half) continue;
          acc += full(ah, p1, p2) * full(bh, q1, q2);
        }
      }
      const auto r = static_cast<std::size_t>(m2 >= 0 ? m2 : m2 + n);
      worst = std::max(worst, std::abs(prod.at(r, static_cast<std::size_t>(m1)) - acc));
    }
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("Biot-Savart orientation and vorticity") {
  const Grid g(32, 2.0);
  const double k = g.wavenumber(2), l = g.wavenumber(1);
  const auto psi = sample(g, [&](double x, double y) { return std::cos(k * x) * std::cos(l * y); });
  const auto omega = (k * k + l * l) * psi;
  const auto v = biot_savart(omega);
  const auto [p1, p2] = gradient(psi);
  CHECK(max_diff(v.v1, p2) < 1e-12);
  CHECK(max_diff(v.v2, -1.0 * p1) < 1e-12);
  CHECK(max_diff(curl(v.v1, v.v2), omega) < 1e-11);
  CHECK(linf_norm(divergence(v.v1, v.v2)) < 1e-12);
  CHECK_FALSE(v.mean_flagged);
}

TEST_CASE("heat propagation multiplies modes by exp(-|k|^2 t)") {
  const Grid g(32, 2.0);
  const double k = g.wavenumber(3);
  const auto f = sample(g, [&](double x, double y) { return std::sin(k * x) + std::cos(k * y); });
  CHECK(max_diff(heat_propagate(f, 0.2), std::exp(-k * k * 0.2) * f) < 1e-14);
  CHECK_THROWS_AS(heat_propagate(f, -1.0), DomainError);
}

TEST_CASE("off-grid evaluation matches the trigonometric polynomial") {
  const Grid g(32, 1.0);
  const double k = g.wavenumber(1);
  auto fn = [&](double x, double y) {
    return std::cos(2 * k * x + 3 * k * y) + 0.5 * std::sin(k * x) - 0.25 * std::cos(5 * k * y);
  };
  const auto f = sample(g, fn);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    pts.push_back({x, y});
  }
  const auto vals = eval_at_points(f, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK_THAT(vals[i], WithinAbs(fn(pts[i].x, pts[i].y), 1e-12));
}

TEST_CASE("resampling a band-limited field is exact") {
  const Grid coarse(16, 2.0), fine(64, 2.0);
  const double k = coarse.wavenumber(1);
  auto fn = [&](double x, double y) { return std::sin(3 * k * x) * std::cos(2 * k * y) + 0.3; };
  CHECK(max_diff(resample(sample(coarse, fn), fine), sample(fine, fn)) < 1e-13);
  CHECK(max_diff(resample(sample(fine, fn), coarse), sample(coarse, fn)) < 1e-13);
  CHECK_THROWS_AS(resample(sample(coarse, fn), Grid(64, 1.0)), DomainError);
}

TEST_CASE("dealiasing is idempotent and the dealiased product matches the padded one") {
  const Grid g(32, 1.0);
  const auto a = dealias(forward_transform(noise(g, 5)));
  const auto b = dealias(forward_transform(noise(g, 6)));
  CHECK(l2_norm(dealias(a) - a) == 0.0);
  CHECK(l2_norm(product_dealiased(a, b) - dealias(product_padded(a, b))) < 1e-12);
}

TEST_CASE("norms") {
  const Grid g(32, 1.0);
  const auto one = sample(g, [](double, double) { return 1.0; });
  CHECK_THAT(integral(one), WithinAbs(4.0, 1e-14));
  CHECK_THAT(lp_norm(one, 3.0), WithinAbs(std::cbrt(4.0), 1e-14));
  const auto f = noise(g, 7);
  CHECK_THAT(l2_norm(forward_transform(f)), WithinAbs(l2_norm(f), 1e-12));
  const RealField* comps[] = {&f, &one};
  CHECK_THAT(lp_norm(comps, 2.0), WithinAbs(std::hypot(l2_norm(f), l2_norm(one)), 1e-12));
  CHECK_THROWS_AS(lp_norm(f, 0.5), DomainError);
}

TEST_CASE("snapshot round-trip is bit exact and corrupt input is rejected") {
  const Grid g(16, 2.5);
  const auto f = noise(g, 8);
  std::stringstream ss;
  write_snapshot(ss, f, 0.125);
  const auto snap = read_snapshot(ss);
  CHECK(snap.time == 0.125);
  CHECK(snap.field.grid() == g);
  CHECK(snap.field.values() == f.values());

  std::string bytes = ss.str();
  bytes[0] = 'X';
  std::stringstream bad(bytes);
  CHECK_THROWS(read_snapshot(bad));
  std::stringstream truncated(ss.str().substr(0, 40));
  CHECK_THROWS(read_snapshot(truncated));
}
