#include <catch_amalgamated.hpp>

#include <cmath>

#include "bml/error.hpp"
#include "bml/harmonic_checks.hpp"
#include "bml/spectral_ops.hpp"

using namespace bml;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FieldPair pair_on(const Grid& g, std::uint64_t seed) {
  const auto [v1, v2] = perp_gradient(random_band_limited(g, seed, 6, 1.0));
  return {"p" + std::to_string(seed), v1, v2, random_band_limited(g, seed + 50, 6, 1.0)};
}

}  // namespace

TEST_CASE("safe_ratio conventions") {
  CHECK(safe_ratio(0.0, 0.0) == 0.0);
  CHECK(std::isinf(safe_ratio(1.0, 0.0)));
  CHECK(safe_ratio(1.0, 4.0) == 0.25);
}

TEST_CASE("product estimate degenerate inputs") {
  const Grid g(64, 4.0);
  const DyadicPartition p(g);
  auto pr = pair_on(g, 1);
  SECTION("zero velocity") {
    FieldPair z{"zero", RealField(g), RealField(g), pr.theta};
    for (int v = 1; v <= 3; ++v) {
      const auto row = product_estimate(z, v, 0.5, 4.0 / 3.5, p);
      CHECK(row.lhs == 0.0);
      CHECK(row.ratio == 0.0);
    }
  }
  SECTION("constant theta, variant 1") {
    FieldPair c{"const", pr.v1, pr.v2, sample(g, [](double, double) { return 3.0; })};
    CHECK(product_estimate(c, 1, 0.5, 4.0 / 3.5, p).lhs < 1e-14);
  }
  SECTION("parameter ranges") {
    CHECK_THROWS_AS(product_estimate(pr, 1, 1.0, 2.0, p), DomainError);
    CHECK_THROWS_AS(product_estimate(pr, 2, 0.5, 3.0, p), DomainError);
    CHECK_THROWS_AS(product_estimate(pr, 3, 0.0, 2.0, p), DomainError);
    CHECK_THROWS_AS(product_estimate(pr, 4, 0.5, 2.0, p), DomainError);
    CHECK_THROWS_AS(product_estimate(pr, 1, 0.5, 0.5, p), DomainError);
  }
  SECTION("rows record the grid and a finite ratio") {
    const auto row = product_estimate(pr, 2, 0.5, 4.0 / 3.5, p);
    CHECK(row.grid_n == 64);
    CHECK(std::isfinite(row.ratio));
    CHECK(row.ratio > 0.0);
  }
}

TEST_CASE("corpus verification fits the maximal ratio") {
  const Grid g(64, 4.0);
  const auto corpus = product_corpus(g, 6, 9);
  const auto rep = verify_product_estimate(corpus, 3, 0.5, 2.0);
  REQUIRE(rep.rows.size() == 6);
  double m = 0.0;
  for (const auto& r : rep.rows) m = std::max(m, r.ratio);
  CHECK(rep.fitted_constant == m);
  // Same corpus, same result: the parallel evaluation is order independent.
  CHECK(verify_product_estimate(corpus, 3, 0.5, 2.0).fitted_constant == m);
}

TEST_CASE("cut-off level N") {
  const double s = 0.5, p = 4.0 / 3.5;
  const double a = 2.0 + 2.0 - s - 2.0 / p;
  CHECK(log_interp_level(1.0, 1.0, s, p) == 2);
  CHECK(log_interp_level(2.0, 1.0, s, p) == 2);
  CHECK(log_interp_level(std::exp2(a), 1.0, s, p) == 2);
  CHECK(log_interp_level(std::exp2(2.0 * a), 1.0, s, p) == 3);
  CHECK(log_interp_level(std::exp2(2.0 * a) * 0.999, 1.0, s, p) == 2);
  CHECK(log_interp_level(3.0 * std::exp2(4.5 * a), 3.0, s, p) == 5);
  CHECK_THROWS_AS(log_interp_level(1.0, 0.0, s, p), DomainError);
}

TEST_CASE("log-interpolation check") {
  const Grid g(64, 4.0);
  const auto bumps = bump_family(g, 4, 3);
  for (const auto& b : bumps) {
    const auto r = log_interp_check(b, 0.5, 4.0 / 3.5);
    CHECK(r.level >= 2);
    CHECK(r.level == log_interp_level(r.besov, r.l1, 0.5, 4.0 / 3.5));
    CHECK(r.lhs > 0.0);
    CHECK(std::isfinite(r.ratio));
    const double a = 2.0 + 2.0 - 0.5 - 2.0 / (4.0 / 3.5);
    const double expect = std::pow(r.l1, 1.0 / a) * std::pow(r.besov, (a - 1.0) / a) *
                              std::sqrt(std::log(std::exp(1.0) + r.besov / r.l1)) +
                          r.l1;
    CHECK_THAT(r.rhs, WithinRel(expect, 1e-13));
  }
  CHECK_THROWS_AS(log_interp_check(RealField(g), 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(log_interp_check(bumps[0], 1.5, 2.0), DomainError);
}

TEST_CASE("exponential weights against quadrature") {
  for (double lam : {0.0, 1e-4, 0.3, 7.0, 900.0}) {
    for (double tau : {0.01, 0.5}) {
      const auto w = exp_weights(lam, tau);
      // Composite Simpson on int_0^tau e^{-lam (tau - s)} {1, s/tau} ds.
      const int m = 200000;
      const double h = tau / m;
      double i1 = 0.0, i2 = 0.0;
      for (int k = 0; k <= m; ++k) {
        const double s = k * h;
        const double c = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        const double e = std::exp(-lam * (tau - s));
        i1 += c * e;
        i2 += c * e * s / tau;
      }
      i1 *= h / 3.0;
      i2 *= h / 3.0;
      CHECK_THAT(w.phi1, WithinRel(i1, 1e-9));
      CHECK_THAT(w.phi2, WithinRel(i2, 1e-9));
      CHECK(w.decay == std::exp(-lam * tau));
    }
  }
}

TEST_CASE("heat smoothing closed forms") {
  const Grid g(32, 2.0);
  const double k = g.wavenumber(3);
  const auto mode = sample(g, [&](double x, double y) { return std::cos(k * x) * std::cos(k * y); });
  const double lam = 2.0 * k * k;

  const Forcing linear = [&](double t) { return t * mode; };
  const auto r = heat_smoothing_check(RealField(g), linear, 0.5, 2.0, 0.4, 8);
  // u(t) = (t / lam - (1 - e^{-lam t}) / lam^2) mode
  const double T = 0.4;
  const double c = T / lam + std::expm1(-lam * T) / (lam * lam);
  CHECK(linf_norm(r.final_state - c * mode) < 1e-13);
  CHECK(r.times.size() == 9);
  CHECK(std::isfinite(r.ratio));

  const Forcing none = [&](double) { return RealField(g); };
  const auto d = heat_smoothing_check(mode, none, 0.5, 2.0, 1.0, 4);
  CHECK(linf_norm(d.final_state - std::exp(-lam) * mode) < 1e-14);
  CHECK(d.ratio <= 1.0);
  CHECK_THROWS_AS(heat_smoothing_check(mode, none, 0.5, 2.0, 0.0, 4), DomainError);
  CHECK_THROWS_AS(heat_smoothing_check(mode, none, 0.5, 2.0, 1.0, 0), DomainError);
}
