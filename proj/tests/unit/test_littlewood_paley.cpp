#include <catch_amalgamated.hpp>

#include <cmath>

#include "bml/corpus.hpp"
#include "bml/error.hpp"
#include "bml/littlewood_paley.hpp"
#include "bml/spectral_ops.hpp"

using namespace bml;
using Catch::Matchers::WithinAbs;

TEST_CASE("profiles: plateau, support and telescoping") {
  CHECK(DyadicPartition::low_pass(0.0) == 1.0);
  CHECK(DyadicPartition::low_pass(0.75) == 1.0);
  CHECK(DyadicPartition::low_pass(4.0 / 3.0) == 0.0);
  CHECK(DyadicPartition::annulus(0.74) == 0.0);
  CHECK(DyadicPartition::annulus(8.0 / 3.0 + 1e-12) == 0.0);
  double prev = 1.0;
  for (double r = 0.75; r <= 1.34; r += 0.01) {
    const double v = DyadicPartition::low_pass(r);
    CHECK(v <= prev);
    prev = v;
  }
  for (double r : {0.1, 0.9, 1.7, 3.3, 11.0}) {
    double s = DyadicPartition::low_pass(r);
    for (int j = 0; j < 6; ++j) s += DyadicPartition::annulus(std::ldexp(r, -j));
    CHECK_THAT(s, WithinAbs(DyadicPartition::low_pass(std::ldexp(r, -6)), 1e-15));
  }
}

TEST_CASE("partition of unity on several lattices") {
  for (std::size_t n : {16, 64, 256}) {
    for (double L : {1.0, 3.0, 8.0}) {
      const DyadicPartition p(Grid(n, L));
      CHECK(p.partition_defect() < 1e-12);
    }
  }
  CHECK_THROWS_AS(DyadicPartition(Grid(8, 1.0)), DomainError);
}

TEST_CASE("a single mode lives in the shells its wavenumber selects") {
  const Grid g(64, 8.0);
  const DyadicPartition p(g);
  const double k = g.wavenumber(14);  // |k| = 5.5 lies where only phi_2 is nonzero
  const auto f = sample(g, [&](double x, double) { return std::cos(k * x); });
  const auto d = decompose(f, p);
  for (int j = -1; j <= p.j_max(); ++j) {
    if (j == 2) {
      CHECK(linf_norm(d.block(j) - f) < 1e-13);
    } else {
      CHECK(linf_norm(d.block(j)) < 1e-13);
    }
  }
  CHECK_THROWS_AS(d.block(p.j_max() + 1), DomainError);
  CHECK_THROWS_AS(d.block(-2), DomainError);
}

TEST_CASE("reconstruction and low sums") {
  const Grid g(64, 2.0);
  const DyadicPartition p(g);
  const auto f = random_band_limited(g, 11, 20, 0.5);
  const auto d = decompose(f, p);
  CHECK(l2_norm(d.reconstruct() - f) < 1e-12 * l2_norm(f));
  CHECK(l2_norm(d.low_sum_spectrum(-1)) == 0.0);
  CHECK(l2_norm(d.low_sum_spectrum(0) - d.block_spectrum(-1)) == 0.0);
  CHECK(l2_norm(d.low_sum_spectrum(p.j_max() + 1) - d.low_sum_spectrum(p.j_max() + 5)) == 0.0);
}

TEST_CASE("Bernstein: gradient of a shell block is bounded by its outer radius") {
  const Grid g(128, 8.0);
  const DyadicPartition p(g);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = random_band_limited(g, seed, 40, 0.0);
    const auto d = decompose(f, p);
    for (int j = -1; j <= p.j_max(); ++j) {
      const auto [g1, g2] = gradient(d.block(j));
      const double grad = std::hypot(l2_norm(g1), l2_norm(g2));
      const double block = l2_norm(d.block(j));
      const double outer = j < 0 ? 4.0 / 3.0 : std::ldexp(8.0 / 3.0, j);
      CHECK(grad <= outer * block * (1.0 + 1e-12) + 1e-300);
      CHECK(grad <= 4.0 * g.wavenumber_unit() * std::ldexp(1.0, j + 2) * block + 1e-300);
    }
  }
}

TEST_CASE("B^0_{2,2} is equivalent to L^2") {
  // sum_j phi_j^2 lies in [1/2, 1], which brackets the ratio in [1/sqrt 2, 1].
  // The measured range over this corpus is frozen as a regression bound.
  const Grid g(64, 4.0);
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto f = random_band_limited(g, 1000 + i, 20, 0.5 * (i % 4));
    const double r = besov_norm(f, BesovParams{0.0, 2.0, 2.0}) / l2_norm(f);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo >= 1.0 / std::sqrt(2.0));
  CHECK(hi <= 1.0);
  CHECK_THAT(lo, WithinAbs(0.900489, 1e-5));
  CHECK_THAT(hi, WithinAbs(0.962106, 1e-5));
}

TEST_CASE("Besov norm assembly and parameter validation") {
  const double norms[] = {1.0, 2.0, 0.5};
  CHECK_THAT(besov_from_shell_norms(norms, 1.0, kInf), WithinAbs(2.0, 0.0));
  CHECK_THAT(besov_from_shell_norms(norms, 0.0, 1.0), WithinAbs(3.5, 1e-15));
  CHECK_THAT(besov_from_shell_norms(norms, 1.0, 2.0),
             WithinAbs(std::sqrt(0.25 + 4.0 + 1.0), 1e-14));
  const Grid g(32, 1.0);
  const auto f = random_band_limited(g, 3, 8, 1.0);
  CHECK_THROWS_AS(besov_norm(f, BesovParams{0.0, 0.5, 2.0}), DomainError);
  CHECK_THROWS_AS(besov_norm(f, BesovParams{0.0, 2.0, 0.5}), DomainError);
  CHECK_THROWS_AS(besov_norm(f, BesovParams{5.0, 2.0, 2.0}), DomainError);
  const RealField* comps[] = {&f};
  CHECK_THAT(besov_norm(comps, BesovParams{0.5, 3.0, kInf}),
             WithinAbs(besov_norm(f, BesovParams{0.5, 3.0, kInf}), 1e-14));
  CHECK_THROWS_AS(weighted_sup(f, 1.0, 2.0), DomainError);
  CHECK(weighted_sup(f, 0.5, 2.0) > 0.0);
}

TEST_CASE("Bony splitting") {
  const Grid g(64, 4.0);
  const DyadicPartition p(g);
  const auto psi = random_band_limited(g, 21, 12, 1.5);
  const auto [v1, v2] = perp_gradient(psi);
  const auto theta = random_band_limited(g, 22, 15, 1.0);

  SECTION("regrouping identity") {
    for (const auto& t : bony_decomposition(v1, v2, theta, p)) {
      const auto exact = transport_block(v1, v2, theta, t.q, p);
      CHECK(l2_norm(t.low_high + t.high_low + t.remainder - exact) <= 1e-12 * (1.0 + l2_norm(exact)));
    }
  }
  SECTION("constant theta and zero velocity give zero terms") {
    const auto c = sample(g, [](double, double) { return 2.5; });
    for (const auto& t : bony_decomposition(v1, v2, c, p)) {
      CHECK(linf_norm(t.low_high) + linf_norm(t.high_low) + linf_norm(t.remainder) < 1e-13);
    }
    const RealField zero(g);
    for (const auto& t : bony_decomposition(zero, zero, theta, p)) {
      CHECK(linf_norm(t.low_high) + linf_norm(t.high_low) + linf_norm(t.remainder) == 0.0);
    }
  }
  SECTION("a sign flip in the remainder breaks the identity") {
    BonyOptions bad;
    bad.flip_remainder_sign = true;
    double worst = 0.0;
    for (const auto& t : bony_decomposition(v1, v2, theta, p, bad)) {
      const auto exact = transport_block(v1, v2, theta, t.q, p);
      worst = std::max(worst, l2_norm(t.low_high + t.high_low + t.remainder - exact));
    }
    CHECK(worst > 1e-3);
  }
  SECTION("single shell accessor and errors") {
    const auto t = bony_terms(v1, v2, theta, 2, p);
    CHECK(t.q == 2);
    CHECK_THROWS_AS(bony_terms(v1, v2, theta, p.j_max() + 1, p), DomainError);
    const auto x = sample(g, [&](double x, double) { return std::sin(g.wavenumber(1) * x); });
    CHECK_THROWS_AS(bony_decomposition(x, RealField(g), theta, p), DomainError);
  }
}
