#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bml/corpus.hpp"
#include "bml/error.hpp"
#include "bml/measures.hpp"
#include "bml/spectral_ops.hpp"

using namespace bml;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

AtomicMeasure random_measure(std::mt19937_64& rng, int max_atoms) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  AtomicMeasure mu;
  for (int i = count(rng); i > 0; --i) {
    const double x = pos(rng);
    const double y = pos(rng);
    mu.add({x, y}, w(rng));
  }
  return mu;
}

/// Cellular flow on [-pi, pi]^2, divergence free.
AnalyticVelocity cellular(double a) {
  return AnalyticVelocity(
      [a](double, Vec2 x) { return Vec2{a * std::sin(x.x) * std::cos(x.y), -a * std::cos(x.x) * std::sin(x.y)}; },
      [a](double, Vec2 x) {
        return Mat2{{a * std::cos(x.x) * std::cos(x.y), -a * std::sin(x.x) * std::sin(x.y),
                     a * std::sin(x.x) * std::sin(x.y), -a * std::cos(x.x) * std::cos(x.y)}};
      },
      [a](double) { return std::abs(a); }, [a](double) { return std::abs(a); });
}

}  // namespace

TEST_CASE("measure construction and basic functionals") {
  AtomicMeasure mu({{{1.0, 0.0}, 0.25}, {{0.0, -3.0}, 0.5}});
  mu.add({0.0, 0.0}, 0.0);
  CHECK(mu.size() == 3);
  CHECK(total_variation(mu) == 0.75);
  CHECK(support_radius(mu) == 3.0);
  CHECK(support_radius(AtomicMeasure{}) == 0.0);
  CHECK_THROWS_AS(mu.add({0.0, 0.0}, -1.0), DomainError);
  CHECK_THROWS_AS(mu.add({NAN, 0.0}, 1.0), DomainError);
  std::vector<Vec2> two(2);
  CHECK_THROWS_AS(mu.set_positions(two), DomainError);
}

TEST_CASE("mollifier mass constant") {
  // Polar quadrature of exp(-1/(1-r^2)) r dr over [0,1], times 2 pi.
  const int m = 200000;
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    const double r = (k + 0.5) / m;
    s += std::exp(-1.0 / (1.0 - r * r)) * r;
  }
  CHECK_THAT(2.0 * std::numbers::pi * s / m, WithinRel(kMollifierMass, 1e-9));
  CHECK(mollifier({1.0, 0.0}) == 0.0);
  CHECK_THAT(mollifier({0.0, 0.0}), WithinRel(std::exp(-1.0) / kMollifierMass, 1e-15));
}

TEST_CASE("mollification conserves each atom's mass") {
  const Grid g(64, 2.0);
  AtomicMeasure mu({{{0.3, -0.2}, 0.7}, {{-1.9, 1.95}, 0.4}});
  const auto d = mollify(mu, 4, g);
  CHECK_THAT(integral(d.field), WithinAbs(1.1, 1e-14));
  CHECK(min_value(d.field) >= 0.0);
  CHECK_THROWS_AS(mollify(mu, 16, g), DomainError);
  CHECK_THROWS_AS(mollify(mu, 0, g), DomainError);
}

TEST_CASE("atoms further apart than 2/n give disjoint stencils") {
  const Grid g(128, 2.0);
  const int n = 4;
  AtomicMeasure a({{{-0.3, 0.0}, 1.0}});
  AtomicMeasure b({{{0.3 + 1e-9, 0.0}, 1.0}});
  const auto fa = mollify(a, n, g).field;
  const auto fb = mollify(b, n, g).field;
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(fa[k] * fb[k] == 0.0);
}

TEST_CASE("BL distance of two Dirac masses") {
  // sup a f(x) - b f(y) = min(a, b) min(|x-y|, 2) + |a - b|.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), w(0.1, 1.0);
  for (int i = 0; i < 40; ++i) {
    const Vec2 x{pos(rng), pos(rng)}, y{pos(rng), pos(rng)};
    const double a = w(rng), b = w(rng);
    const double expect = std::min(a, b) * std::min(norm(x - y), 2.0) + std::abs(a - b);
    CHECK_THAT(bl_distance(AtomicMeasure({{x, a}}), AtomicMeasure({{y, b}})), WithinAbs(expect, 1e-12));
  }
}

TEST_CASE("BL distance against min-cost-flow primal values") {
  // Values of min sum pi_ij |x_i - x_j| + sum |s_i| over flows pi >= 0 and
  // free sources s with div(pi) + s = mu - nu, solved offline with HiGHS.
  struct Case {
    std::vector<Atom> mu, nu;
    double value;
  };
  const std::vector<Case> cases = {
      {{{{1.589, 1.103}, 0.303}, {{-0.799, 1.494}, 0.105}, {{1.285, 1.188}, 0.521}, {{-0.788, -0.886}, 0.329}},
       {{{-0.22, 0.018}, 0.598}, {{1.982, 1.171}, 0.66}, {{1.956, -1.139}, 0.244}},
       1.4441111835988},
      {{{{-1.824, -1.857}, 0.563}, {{-0.135, 1.669}, 0.666}, {{0.056, -0.013}, 0.323}, {{-1.953, -1.23}, 0.723}},
       {{{-1.198, -0.522}, 0.103}, {{1.32, -1.382}, 0.341}, {{1.521, 0.039}, 0.862}},
       3.30910117667079},
      {{{{0.967, -1.634}, 0.587}, {{0.031, 1.485}, 0.425}, {{0.393, -1.763}, 0.449}},
       {{{-0.708, -1.399}, 0.835}, {{-0.482, 1.915}, 0.631}, {{0.42, 0.552}, 0.709}},
       2.57403375377837},
      {{{{-0.239, -1.042}, 0.462}, {{-1.613, 1.871}, 0.294}, {{0.687, -0.798}, 0.887}, {{0.649, -1.474}, 0.861}},
       {{{1.78, 1.616}, 0.613}},
       3.117},
      {{{{-1.23, 1.712}, 0.597}, {{-1.278, 1.536}, 0.677}}, {{{0.279, -0.495}, 0.47}}, 1.744},
  };
  for (const auto& c : cases) {
    CHECK_THAT(bl_distance(AtomicMeasure(c.mu), AtomicMeasure(c.nu)), WithinAbs(c.value, 1e-9));
  }
}

TEST_CASE("BL distance is a metric on random triples") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    const auto a = random_measure(rng, 4);
    const auto b = random_measure(rng, 4);
    const auto c = random_measure(rng, 4);
    CHECK(bl_distance(a, b) == bl_distance(b, a));
    CHECK(bl_distance(a, a) == 0.0);
    CHECK(bl_distance(a, c) <= bl_distance(a, b) + bl_distance(b, c) + 1e-9);
    CHECK(bl_distance(a, b) <= total_variation(a) + total_variation(b) + 1e-12);
  }
}

TEST_CASE("coincident atoms merge and zero weights are ignored") {
  AtomicMeasure a({{{0.0, 0.0}, 0.3}, {{0.0, 0.0}, 0.2}, {{5.0, 5.0}, 0.0}});
  AtomicMeasure b({{{0.0, 0.0}, 0.5}});
  CHECK(bl_distance(a, b) == 0.0);
  CHECK(bl_distance(AtomicMeasure{}, AtomicMeasure{}) == 0.0);
  CHECK_THAT(bl_distance(AtomicMeasure{}, b), WithinAbs(0.5, 1e-15));
}

TEST_CASE("transport along a rigid rotation") {
  const auto rot = AnalyticVelocity::rotation(1.0);
  AtomicMeasure mu({{{1.5, 0.0}, 0.4}, {{0.0, -0.5}, 0.6}});
  TransportTrace trace;
  const auto out = transport_atoms(mu, rot, 0.0, std::numbers::pi / 2, 0.01, &trace);
  CHECK_THAT(out.atoms()[0].position.x, WithinAbs(0.0, 1e-9));
  CHECK_THAT(out.atoms()[0].position.y, WithinAbs(1.5, 1e-9));
  CHECK_THAT(out.atoms()[1].position.x, WithinAbs(0.5, 1e-9));
  CHECK_THAT(out.atoms()[1].position.y, WithinAbs(0.0, 1e-9));
  CHECK(total_variation(out) == total_variation(mu));
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    CHECK(trace.support[i] <= trace.support_bound[i] + 1e-12);
  }
  CHECK_THROWS_AS(transport_atoms(mu, rot, 1.0, 0.0, 0.01), DomainError);
  CHECK_THROWS_AS(transport_atoms(mu, rot, 0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("equicontinuity: displacement bounded by speed times elapsed time") {
  const auto v = cellular(0.8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-1.5, 1.5), w(0.1, 1.0);
  AtomicMeasure mu;
  for (int i = 0; i < 6; ++i) {
    const double x = pos(rng);
    const double y = pos(rng);
    mu.add({x, y}, w(rng));
  }
  std::vector<std::pair<double, AtomicMeasure>> hist{{0.0, mu}};
  for (int k = 1; k <= 10; ++k) hist.push_back({0.1 * k, transport_atoms(hist.back().second, v, 0.1 * (k - 1), 0.1 * k, 0.01)});
  for (std::size_t i = 0; i < hist.size(); ++i) {
    for (std::size_t j = i + 1; j < hist.size(); ++j) {
      const double d = bl_distance(hist[j].second, hist[i].second);
      CHECK(d <= total_variation(mu) * 0.8 * (hist[j].first - hist[i].first) + 1e-9);
    }
  }
}

TEST_CASE("Eulerian and Lagrangian transports of the same density agree") {
  // rho_E(t, X(t, y)) = rho_0(y) for incompressible flow; the L1 defect over
  // a fixed lattice of labels bounds the BL distance up to quadrature error.
  const auto v = cellular(0.5);
  const Grid labels(32, std::numbers::pi);
  AtomicMeasure src({{{0.4, -0.3}, 1.0}});
  std::vector<Vec2> y;
  for (std::size_t j = 0; j < labels.n(); ++j) {
    for (std::size_t i = 0; i < labels.n(); ++i) y.push_back({labels.coord(i), labels.coord(j)});
  }
  AtomicMeasure cloud;
  for (const auto& p : y) cloud.add(p, 1.0);
  const double T = 0.5;
  const auto moved = transport_atoms(cloud, v, 0.0, T, 0.005).positions();

  std::vector<double> defects;
  for (std::size_t n : {32, 64, 128}) {
    const Grid g(n, std::numbers::pi);
    const auto rho0 = mollify(src, 1, g).field;
    const auto rhoT = eulerian_advect_density(rho0, v, 0.0, T, 0.4 * g.spacing());
    const auto at_x = eval_at_points(rhoT, moved);
    const auto at_y = eval_at_points(rho0, y);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += std::abs(at_x[k] - at_y[k]);
    defects.push_back(s * labels.cell_area());
  }
  INFO(defects[0] << " " << defects[1] << " " << defects[2]);
  CHECK(defects[1] < 0.25 * defects[0]);
  CHECK(defects[2] < 0.25 * defects[1]);
  CHECK(defects[2] < 5e-3);
}

TEST_CASE("measure CSV round-trip and error reporting") {
  AtomicMeasure mu({{{0.1, -1.0 / 3.0}, 0.7}, {{std::numbers::pi, 2.0}, 1e-300}});
  std::stringstream ss;
  write_measure_csv(ss, mu);
  CHECK(ss.str().rfind("# atomic-measure v1\nx,y,weight\n", 0) == 0);
  CHECK(read_measure_csv(ss) == mu);

  std::stringstream missing("x,y,weight\n1,2,3\n");
  CHECK_THROWS_AS(read_measure_csv(missing), DomainError);
  std::stringstream bad("# atomic-measure v1\nx,y,weight\n1,2,3\n1,zz,3\n");
  CHECK_THROWS_WITH(read_measure_csv(bad), ContainsSubstring("line 4"));
  std::stringstream negative("# atomic-measure v1\nx,y,weight\n1,2,-3\n");
  CHECK_THROWS_AS(read_measure_csv(negative), DomainError);
}
