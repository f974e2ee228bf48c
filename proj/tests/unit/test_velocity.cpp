#include <catch_amalgamated.hpp>

#include <cmath>

#include "bml/error.hpp"
#include "bml/spectral_ops.hpp"
#include "bml/velocity.hpp"

using namespace bml;
using Catch::Matchers::WithinAbs;

namespace {

struct Shear {
  double k;
  Vec2 v(double c, Vec2 x) const { return {c * std::sin(k * x.y), c * 0.5 * std::cos(k * x.x)}; }
  Mat2 J(double c, Vec2 x) const {
    return Mat2{{0.0, c * k * std::cos(k * x.y), -c * 0.5 * k * std::sin(k * x.x), 0.0}};
  }
};

}  // namespace

TEST_CASE("spectral timeline interpolates in space and linearly in time") {
  const Grid g(32, 2.0);
  const Shear s{g.wavenumber(2)};
  auto field = [&](double c) {
    return std::pair{sample(g, [&](double x, double y) { return s.v(c, {x, y}).x; }),
                     sample(g, [&](double x, double y) { return s.v(c, {x, y}).y; })};
  };
  SpectralVelocityTimeline tl(g);
  const auto [a1, a2] = field(1.0);
  const auto [b1, b2] = field(3.0);
  tl.push(0.0, a1, a2);
  tl.push(2.0, b1, b2);
  CHECK(tl.first_time() == 0.0);
  CHECK(tl.last_time() == 2.0);

  const std::vector<Vec2> pts = {{0.3, -1.1}, {1.77, 0.05}, {-1.99, 1.4}};
  std::vector<Vec2> vel(pts.size());
  std::vector<Mat2> jac(pts.size());
  tl.sample(0.5, pts, vel, jac);  // coefficient 1 + 2 * 0.25 = 1.5
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto ve = s.v(1.5, pts[i]);
    const auto je = s.J(1.5, pts[i]);
    CHECK_THAT(vel[i].x, WithinAbs(ve.x, 1e-12));
    CHECK_THAT(vel[i].y, WithinAbs(ve.y, 1e-12));
    for (int k = 0; k < 4; ++k) CHECK_THAT(jac[i].a[k], WithinAbs(je.a[k], 1e-11));
  }
  double grid_speed = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) grid_speed = std::max(grid_speed, std::hypot(a1[k], a2[k]));
  CHECK(tl.speed_sup(0.0) == grid_speed);
  CHECK(tl.gradient_sup(1.0) >= tl.gradient_sup(0.0));

  const auto [o1, o2] = tl.on_grid(1.0, g);
  CHECK(linf_norm(o1 - 0.5 * (a1 + b1)) < 1e-15);
  CHECK(linf_norm(o2 - 0.5 * (a2 + b2)) < 1e-15);

  CHECK_THROWS_AS(tl.sample(2.5, pts, vel), DomainError);
  CHECK_THROWS_AS(tl.push(1.0, a1, a2), DomainError);
  CHECK_THROWS_AS(tl.on_grid(1.0, Grid(16, 2.0)), DomainError);

  tl.drop_before(2.0);
  CHECK(tl.size() == 1);
  tl.sample(2.0, pts, vel);
  CHECK_THAT(vel[0].x, WithinAbs(s.v(3.0, pts[0]).x, 1e-12));
}

TEST_CASE("analytic and constant velocities") {
  const auto rot = AnalyticVelocity::rotation(2.0);
  const std::vector<Vec2> pts = {{1.0, 0.5}};
  std::vector<Vec2> vel(1);
  std::vector<Mat2> jac(1);
  rot.sample(0.0, pts, vel, jac);
  CHECK(vel[0] == Vec2{-1.0, 2.0});
  CHECK(jac[0] == Mat2{{0.0, -2.0, 2.0, 0.0}});
  CHECK(rot.gradient_sup(0.0) == 2.0);
  CHECK_FALSE(rot.box().has_value());

  const ConstantVelocity c({0.5, -0.25});
  c.sample(3.0, pts, vel, jac);
  CHECK(vel[0] == Vec2{0.5, -0.25});
  CHECK(jac[0] == Mat2::zero());
  const Grid g(8, 1.0);
  const auto [v1, v2] = c.on_grid(0.0, g);
  CHECK(min_value(v1) == 0.5);
  CHECK(min_value(v2) == -0.25);
}
