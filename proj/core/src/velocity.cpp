#include "bml/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bml/error.hpp"
#include "bml/fft.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

std::pair<RealField, RealField> VelocityTimeline::on_grid(double t, const Grid& g) const {
  std::vector<Vec2> nodes;
  nodes.reserve(g.size());
  for (std::size_t j = 0; j < g.n(); ++j) {
    for (std::size_t i = 0; i < g.n(); ++i) nodes.push_back({g.coord(i), g.coord(j)});
  }
  std::vector<Vec2> vel(nodes.size());
  sample(t, nodes, vel, {});
  RealField v1(g, "v1");
  RealField v2(g, "v2");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    v1[k] = vel[k].x;
    v2[k] = vel[k].y;
  }
  return {std::move(v1), std::move(v2)};
}

void ConstantVelocity::sample(double, std::span<const Vec2> points, std::span<Vec2> velocity,
                              std::span<Mat2> gradient) const {
  for (std::size_t i = 0; i < points.size(); ++i) velocity[i] = v_;
  for (auto& g : gradient) g = Mat2::zero();
}

void AnalyticVelocity::sample(double t, std::span<const Vec2> points, std::span<Vec2> velocity,
                              std::span<Mat2> gradient) const {
  for (std::size_t i = 0; i < points.size(); ++i) velocity[i] = v_(t, points[i]);
  for (std::size_t i = 0; i < gradient.size(); ++i) gradient[i] = j_(t, points[i]);
}

AnalyticVelocity AnalyticVelocity::rotation(double omega) {
  return AnalyticVelocity(
      [omega](double, Vec2 x) { return Vec2{-omega * x.y, omega * x.x}; },
      [omega](double, Vec2) { return Mat2{{0.0, -omega, omega, 0.0}}; },
      // Unbounded on the plane; callers bound positions themselves.
      [](double) { return std::numeric_limits<double>::infinity(); },
      [omega](double) { return std::abs(omega); });
}

void SpectralVelocityTimeline::push(double t, const RealField& v1, const RealField& v2) {
  require_same_grid(grid_, v1.grid(), "SpectralVelocityTimeline::push");
  require_same_grid(grid_, v2.grid(), "SpectralVelocityTimeline::push");
  if (!snaps_.empty() && !(t > snaps_.back().t)) {
    throw DomainError("SpectralVelocityTimeline: snapshot times must increase");
  }
  Snapshot s{t, v1, v2, {}, 0.0, 0.0};
  const auto a = forward_transform(v1);
  const auto b = forward_transform(v2);
  s.spectra = {a, b, spectral_derivative(a, 0), spectral_derivative(a, 1),
               spectral_derivative(b, 0), spectral_derivative(b, 1)};
  std::vector<RealField> grads;
  for (std::size_t k = 2; k < 6; ++k) grads.push_back(inverse_transform(s.spectra[k]));
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    s.speed_sup = std::max(s.speed_sup, std::hypot(v1[k], v2[k]));
    const Mat2 J{{grads[0][k], grads[1][k], grads[2][k], grads[3][k]}};
    s.grad_sup = std::max(s.grad_sup, operator_norm(J));
  }
  snaps_.push_back(std::move(s));
}

void SpectralVelocityTimeline::drop_before(double t) {
  while (snaps_.size() > 1 && snaps_[1].t <= t) snaps_.pop_front();
}

double SpectralVelocityTimeline::first_time() const {
  if (snaps_.empty()) throw DomainError("SpectralVelocityTimeline is empty");
  return snaps_.front().t;
}

double SpectralVelocityTimeline::last_time() const {
  if (snaps_.empty()) throw DomainError("SpectralVelocityTimeline is empty");
  return snaps_.back().t;
}

std::tuple<std::size_t, std::size_t, double> SpectralVelocityTimeline::bracket(double t) const {
  if (snaps_.empty()) throw DomainError("SpectralVelocityTimeline is empty");
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  if (t < snaps_.front().t - slack || t > snaps_.back().t + slack) {
    throw DomainError("SpectralVelocityTimeline: time " + std::to_string(t) +
                      " outside the stored window");
  }
  if (snaps_.size() == 1) return {0, 0, 0.0};
  std::size_t hi = 1;
  while (hi + 1 < snaps_.size() && snaps_[hi].t < t) ++hi;
  const std::size_t lo = hi - 1;
  const double w = (t - snaps_[lo].t) / (snaps_[hi].t - snaps_[lo].t);
  return {lo, hi, std::clamp(w, 0.0, 1.0)};
}

void SpectralVelocityTimeline::sample(double t, std::span<const Vec2> points,
                                      std::span<Vec2> velocity, std::span<Mat2> gradient) const {
  const auto [lo, hi, w] = bracket(t);
  const std::size_t nf = gradient.empty() ? 2 : 6;
  const std::size_t np = points.size();
  auto evaluate = [&](const Snapshot& s) {
    std::vector<const SpectralField*> fields;
    for (std::size_t k = 0; k < nf; ++k) fields.push_back(&s.spectra[k]);
    std::vector<double> out(nf * np);
    eval_spectral_at_points(fields, points, out);
    return out;
  };
  auto values = evaluate(snaps_[lo]);
  if (w > 0.0) {
    const auto other = evaluate(snaps_[hi]);
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = (1.0 - w) * values[k] + w * other[k];
  }
  for (std::size_t p = 0; p < np; ++p) {
    velocity[p] = {values[p], values[np + p]};
    if (nf == 6) {
      gradient[p] = Mat2{{values[2 * np + p], values[3 * np + p], values[4 * np + p],
                          values[5 * np + p]}};
    }
  }
}

double SpectralVelocityTimeline::gradient_sup(double t) const {
  const auto [lo, hi, w] = bracket(t);
  return w > 0.0 ? std::max(snaps_[lo].grad_sup, snaps_[hi].grad_sup) : snaps_[lo].grad_sup;
}

double SpectralVelocityTimeline::speed_sup(double t) const {
  const auto [lo, hi, w] = bracket(t);
  return w > 0.0 ? std::max(snaps_[lo].speed_sup, snaps_[hi].speed_sup) : snaps_[lo].speed_sup;
}

std::pair<RealField, RealField> SpectralVelocityTimeline::on_grid(double t, const Grid& g) const {
  require_same_grid(grid_, g, "SpectralVelocityTimeline::on_grid");
  const auto [lo, hi, w] = bracket(t);
  RealField v1 = snaps_[lo].v1;
  RealField v2 = snaps_[lo].v2;
  if (w > 0.0) {
    v1 *= 1.0 - w;
    v2 *= 1.0 - w;
    v1 += w * snaps_[hi].v1;
    v2 += w * snaps_[hi].v2;
  }
  return {std::move(v1), std::move(v2)};
}

}  // namespace bml
