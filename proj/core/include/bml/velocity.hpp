#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "bml/geometry.hpp"
#include "bml/grid.hpp"

namespace bml {

/// Time-dependent velocity field that can be sampled at arbitrary points.
/// Gradients use J(a, b) = d v_a / d x_b.
class VelocityTimeline {
 public:
  virtual ~VelocityTimeline() = default;

  /// Writes v(t, x_i) into `velocity`; if `gradient` is non-empty, also J(t, x_i).
  virtual void sample(double t, std::span<const Vec2> points, std::span<Vec2> velocity,
                      std::span<Mat2> gradient) const = 0;

  /// Upper estimate of sup_x ||J(t, x)|| (operator norm).
  virtual double gradient_sup(double t) const = 0;
  /// Upper estimate of sup_x |v(t, x)|.
  virtual double speed_sup(double t) const = 0;

  /// Velocity sampled on the nodes of `g`.
  virtual std::pair<RealField, RealField> on_grid(double t, const Grid& g) const;

  /// Periodic box the field lives on, if any.
  virtual std::optional<Grid> box() const { return std::nullopt; }

  void sample(double t, std::span<const Vec2> points, std::span<Vec2> velocity) const {
    sample(t, points, velocity, {});
  }
};

class ConstantVelocity final : public VelocityTimeline {
 public:
  explicit ConstantVelocity(Vec2 v) : v_(v) {}
  using VelocityTimeline::sample;
  void sample(double t, std::span<const Vec2> points, std::span<Vec2> velocity,
              std::span<Mat2> gradient) const override;
  double gradient_sup(double) const override { return 0.0; }
  double speed_sup(double) const override { return norm(v_); }

 private:
  Vec2 v_;
};

/// Closed-form velocity with user-supplied bounds.
class AnalyticVelocity final : public VelocityTimeline {
 public:
  using Field = std::function<Vec2(double, Vec2)>;
  using Jacobian = std::function<Mat2(double, Vec2)>;
  using Bound = std::function<double(double)>;

  AnalyticVelocity(Field v, Jacobian j, Bound speed, Bound grad)
      : v_(std::move(v)), j_(std::move(j)), speed_(std::move(speed)), grad_(std::move(grad)) {}
  using VelocityTimeline::sample;

  void sample(double t, std::span<const Vec2> points, std::span<Vec2> velocity,
              std::span<Mat2> gradient) const override;
  double gradient_sup(double t) const override { return grad_(t); }
  double speed_sup(double t) const override { return speed_(t); }

  /// Rigid rotation v = omega (-x2, x1).
  static AnalyticVelocity rotation(double omega = 1.0);

 private:
  Field v_;
  Jacobian j_;
  Bound speed_;
  Bound grad_;
};

/// Gridded velocity snapshots, spectrally interpolated in space and linearly
/// in time. Snapshots must be pushed in increasing time order; old ones can
/// be dropped to keep a sliding window.
class SpectralVelocityTimeline final : public VelocityTimeline {
 public:
  explicit SpectralVelocityTimeline(Grid grid) : grid_(grid) {}
  using VelocityTimeline::sample;

  void push(double t, const RealField& v1, const RealField& v2);
  /// Drops snapshots strictly older than the one bracketing t.
  void drop_before(double t);
  std::size_t size() const { return snaps_.size(); }
  double first_time() const;
  double last_time() const;

  void sample(double t, std::span<const Vec2> points, std::span<Vec2> velocity,
              std::span<Mat2> gradient) const override;
  double gradient_sup(double t) const override;
  double speed_sup(double t) const override;
  std::pair<RealField, RealField> on_grid(double t, const Grid& g) const override;
  std::optional<Grid> box() const override { return grid_; }

 private:
  struct Snapshot {
    double t;
    RealField v1;
    RealField v2;
    /// v1, v2, d1 v1, d2 v1, d1 v2, d2 v2
    std::vector<SpectralField> spectra;
    double grad_sup;
    double speed_sup;
  };
  /// Bracketing snapshot indices and the weight of the later one.
  std::tuple<std::size_t, std::size_t, double> bracket(double t) const;

  Grid grid_;
  std::deque<Snapshot> snaps_;
};

}  // namespace bml
