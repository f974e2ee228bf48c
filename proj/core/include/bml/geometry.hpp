#pragma once

#include <array>
#include <cmath>

namespace bml {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 matrix: {a11, a12, a21, a22}.
struct Mat2 {
  std::array<double, 4> a{};

  static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
  static Mat2 zero() { return Mat2{}; }

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(2 * i + j)]; }
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(2 * i + j)]; }

  Mat2& operator+=(const Mat2& o) {
    for (std::size_t k = 0; k < 4; ++k) a[k] += o.a[k];
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    for (std::size_t k = 0; k < 4; ++k) a[k] -= o.a[k];
    return *this;
  }
  friend Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
  friend Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
  friend Mat2 operator*(double s, Mat2 m) {
    for (auto& v : m.a) v *= s;
    return m;
  }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return Mat2{{x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
                 x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]}};
  }
  friend Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m.a[0] * v.x + m.a[1] * v.y, m.a[2] * v.x + m.a[3] * v.y};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline double det(const Mat2& m) { return m.a[0] * m.a[3] - m.a[1] * m.a[2]; }

/// Spectral (operator 2-) norm, i.e. the largest singular value.
double operator_norm(const Mat2& m);

}  // namespace bml
