#include "bml/geometry.hpp"

#include <algorithm>

namespace bml {

double operator_norm(const Mat2& m) {
  // Largest eigenvalue of M^T M in closed form.
  const double p = m.a[0] * m.a[0] + m.a[2] * m.a[2];
  const double q = m.a[0] * m.a[1] + m.a[2] * m.a[3];
  const double r = m.a[1] * m.a[1] + m.a[3] * m.a[3];
  const double half_trace = 0.5 * (p + r);
  const double disc = std::hypot(0.5 * (p - r), q);
  return std::sqrt(std::max(0.0, half_trace + disc));
}

}  // namespace bml
