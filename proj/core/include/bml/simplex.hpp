#pragma once

#include <cstddef>
#include <vector>

namespace bml {

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 (the origin is
/// feasible, so no phase one is needed). Rows of A are dense.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
};

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

/// Dense tableau simplex with Bland's rule. Throws DomainError for malformed
/// input and InternalError if the problem is unbounded or stalls.
LpSolution solve_lp(const LinearProgram& lp, double tolerance = 1e-12);

}  // namespace bml
