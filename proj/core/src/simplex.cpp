#include "bml/simplex.hpp"

#include <cmath>
#include <limits>

#include "bml/error.hpp"

namespace bml {

LpSolution solve_lp(const LinearProgram& lp, double tolerance) {
  const std::size_t nv = lp.objective.size();
  const std::size_t m = lp.rows.size();
  if (lp.rhs.size() != m) throw DomainError("solve_lp: rhs size mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.rows[i].size() != nv) throw DomainError("solve_lp: row width mismatch");
    if (!(lp.rhs[i] >= 0.0)) throw DomainError("solve_lp: rhs must be nonnegative");
  }

  // Tableau columns: nv structural, m slack, then rhs.
  const std::size_t width = nv + m + 1;
  std::vector<double> tab((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * width + c]; };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nv; ++j) at(i, j) = lp.rows[i][j];
    at(i, nv + i) = 1.0;
    at(i, width - 1) = lp.rhs[i];
  }
  // Objective row holds reduced costs -c.
  for (std::size_t j = 0; j < nv; ++j) at(m, j) = -lp.objective[j];

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = nv + i;

  LpSolution sol;
  const std::size_t pivot_cap = 50 * (m + nv) + 1000;
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (at(m, j) < -tolerance) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = at(i, enter);
      if (a <= tolerance) continue;
      const double ratio = at(i, width - 1) / a;
      if (ratio < best - tolerance ||
          (std::abs(ratio - best) <= tolerance && leave < m && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) throw InternalError("solve_lp: problem is unbounded");
    if (++sol.pivots > pivot_cap) throw InternalError("solve_lp: pivot limit exceeded");

    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= factor * at(leave, c);
    }
    basis[leave] = enter;
  }

  sol.x.assign(nv, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < nv) sol.x[basis[i]] = at(i, width - 1);
  }
  sol.value = at(m, width - 1);
  return sol;
}

}  // namespace bml
