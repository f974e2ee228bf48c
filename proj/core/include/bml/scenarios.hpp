#pragma once

#include <string>
#include <vector>

#include "bml/solver.hpp"

namespace bml {

/// Named initial data, sampled on any grid.
///   single_atom    unit atom at the origin, theta0 = 0, omega0 = 0
///   two_atom       half-mass atoms at (-L/8, 0) and (L/8, 0) with a matching
///                  pair of warm bumps; mirror symmetric under x1 -> -x1
///   rotation_test  unit atom at (L/4, 0) inside a mean-free Gaussian vortex
SolverState make_scenario(const std::string& name, const Grid& g);

const std::vector<std::string>& scenario_names();

}  // namespace bml
