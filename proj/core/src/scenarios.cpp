#include "bml/scenarios.hpp"

#include <algorithm>

#include "bml/corpus.hpp"
#include "bml/error.hpp"
#include "bml/spectral_ops.hpp"

namespace bml {

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"single_atom", "two_atom", "rotation_test"};
  return names;
}

SolverState make_scenario(const std::string& name, const Grid& g) {
  const double L = g.half_length();
  SolverState s{0.0, RealField(g, "theta"), RealField(g, "omega"), {}};
  if (name == "single_atom") {
    s.atoms.add({0.0, 0.0}, 1.0);
  } else if (name == "two_atom") {
    const double a = L / 8.0;
    s.atoms.add({-a, 0.0}, 0.5);
    s.atoms.add({a, 0.0}, 0.5);
    s.theta = gaussian_bump(g, -a, 0.0, L / 16.0, 0.1);
    s.theta += gaussian_bump(g, a, 0.0, L / 16.0, 0.1);
    s.theta.set_label("theta");
  } else if (name == "rotation_test") {
    s.atoms.add({L / 4.0, 0.0}, 1.0);
    auto w = gaussian_bump(g, 0.0, 0.0, L / 8.0, 2.0);
    const double m = mean(w);
    for (auto& x : w.values()) x -= m;
    w.set_label("omega");
    s.omega = std::move(w);
  } else {
    throw DomainError("unknown scenario '" + name + "'");
  }
  return s;
}

}  // namespace bml
