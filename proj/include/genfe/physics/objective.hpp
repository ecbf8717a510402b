#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "genfe/error.hpp"

namespace genfe {

/// g = max_i T_i over the dofs of one equation; its gradient is the unit
/// vector of the maximizing dof (lowest id on ties).
struct MaxTemperature {
  double value = 0.0;
  std::size_t dof = 0;

  std::vector<double> gradient(std::size_t numDofs) const {
    std::vector<double> g(numDofs, 0.0);
    g.at(dof) = 1.0;
    return g;
  }
};

inline MaxTemperature objectiveMaxTemperature(std::span<const double> x, std::size_t numEq = 2, std::size_t eq = 1) {
  if (numEq == 0 || eq >= numEq || x.size() < numEq) throw UsageError("objectiveMaxTemperature: bad dof layout");
  MaxTemperature best{x[eq], eq};
  for (std::size_t d = eq + numEq; d < x.size(); d += numEq)
    if (x[d] > best.value) best = {x[d], d};
  return best;
}

}  // namespace genfe
