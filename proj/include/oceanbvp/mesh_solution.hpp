#pragma once

#include "oceanbvp/model.hpp"

#include <optional>
#include <vector>

namespace oceanbvp {

/// Nodal solution of one of the solvers, expressed in the physical
/// coordinate xi.
struct MeshSolution {
  std::vector<double> xi;      // finite nodes, increasing
  std::vector<State3> states;  // (u, u', u'') at each entry of xi
  /// Values held by a node placed at xi = infinity (quasi-uniform grid only).
  std::optional<State3> at_infinity;
  /// Missing initial condition: u''(0) for no-slip, u'(0) for slip.
  double beta = 0.0;
  /// Computed truncated boundary (free-boundary formulation only).
  std::optional<double> free_boundary;
};

}  // namespace oceanbvp
