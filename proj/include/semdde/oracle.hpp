#pragma once

#include <algorithm>

#include "semdde/collocation.hpp"

namespace semdde {

/// Distance of a discrete state from the fixed point of Phi_m = L P_m g.
struct FixedPointDefect {
  /// sup over the grid of |v(t) - [Phi_m x]_1(t)|
  double sup_defect_v = 0.0;
  /// |int_0^1 P_m G(v_s, mu) ds|
  double defect_v0 = 0.0;
  /// max-norm of R_aff[v, mu]
  double defect_mu = 0.0;

  [[nodiscard]] double max() const { return std::max({sup_defect_v, defect_v0, defect_mu}); }
};

/// Evaluates the fixed-point form of the discretized BVP independently of the
/// collocation residual: w = P_m G(v_., mu) is integrated exactly and
/// v0 + int_0^t w - t int_0^1 w is compared against v on a uniform grid.
FixedPointDefect phi_m_defect(const DiscreteState& state, const DdeProblem& problem, const AffineConstraints& cons,
                              int grid = 2001);

/// The projection P_m G(v_., mu) used by phi_m_defect.
PiecewiseProjection project_rhs(const DiscreteState& state, const DdeProblem& problem);

}  // namespace semdde
