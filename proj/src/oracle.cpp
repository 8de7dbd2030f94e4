#include "semdde/oracle.hpp"

#include <cmath>

namespace semdde {

PiecewiseProjection project_rhs(const DiscreteState& state, const DdeProblem& problem) {
  const RescaledRhs rhs(problem, state.poly);
  return project([&](double t) { return rhs(t, state.mu); }, state.poly.mesh(), state.poly.degree(),
                 state.collocation);
}

FixedPointDefect phi_m_defect(const DiscreteState& state, const DdeProblem& problem, const AffineConstraints& cons,
                              int grid) {
  if (!(state.period() > 0.0)) throw InvalidArgument("phi_m_defect: period must be positive");
  if (grid < 2) throw InvalidArgument("phi_m_defect: grid must have at least 2 points");
  const PiecewiseProjection w = project_rhs(state, problem);
  const Eigen::VectorXd v0 = state.poly.eval(0.0);
  const Eigen::VectorXd total = integrate(w, 0.0, 1.0);

  FixedPointDefect d;
  // cumulative integral, one interval piece per grid step
  Eigen::VectorXd running = Eigen::VectorXd::Zero(v0.size());
  double prev = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double t = k == grid - 1 ? 1.0 : static_cast<double>(k) / (grid - 1);
    running += integrate(w, prev, t);
    prev = t;
    const Eigen::VectorXd phi = v0 + running - t * total;
    d.sup_defect_v = std::max(d.sup_defect_v, (state.poly.eval(t) - phi).cwiseAbs().maxCoeff());
  }
  d.defect_v0 = total.cwiseAbs().maxCoeff();
  const Eigen::VectorXd r = cons.evaluate(state);
  d.defect_mu = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  return d;
}

}  // namespace semdde
