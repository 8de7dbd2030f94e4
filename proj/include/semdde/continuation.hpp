#pragma once

#include <Eigen/Dense>

#include <vector>

#include "semdde/collocation.hpp"

namespace semdde {

struct HopfData {
  double tau_hopf = 0.0;
  double omega = 0.0;
  Eigen::VectorXd equilibrium;
};

/// Purely imaginary root i*omega of lambda = alpha + beta*exp(-lambda*tau) for
/// the smallest tau > 0, for the scalar linearization y' = alpha y + beta y(t-tau).
/// Throws NoHopfError when |beta| <= |alpha|.
HopfData scalar_hopf(double alpha, double beta, Eigen::VectorXd equilibrium);

/// Hopf point of mackey_glass() at its equilibrium 1 (alpha = -1, beta = -4).
HopfData mackey_glass_hopf();

/// Hopf point of sd_quadratic() at 0: y' = -y(t - tau), so tau = pi/2, omega = 1.
HopfData sd_quadratic_hopf();

struct HopfGuessOptions {
  double amplitude = 0.01;
  double parameter_offset = 1e-3;
  NodeKind collocation = NodeKind::GaussLegendre;
};

/// Sinusoidal perturbation of the equilibrium with period 2*pi/omega at
/// tau_hopf + offset. Amplitude 0 gives the equilibrium itself.
DiscreteState hopf_initial_guess(const HopfData& hopf, const Mesh& mesh, int m, const HopfGuessOptions& opts = {});

struct BranchPoint {
  double parameter = 0.0;
  DiscreteState state;
  double amplitude = 0.0;
  double period = 0.0;
  double residual_err = 0.0;
  double phi_defect = 0.0;
  int newton_iters = 0;
};

/// Step failure that keeps the last converged point of the branch.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, std::vector<BranchPoint> partial)
      : Error(what), partial_(std::move(partial)) {}
  [[nodiscard]] const std::vector<BranchPoint>& partial() const { return partial_; }

 private:
  std::vector<BranchPoint> partial_;
};

struct ContinuationOptions {
  int param_index = 0;
  int max_bisections = 6;
  int err_grid = 10001;
  int defect_grid = 2001;
  int amplitude_grid = 2001;
  /// A step whose orbit amplitude drops below this fraction of the previous
  /// one is treated as a failed step.
  double collapse_ratio = 0.25;
};

/// Max minus min of the first component over `grid` uniform points.
double profile_amplitude(const PeriodicPiecewisePoly& poly, int grid = 2001);

/// Natural-parameter continuation in p[param_index] from p_from to p_to in
/// `steps` uniform steps. Each step is re-solved from the previous state with
/// the pin row moved, starting from a secant prediction once two points are
/// known; a failing or collapsing step is halved up to max_bisections times.
/// Returns the converged points at the step targets, start excluded.
std::vector<BranchPoint> continue_branch(const DiscreteState& start, const DdeProblem& problem,
                                         const AffineConstraints& cons, double p_from, double p_to, int steps,
                                         const NewtonSettings& settings = {}, const ContinuationOptions& opts = {});

/// Builds a branch point record (amplitude, err, defect) for a converged state.
BranchPoint make_branch_point(const DiscreteState& state, const DdeProblem& problem, const AffineConstraints& cons,
                              int newton_iters, const ContinuationOptions& opts = {});

}  // namespace semdde
