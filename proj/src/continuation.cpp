#include "semdde/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "semdde/analysis.hpp"
#include "semdde/oracle.hpp"

namespace semdde {

HopfData scalar_hopf(double alpha, double beta, Eigen::VectorXd equilibrium) {
  if (!(std::abs(beta) > std::abs(alpha)))
    throw NoHopfError("no Hopf bifurcation: |beta| <= |alpha| admits no imaginary root");
  const double omega = std::sqrt(beta * beta - alpha * alpha);
  // phase theta = omega*tau solves alpha + beta*cos(theta) = 0 with
  // sin(theta) = -omega/beta; cos is monotone on each half period
  const double pi = std::numbers::pi;
  double lo = -omega / beta > 0.0 ? 0.0 : pi;
  double hi = lo + pi;
  auto phase = [&](double theta) { return alpha + beta * std::cos(theta); };
  const double f_lo = phase(lo);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if ((phase(mid) > 0.0) == (f_lo > 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi) / omega, omega, std::move(equilibrium)};
}

HopfData mackey_glass_hopf() {
  constexpr double a = -1.0;
  constexpr double b = 2.0;
  constexpr double c = 10.0;
  // h(x) = x/(1+x^c), h'(1) = (1 + 1 - c)/4
  const double h_prime = (2.0 - c) / 4.0;
  return scalar_hopf(a, b * h_prime, Eigen::VectorXd::Ones(1));
}

HopfData sd_quadratic_hopf() { return scalar_hopf(0.0, -1.0, Eigen::VectorXd::Zero(1)); }

DiscreteState hopf_initial_guess(const HopfData& hopf, const Mesh& mesh, int m, const HopfGuessOptions& opts) {
  const double two_pi = 2.0 * std::numbers::pi;
  const Eigen::Index n_y = hopf.equilibrium.size();
  auto profile = [&](double t) {
    Eigen::VectorXd y = hopf.equilibrium;
    y(0) += opts.amplitude * std::sin(two_pi * t);
    return y;
  };
  Eigen::VectorXd mu(2);
  mu << two_pi / hopf.omega, hopf.tau_hopf + opts.parameter_offset;
  return {PeriodicPiecewisePoly::sample(profile, mesh, m, static_cast<int>(n_y)), mu, opts.collocation};
}

double profile_amplitude(const PeriodicPiecewisePoly& poly, int grid) {
  double lo = poly.eval(0.0)(0);
  double hi = lo;
  for (int k = 1; k < grid; ++k) {
    const double y = poly.eval(static_cast<double>(k) / (grid - 1))(0);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return hi - lo;
}

BranchPoint make_branch_point(const DiscreteState& state, const DdeProblem& problem, const AffineConstraints& cons,
                              int newton_iters, const ContinuationOptions& opts) {
  BranchPoint bp{state.mu(1 + opts.param_index), state, profile_amplitude(state.poly), state.period(), 0.0, 0.0,
                 newton_iters};
  bp.residual_err = residual_err(state, problem, opts.err_grid);
  bp.phi_defect = phi_m_defect(state, problem, cons, opts.defect_grid).max();
  return bp;
}

std::vector<BranchPoint> continue_branch(const DiscreteState& start, const DdeProblem& problem,
                                         const AffineConstraints& cons, double p_from, double p_to, int steps,
                                         const NewtonSettings& settings, const ContinuationOptions& opts) {
  if (steps < 1) throw InvalidArgument("continue_branch: steps must be >= 1");
  AffineConstraints rows = cons;
  DiscreteState state = start;
  double current = p_from;
  // previous converged point for the secant predictor
  std::optional<Eigen::VectorXd> prev_x;
  double prev_p = p_from;
  std::vector<BranchPoint> points;
  for (int k = 1; k <= steps; ++k) {
    const double target = k == steps ? p_to : p_from + (p_to - p_from) * k / steps;
    double step = target - current;
    int bisections = 0;
    int iters = 0;
    for (;;) {
      const double next = std::abs(target - current) <= std::abs(step) ? target : current + step;
      const Eigen::VectorXd x = flatten(state);
      Eigen::VectorXd predicted = x;
      if (prev_x && current != prev_p) predicted += (x - *prev_x) * ((next - current) / (current - prev_p));
      DiscreteState guess = unflatten(predicted, state);
      if (!(guess.period() > 0.0)) guess = state;
      guess.mu(1 + opts.param_index) = next;
      rows.pin_parameter(opts.param_index, next);
      try {
        NewtonResult res = newton_solve(guess, problem, rows, settings);
        // a sudden collapse of the orbit means Newton jumped to another branch,
        // typically the equilibrium
        if (profile_amplitude(res.state.poly, opts.amplitude_grid) <
            opts.collapse_ratio * profile_amplitude(state.poly, opts.amplitude_grid))
          throw NewtonError(NewtonError::Kind::Stagnation, "orbit collapsed during the step");
        prev_x = x;
        prev_p = current;
        state = std::move(res.state);
        iters += res.iterations;
        current = next;
        if (current == target) break;
        step = target - current;
      } catch (const NewtonError& e) {
        if (++bisections > opts.max_bisections)
          throw StepFailure("continue_branch: step to p=" + std::to_string(target) + " failed: " + e.what(),
                            std::move(points));
        step /= 2.0;
      }
    }
    points.push_back(make_branch_point(state, problem, rows, iters, opts));
  }
  return points;
}

}  // namespace semdde
