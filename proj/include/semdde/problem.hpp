#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semdde/piecewise.hpp"

namespace semdde {

/// History segment y_t as seen by a right-hand side: theta <= 0 in unscaled
/// time units maps to y(t + theta).
using History = std::function<Eigen::VectorXd(double theta)>;

/// Functional differential equation y'(t) = G_FDE(y_t, p).
///
/// The right-hand side is a black box; state-dependent delays are computed
/// inside `rhs` from history queries.
struct DdeProblem {
  std::string name;
  int dim = 1;
  int num_params = 0;
  /// Declared bound tau_max on the delays, as a function of the parameters.
  std::function<double(const Eigen::VectorXd& p)> max_delay;
  std::function<Eigen::VectorXd(const History& history, const Eigen::VectorXd& p)> rhs;
  std::optional<Eigen::VectorXd> equilibrium;
  std::optional<Eigen::VectorXd> default_params;
};

/// y' = a y(t) + b y(t-tau)/(1 + y(t-tau)^c) with a=-1, b=2, c=10; p = (tau).
DdeProblem mackey_glass();

/// y' = -y(t - tau - y(t) - y(t)^2); p = (tau). The declared delay bound is
/// tau + B + B^2 for the amplitude bound B.
DdeProblem sd_quadratic(double amplitude_bound = 2.0);

/// G(y) = y(y(0)) with tau_max = 1 and no parameters.
DdeProblem state_eval_example();

/// Problem lookup by CLI name ("mackey_glass", "sd_quadratic").
DdeProblem problem_by_name(std::string_view name);
[[nodiscard]] std::vector<std::string> problem_names();

/// G(v_t, mu) = T * G_FDE(v(t + (.)/T), p) for the periodic profile v and
/// mu = (T, p).
class RescaledRhs {
 public:
  RescaledRhs(const DdeProblem& problem, const PeriodicPiecewisePoly& profile)
      : problem_(problem), profile_(profile) {}

  [[nodiscard]] Eigen::VectorXd operator()(double t, const Eigen::VectorXd& mu) const;

  /// The unscaled G_FDE(v(t + (.)/T), p), without the factor T.
  [[nodiscard]] Eigen::VectorXd unscaled(double t, const Eigen::VectorXd& mu) const;

 private:
  const DdeProblem& problem_;
  const PeriodicPiecewisePoly& profile_;
};

}  // namespace semdde
