#include "semdde/problem.hpp"

#include <cmath>
#include <string>

namespace semdde {

namespace {

double require_positive_delay(const Eigen::VectorXd& p, const char* who) {
  if (p.size() < 1) throw InvalidArgument(std::string(who) + ": missing delay parameter");
  if (!(p(0) > 0.0)) throw InvalidArgument(std::string(who) + ": tau must be positive");
  return p(0);
}

}  // namespace

DdeProblem mackey_glass() {
  constexpr double a = -1.0;
  constexpr double b = 2.0;
  constexpr double c = 10.0;
  DdeProblem prob;
  prob.name = "mackey_glass";
  prob.dim = 1;
  prob.num_params = 1;
  prob.max_delay = [](const Eigen::VectorXd& p) { return require_positive_delay(p, "mackey_glass"); };
  prob.rhs = [=](const History& e, const Eigen::VectorXd& p) {
    const double tau = require_positive_delay(p, "mackey_glass");
    const double now = e(0.0)(0);
    const double lag = e(-tau)(0);
    Eigen::VectorXd out(1);
    out(0) = a * now + b * lag / (1.0 + std::pow(lag, c));
    return out;
  };
  prob.equilibrium = Eigen::VectorXd::Ones(1);
  prob.default_params = Eigen::VectorXd::Constant(1, 1.0);
  return prob;
}

DdeProblem sd_quadratic(double amplitude_bound) {
  DdeProblem prob;
  prob.name = "sd_quadratic";
  prob.dim = 1;
  prob.num_params = 1;
  prob.max_delay = [amplitude_bound](const Eigen::VectorXd& p) {
    return p(0) + amplitude_bound + amplitude_bound * amplitude_bound;
  };
  prob.rhs = [](const History& e, const Eigen::VectorXd& p) {
    const double y0 = e(0.0)(0);
    const double delay = p(0) + y0 + y0 * y0;
    if (delay < 0.0)
      throw NegativeDelayError("sd_quadratic: delay " + std::to_string(delay) + " is negative");
    Eigen::VectorXd out(1);
    out(0) = -e(-delay)(0);
    return out;
  };
  prob.equilibrium = Eigen::VectorXd::Zero(1);
  prob.default_params = Eigen::VectorXd::Constant(1, 0.95);
  return prob;
}

DdeProblem state_eval_example() {
  constexpr double tau_max = 1.0;
  DdeProblem prob;
  prob.name = "state_eval_example";
  prob.dim = 1;
  prob.num_params = 0;
  prob.max_delay = [](const Eigen::VectorXd&) { return tau_max; };
  prob.rhs = [](const History& e, const Eigen::VectorXd&) {
    const double query = e(0.0)(0);
    if (query < -tau_max || query > 0.0)
      throw OutOfWindowError("state_eval_example: query point " + std::to_string(query) +
                             " outside [-tau_max, 0]");
    return e(query);
  };
  prob.equilibrium = Eigen::VectorXd::Zero(1);
  return prob;
}

std::vector<std::string> problem_names() { return {"mackey_glass", "sd_quadratic"}; }

DdeProblem problem_by_name(std::string_view name) {
  if (name == "mackey_glass") return mackey_glass();
  if (name == "sd_quadratic") return sd_quadratic();
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

Eigen::VectorXd RescaledRhs::unscaled(double t, const Eigen::VectorXd& mu) const {
  const double period = mu(0);
  if (!(period > 0.0)) throw InvalidArgument("RescaledRhs: period must be positive");
  const Eigen::VectorXd p = mu.tail(mu.size() - 1);
  const History history = [&](double theta) { return profile_.eval(t + theta / period); };
  return problem_.rhs(history, p);
}

Eigen::VectorXd RescaledRhs::operator()(double t, const Eigen::VectorXd& mu) const {
  return mu(0) * unscaled(t, mu);
}

}  // namespace semdde
