#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "semdde/problem.hpp"

namespace semdde {
namespace {

History constant_history(double c) {
  return [c](double) { return Eigen::VectorXd::Constant(1, c); };
}

Eigen::VectorXd param(double p) { return Eigen::VectorXd::Constant(1, p); }

TEST(MackeyGlass, RightHandSideExamples) {
  const DdeProblem mg = mackey_glass();
  EXPECT_EQ(mg.dim, 1);
  EXPECT_EQ(mg.num_params, 1);
  EXPECT_DOUBLE_EQ(mg.rhs(constant_history(1.0), param(0.5))(0), 0.0);
  EXPECT_DOUBLE_EQ(mg.rhs(constant_history(0.0), param(0.7))(0), 0.0);
  EXPECT_NEAR(mg.rhs(constant_history(2.0), param(0.5))(0), -2.0 + 4.0 / 1025.0, 1e-15);
  EXPECT_DOUBLE_EQ(mg.max_delay(param(0.8)), 0.8);
}

TEST(MackeyGlass, UsesDelayedValueForTheNonlinearTerm) {
  const DdeProblem mg = mackey_glass();
  History h = [](double theta) { return Eigen::VectorXd::Constant(1, theta == 0.0 ? 0.0 : 2.0); };
  EXPECT_NEAR(mg.rhs(h, param(0.3))(0), 4.0 / 1025.0, 1e-15);
}

TEST(MackeyGlass, EquilibriumPersistsForEveryDelay) {
  const DdeProblem mg = mackey_glass();
  for (double tau : {0.1, 0.47, 1.0, 5.0}) EXPECT_EQ(mg.rhs(constant_history(1.0), param(tau))(0), 0.0);
}

TEST(MackeyGlass, RejectsNonPositiveDelay) {
  const DdeProblem mg = mackey_glass();
  EXPECT_THROW(mg.rhs(constant_history(1.0), param(0.0)), InvalidArgument);
  EXPECT_THROW(mg.rhs(constant_history(1.0), param(-1.0)), InvalidArgument);
}

TEST(SdQuadratic, RightHandSideExamples) {
  const DdeProblem sd = sd_quadratic();
  EXPECT_EQ(sd.rhs(constant_history(0.0), param(1.0))(0), 0.0);
  EXPECT_EQ(sd.rhs(constant_history(0.3), param(0.9))(0), -0.3);
  EXPECT_DOUBLE_EQ(sd.max_delay(param(1.0)), 1.0 + 2.0 + 4.0);
  // e(theta) = sin(2 pi theta): e(0) = 0, so the delay is tau and the result -e(-tau)
  History s = [](double theta) { return Eigen::VectorXd::Constant(1, std::sin(2 * std::numbers::pi * theta)); };
  EXPECT_NEAR(sd.rhs(s, param(1.0))(0), -std::sin(-2 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(sd.rhs(s, param(0.25))(0), 1.0, 1e-15);
}

TEST(SdQuadratic, StateDependentDelay) {
  const DdeProblem sd = sd_quadratic();
  // e(0) = 0.5 gives delay tau + 0.75; e(theta) = theta + 0.5 returns -(0.5 - tau - 0.75)
  History lin = [](double theta) { return Eigen::VectorXd::Constant(1, theta + 0.5); };
  EXPECT_NEAR(sd.rhs(lin, param(1.0))(0), -(0.5 - 1.75), 1e-15);
}

TEST(SdQuadratic, NegativeDelayIsAnError) {
  const DdeProblem sd = sd_quadratic();
  // tau + y + y^2 >= tau - 1/4, so tau = 0.1 and y = -0.5 gives -0.15
  EXPECT_THROW(sd.rhs(constant_history(-0.5), param(0.1)), NegativeDelayError);
}

TEST(StateEvalExample, Examples) {
  const DdeProblem ex = state_eval_example();
  const Eigen::VectorXd none(0);
  EXPECT_EQ(ex.rhs(constant_history(0.0), none)(0), 0.0);
  History ident = [](double theta) { return Eigen::VectorXd::Constant(1, theta); };
  EXPECT_EQ(ex.rhs(ident, none)(0), 0.0);
  EXPECT_EQ(ex.rhs(constant_history(-0.3), none)(0), -0.3);
  EXPECT_THROW(ex.rhs(constant_history(0.2), none), OutOfWindowError);
  EXPECT_THROW(ex.rhs(constant_history(-1.5), none), OutOfWindowError);
}

TEST(ProblemRegistry, LookupByName) {
  EXPECT_EQ(problem_by_name("mackey_glass").name, "mackey_glass");
  EXPECT_EQ(problem_by_name("sd_quadratic").name, "sd_quadratic");
  EXPECT_THROW(problem_by_name("lorenz"), InvalidArgument);
  EXPECT_EQ(problem_names().size(), 2u);
}

TEST(RescaledRhs, LinearInPeriodForConstantProfiles) {
  const DdeProblem mg = mackey_glass();
  const auto v = PeriodicPiecewisePoly::constant(Eigen::VectorXd::Constant(1, 1.7), Mesh::uniform(3), 4);
  const RescaledRhs g(mg, v);
  const Eigen::Vector2d mu1(2.0, 0.6), mu2(4.0, 0.6);
  EXPECT_NEAR(g(0.3, mu2)(0), 2 * g(0.3, mu1)(0), 1e-15);
  EXPECT_NEAR(g(0.3, mu1)(0), 2.0 * g.unscaled(0.3, mu1)(0), 1e-15);
}

TEST(RescaledRhs, QueriesTheProfileAtScaledDelays) {
  // v(t) = sin(2 pi t), T = 4, tau = 1: history at -tau is v(t - 1/4)
  const DdeProblem sd = sd_quadratic();
  auto s = [](double t) { return Eigen::VectorXd::Constant(1, std::sin(2 * std::numbers::pi * t)); };
  const auto v = PeriodicPiecewisePoly::sample(s, Mesh::uniform(8), 12, 1);
  const RescaledRhs g(sd, v);
  const Eigen::Vector2d mu(4.0, 1.0);
  // at t = 0, v(0) = 0, so the delay is exactly tau
  EXPECT_NEAR(g.unscaled(0.0, mu)(0), -std::sin(-std::numbers::pi / 2), 1e-9);
}

}  // namespace
}  // namespace semdde
