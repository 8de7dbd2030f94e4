#include <gtest/gtest.h>

#include <cmath>

#include "semdde/continuation.hpp"
#include "semdde/oracle.hpp"

namespace semdde {
namespace {

TEST(PhiDefect, ZeroForTheEquilibrium) {
  const DdeProblem mg = mackey_glass();
  const DiscreteState eq{PeriodicPiecewisePoly::constant(Eigen::VectorXd::Ones(1), Mesh::uniform(3), 6),
                         Eigen::Vector2d(1.5, 0.9)};
  const FixedPointDefect d = phi_m_defect(eq, mg, default_constraints(mg, eq));
  EXPECT_LT(d.max(), 1e-15);
}

TEST(PhiDefect, SmallForConvergedOrbitLargeForPerturbedOne) {
  const DdeProblem mg = mackey_glass();
  const DiscreteState guess = hopf_initial_guess(mackey_glass_hopf(), Mesh::uniform(11), 6);
  const AffineConstraints cons = default_constraints(mg, guess);
  NewtonSettings s;
  const NewtonResult res = newton_solve(guess, mg, cons, s);
  EXPECT_LE(phi_m_defect(res.state, mg, cons).max(), 100 * s.tol_residual);

  DiscreteState bent = res.state;
  bent.mu(0) *= 1.01;
  const FixedPointDefect d = phi_m_defect(bent, mg, cons);
  EXPECT_GT(d.sup_defect_v, 1e-6);
  EXPECT_EQ(d.defect_mu, 0.0);
}

TEST(PhiDefect, ReportsConstraintViolation) {
  const DdeProblem mg = mackey_glass();
  const DiscreteState eq{PeriodicPiecewisePoly::constant(Eigen::VectorXd::Ones(1), Mesh::uniform(2), 4),
                         Eigen::Vector2d(1.5, 0.9)};
  const AffineConstraints pinned = default_constraints(1.0, Eigen::VectorXd::Constant(1, 0.7));
  EXPECT_NEAR(phi_m_defect(eq, mg, pinned).defect_mu, 0.2, 1e-15);
}

TEST(PhiDefect, MeanOfRightHandSideShowsUpInV0Defect) {
  // y' = a y with constant y = 1: P_m G = T a, whose mean is not zero
  DdeProblem lin;
  lin.name = "linear";
  lin.num_params = 1;
  lin.max_delay = [](const Eigen::VectorXd&) { return 0.0; };
  lin.rhs = [](const History& e, const Eigen::VectorXd& a) { return Eigen::VectorXd(a(0) * e(0.0)); };
  const DiscreteState one{PeriodicPiecewisePoly::constant(Eigen::VectorXd::Ones(1), Mesh::uniform(2), 3),
                          Eigen::Vector2d(2.0, 0.25)};
  const FixedPointDefect d = phi_m_defect(one, lin, default_constraints(1.0, Eigen::VectorXd::Constant(1, 0.25)));
  EXPECT_NEAR(d.defect_v0, 0.5, 1e-15);
  // the mean is removed from the integral, so the profile itself is reproduced
  EXPECT_LT(d.sup_defect_v, 1e-15);
}

TEST(PhiDefect, ProjectionUsesCollocationNodes) {
  const DdeProblem mg = mackey_glass();
  const DiscreteState guess = hopf_initial_guess(mackey_glass_hopf(), Mesh::uniform(2), 5);
  const PiecewiseProjection w = project_rhs(guess, mg);
  EXPECT_EQ(w.nodes_per_interval(), 5);
  const RescaledRhs g(mg, guess.poly);
  const double t = w.node_time(1, 2);
  EXPECT_NEAR(w.eval(t)(0), g(t, guess.mu)(0), 1e-14);
}

TEST(PhiDefect, ValidatesArguments) {
  const DdeProblem mg = mackey_glass();
  DiscreteState s{PeriodicPiecewisePoly::constant(Eigen::VectorXd::Ones(1), Mesh::uniform(2), 4),
                  Eigen::Vector2d(1.5, 0.9)};
  const AffineConstraints c = default_constraints(mg, s);
  EXPECT_THROW(phi_m_defect(s, mg, c, 1), InvalidArgument);
  s.mu(0) = 0.0;
  EXPECT_THROW(phi_m_defect(s, mg, c), InvalidArgument);
}

}  // namespace
}  // namespace semdde
