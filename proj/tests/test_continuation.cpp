#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "semdde/continuation.hpp"
#include "semdde/oracle.hpp"

namespace semdde {
namespace {

// |i w - alpha - beta exp(-i w tau)|, zero at a Hopf point
double characteristic_residual(double alpha, double beta, const HopfData& h) {
  const std::complex<double> iw(0.0, h.omega);
  return std::abs(iw - alpha - beta * std::exp(-iw * h.tau_hopf));
}

TEST(Hopf, MackeyGlass) {
  const HopfData h = mackey_glass_hopf();
  EXPECT_NEAR(h.omega, std::sqrt(15.0), 1e-12);
  // omega tau = acos(-1/4) on the branch where sin(omega tau) = omega/4 > 0
  EXPECT_NEAR(h.tau_hopf, std::acos(-0.25) / std::sqrt(15.0), 1e-13);
  EXPECT_NEAR(h.tau_hopf, 0.4708, 5e-4);
  EXPECT_LT(characteristic_residual(-1.0, -4.0, h), 1e-13);
  EXPECT_EQ(h.equilibrium(0), 1.0);
}

TEST(Hopf, SdQuadratic) {
  const HopfData h = sd_quadratic_hopf();
  EXPECT_NEAR(h.tau_hopf, std::numbers::pi / 2, 1e-14);
  EXPECT_NEAR(h.omega, 1.0, 1e-15);
}

TEST(Hopf, GenericScalarCases) {
  for (auto [alpha, beta] : {std::pair{0.5, -2.0}, {-0.3, 1.0}, {0.0, 3.0}, {-2.0, -2.5}}) {
    const HopfData h = scalar_hopf(alpha, beta, Eigen::VectorXd::Zero(1));
    EXPECT_GT(h.tau_hopf, 0.0);
    EXPECT_LT(characteristic_residual(alpha, beta, h), 1e-12) << alpha << " " << beta;
  }
}

TEST(Hopf, NoImaginaryRoot) {
  EXPECT_THROW(scalar_hopf(-2.0, 1.0, Eigen::VectorXd::Zero(1)), NoHopfError);
  EXPECT_THROW(scalar_hopf(1.0, -1.0, Eigen::VectorXd::Zero(1)), NoHopfError);
}

TEST(HopfGuess, ShapeAndParameters) {
  const HopfData h = mackey_glass_hopf();
  const DiscreteState g = hopf_initial_guess(h, Mesh::uniform(4), 6, {0.05, 2e-3});
  EXPECT_NEAR(g.period(), 2 * std::numbers::pi / h.omega, 1e-15);
  EXPECT_NEAR(g.mu(1), h.tau_hopf + 2e-3, 1e-15);
  EXPECT_NEAR(profile_amplitude(g.poly), 0.1, 1e-4);
  const DiscreteState flat = hopf_initial_guess(h, Mesh::uniform(4), 6, {0.0, 0.0});
  EXPECT_EQ(profile_amplitude(flat.poly), 0.0);
}

class MackeyGlassBranch : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const DdeProblem mg = mackey_glass();
    const HopfData h = mackey_glass_hopf();
    const DiscreteState guess = hopf_initial_guess(h, Mesh::uniform(11), 6);
    cons_ = default_constraints(mg, guess);
    const NewtonResult start = newton_solve(guess, mg, cons_);
    branch_ = continue_branch(start.state, mg, cons_, h.tau_hopf + 1e-3, 1.0, 40);
  }
  static inline AffineConstraints cons_;
  static inline std::vector<BranchPoint> branch_;
};

TEST_F(MackeyGlassBranch, ReachesTheTarget) {
  ASSERT_EQ(branch_.size(), 40u);
  EXPECT_EQ(branch_.back().parameter, 1.0);
  EXPECT_GT(branch_.back().period, 3.0);
  EXPECT_LT(branch_.back().period, 3.2);
}

TEST_F(MackeyGlassBranch, AmplitudeStrictlyIncreasing) {
  for (std::size_t k = 1; k < branch_.size(); ++k) EXPECT_GT(branch_[k].amplitude, branch_[k - 1].amplitude);
}

TEST_F(MackeyGlassBranch, EveryPointPassesTheOracle) {
  for (const auto& p : branch_) {
    EXPECT_LE(p.phi_defect, 1e-8) << "p=" << p.parameter;
    EXPECT_GE(p.newton_iters, 1);
  }
}

TEST(Continuation, RejectsZeroSteps) {
  const DdeProblem mg = mackey_glass();
  const DiscreteState g = hopf_initial_guess(mackey_glass_hopf(), Mesh::uniform(2), 4);
  EXPECT_THROW(continue_branch(g, mg, default_constraints(mg, g), 0.5, 1.0, 0), InvalidArgument);
}

TEST(Continuation, FailureKeepsConvergedPrefix) {
  // continuing sd_quadratic towards tau = 0 must fail before the delay
  // tau + y + y^2 of the large orbit turns negative
  const DdeProblem sd = sd_quadratic();
  auto f = [](double t) { return Eigen::VectorXd::Constant(1, 0.8 * std::sin(2 * std::numbers::pi * t)); };
  const DiscreteState g{PeriodicPiecewisePoly::sample(f, Mesh::uniform(10), 5, 1), Eigen::Vector2d(8.0, 1.1)};
  const AffineConstraints c = default_constraints(sd, g);
  NewtonSettings s;
  s.max_iter = 40;
  const NewtonResult start = newton_solve(g, sd, c, s);
  ContinuationOptions opts;
  opts.max_bisections = 1;
  try {
    continue_branch(start.state, sd, c, 1.1, 0.0, 4, s, opts);
    FAIL() << "expected StepFailure";
  } catch (const StepFailure& e) {
    EXPECT_LT(e.partial().size(), 4u);
    for (const auto& p : e.partial()) EXPECT_LE(p.phi_defect, 1e-8);
  }
}

}  // namespace
}  // namespace semdde
