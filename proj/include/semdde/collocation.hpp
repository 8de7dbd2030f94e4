#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "semdde/piecewise.hpp"
#include "semdde/problem.hpp"

namespace semdde {

/// Unknowns of the discretized periodic BVP: the profile y^m (its wrap value
/// at t=0 is y^{0,m}) and mu = (T, p).
///
/// Flat layout: node value (row q, component k) at q*n_y + k for the L*m
/// storage rows of the profile, followed by the n_mu entries of mu.
struct DiscreteState {
  PeriodicPiecewisePoly poly;
  Eigen::VectorXd mu;
  NodeKind collocation = NodeKind::GaussLegendre;

  [[nodiscard]] double period() const { return mu(0); }
  [[nodiscard]] Eigen::VectorXd params() const { return mu.tail(mu.size() - 1); }
  [[nodiscard]] Eigen::Index profile_size() const { return poly.node_values().size(); }
  [[nodiscard]] Eigen::Index size() const { return profile_size() + mu.size(); }
};

Eigen::VectorXd flatten(const DiscreteState& state);
/// Inverse of flatten; mesh, degree, dimensions and collocation kind are taken
/// from `like`.
DiscreteState unflatten(const Eigen::VectorXd& x, const DiscreteState& like);

/// Collocation points t_{i,j} of the state's mesh, ordered by interval then node.
std::vector<double> collocation_points(const DiscreteState& state);

/// Point-value term coeff * y_component(time) of an affine functional.
struct PointTerm {
  double time = 0.0;
  int component = 0;
  double coeff = 1.0;
};

/// R(y, mu) = sum coeff*y_k(t*) + mu_coeffs . mu + offset.
struct AffineConstraint {
  std::vector<PointTerm> points;
  Eigen::VectorXd mu_coeffs;
  double offset = 0.0;
  /// Index into p (not mu) when the row pins a parameter, for continuation.
  std::optional<int> pinned_param;
};

class AffineConstraints {
 public:
  AffineConstraints() = default;
  explicit AffineConstraints(std::vector<AffineConstraint> rows) : rows_(std::move(rows)) {}

  [[nodiscard]] int size() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] const std::vector<AffineConstraint>& rows() const { return rows_; }

  [[nodiscard]] Eigen::VectorXd evaluate(const DiscreteState& state) const;
  /// Exact coefficient rows (n_mu x N) with respect to the flat state vector.
  [[nodiscard]] Eigen::MatrixXd jacobian(const DiscreteState& like) const;

  /// Updates the target of the row pinning parameter `param_index`.
  void pin_parameter(int param_index, double target);
  [[nodiscard]] std::optional<double> pinned_value(int param_index) const;

 private:
  std::vector<AffineConstraint> rows_;
};

/// Phase anchor y_0(0) = anchor plus one pin p_k = targets(k) per parameter.
AffineConstraints default_constraints(double anchor, const Eigen::VectorXd& targets);

/// Default constraints for a problem: the anchor is the declared equilibrium,
/// or the guess's value at t=0 when there is none; pins take the guess's p.
AffineConstraints default_constraints(const DdeProblem& problem, const DiscreteState& guess);

struct NewtonSettings {
  double tol_residual = 1e-10;
  double tol_step = 1e-12;
  int max_iter = 25;
  /// Newton steps taken even when the initial residual already meets the
  /// tolerance (polishes warm starts).
  int min_iter = 0;
  double min_damping = 1.0 / 64.0;
  /// Relative forward-difference step; column j uses fd_step * max(1, |x_j|).
  double fd_step = 1.4901161193847656e-08;
  /// Worker threads for Jacobian columns.
  int jobs = 1;

  void validate() const;
};

Eigen::VectorXd assemble_residual(const DiscreteState& state, const DdeProblem& problem,
                                  const AffineConstraints& cons);

Eigen::MatrixXd assemble_jacobian(const DiscreteState& state, const DdeProblem& problem,
                                  const AffineConstraints& cons, const NewtonSettings& settings = {});

struct NewtonResult {
  DiscreteState state;
  int iterations = 0;
  /// Max-norm of the residual before every iteration and at the end.
  std::vector<double> residual_history;
};

NewtonResult newton_solve(const DiscreteState& init, const DdeProblem& problem, const AffineConstraints& cons,
                          const NewtonSettings& settings = {});

}  // namespace semdde
