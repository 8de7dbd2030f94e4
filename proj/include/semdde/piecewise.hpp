#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

#include "semdde/nodes.hpp"

namespace semdde {

/// Shared, immutable node family for (kind, m); built once per process.
std::shared_ptr<const NodeFamilyd> cached_nodes(NodeKind kind, int m);

/// Breakpoints 0 = t_0 < t_1 < ... < t_L = 1 of the period interval.
class Mesh {
 public:
  explicit Mesh(Eigen::VectorXd breaks);
  static Mesh uniform(int intervals);

  [[nodiscard]] int intervals() const { return static_cast<int>(breaks_.size()) - 1; }
  [[nodiscard]] const Eigen::VectorXd& breaks() const { return breaks_; }
  [[nodiscard]] double left(int i) const { return breaks_(i); }
  [[nodiscard]] double right(int i) const { return breaks_(i + 1); }
  [[nodiscard]] double width(int i) const { return breaks_(i + 1) - breaks_(i); }
  [[nodiscard]] double max_width() const;

  /// Interval containing s in [0,1), half-open: a break t_i belongs to interval i.
  [[nodiscard]] int locate(double s) const;

  friend bool operator==(const Mesh& a, const Mesh& b) { return a.breaks_ == b.breaks_; }

 private:
  Eigen::VectorXd breaks_;
};

/// Wraps t into [0,1) by subtracting its floor.
[[nodiscard]] double wrap_unit(double t);

/// Continuous 1-periodic piecewise polynomial of degree m on a mesh, stored
/// by its values at Chebyshev-Lobatto representation nodes.
///
/// Storage holds L*m rows (one per distinct node, row i*m + j is node j of
/// interval i) and n_y columns. The right endpoint of interval i is row
/// (i+1)*m of the storage, wrapping to row 0 for the last interval, so
/// continuity and periodicity hold by construction. Row 0 is y(0) = y(1).
class PeriodicPiecewisePoly {
 public:
  using Function = std::function<Eigen::VectorXd(double)>;

  PeriodicPiecewisePoly(Mesh mesh, int degree, Eigen::MatrixXd node_values);

  /// Samples f at every representation node.
  static PeriodicPiecewisePoly sample(const Function& f, Mesh mesh, int degree, int dim);
  static PeriodicPiecewisePoly constant(const Eigen::VectorXd& value, Mesh mesh, int degree);

  [[nodiscard]] const Mesh& mesh() const { return mesh_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int dim() const { return static_cast<int>(values_.cols()); }
  [[nodiscard]] const NodeFamilyd& rep_family() const { return *rep_; }
  [[nodiscard]] const Eigen::MatrixXd& node_values() const { return values_; }

  /// Values of interval i at its m+1 nodes, endpoints included.
  [[nodiscard]] const Eigen::MatrixXd& interval_values(int i) const { return local_[i]; }
  /// Time of node j (0..m) of interval i; endpoints are exactly the breaks.
  [[nodiscard]] double node_time(int i, int j) const;

  [[nodiscard]] Eigen::VectorXd eval(double t) const;
  /// Derivative; at a break the right-interval one-sided derivative.
  [[nodiscard]] Eigen::VectorXd eval_deriv(double t) const;

  /// Evaluation on interval i without wrapping or lookup; s may be any point of
  /// the closed interval.
  [[nodiscard]] Eigen::VectorXd eval_in(int i, double s) const;

 private:
  Mesh mesh_;
  int degree_;
  std::shared_ptr<const NodeFamilyd> rep_;
  Eigen::MatrixXd values_;
  std::vector<Eigen::MatrixXd> local_;
  std::vector<Eigen::MatrixXd> local_deriv_;
};

/// Piecewise polynomial of degree m-1 interpolating at m collocation nodes per
/// interval; no continuity across breaks (an element of the range of P_m).
class PiecewiseProjection {
 public:
  PiecewiseProjection(Mesh mesh, NodeKind kind, int m, Eigen::MatrixXd node_values);

  [[nodiscard]] const Mesh& mesh() const { return mesh_; }
  /// Number of nodes per interval; the polynomial degree is m-1.
  [[nodiscard]] int nodes_per_interval() const { return m_; }
  [[nodiscard]] int degree() const { return m_ - 1; }
  [[nodiscard]] int dim() const { return static_cast<int>(values_.cols()); }
  [[nodiscard]] const NodeFamilyd& family() const { return *family_; }
  [[nodiscard]] const Eigen::MatrixXd& node_values() const { return values_; }
  [[nodiscard]] double node_time(int i, int j) const;

  [[nodiscard]] Eigen::VectorXd eval(double t) const;
  [[nodiscard]] Eigen::VectorXd eval_in(int i, double s) const;

 private:
  Mesh mesh_;
  int m_;
  std::shared_ptr<const NodeFamilyd> family_;
  Eigen::MatrixXd values_;
};

/// Interpolation projection P_m: samples f at the m collocation nodes of every
/// interval.
PiecewiseProjection project(const std::function<Eigen::VectorXd(double)>& f, const Mesh& mesh, int m,
                            NodeKind kind = NodeKind::GaussLegendre);

/// Exact integral over [a,b] of the stored piecewise polynomial, 0 <= a <= b <= 1.
Eigen::VectorXd integrate(const PeriodicPiecewisePoly& p, double a, double b);
Eigen::VectorXd integrate(const PiecewiseProjection& p, double a, double b);

/// Re-represents p on another mesh and degree by sampling its values.
PeriodicPiecewisePoly resample(const PeriodicPiecewisePoly& p, const Mesh& mesh, int degree);

}  // namespace semdde
