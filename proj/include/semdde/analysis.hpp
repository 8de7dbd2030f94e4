#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semdde/collocation.hpp"

namespace semdde {

/// err(y,T,p) = max_t |y'(t)/T - G_FDE(y(t + (.)/T), p)| over a uniform grid
/// of grid_points in [0,1].
double residual_err(const DiscreteState& state, const DdeProblem& problem, int grid_points = 10001);

// --- convergence studies ---------------------------------------------------

struct ConvergenceRow {
  int L = 0;
  int m = 0;
  bool converged = false;
  double err = 0.0;
  double phi_defect = 0.0;
  int newton_iters = 0;
  double wall_time = 0.0;
  double period = 0.0;
  std::string failure;
};

struct ConvergenceTable {
  std::string problem;
  double parameter = 0.0;
  NodeKind kind = NodeKind::GaussLegendre;
  int grid = 10001;
  std::vector<ConvergenceRow> rows;

  [[nodiscard]] const ConvergenceRow* find(int L, int m) const;
};

struct ConvergenceOptions {
  NodeKind kind = NodeKind::GaussLegendre;
  int grid = 10001;
  int defect_grid = 2001;
  /// Worker threads over the cells of one degree (wavefront in m).
  int jobs = 1;
};

/// Solves every (L, m) cell at parameter p, warm-started from the completed
/// cell of the same L with the nearest smaller m, or from `reference` when the
/// row has none. Cell failures are recorded, not thrown.
ConvergenceTable convergence_study(const DdeProblem& problem, const DiscreteState& reference, double p,
                                   const std::vector<int>& L_list, const std::vector<int>& m_list,
                                   const NewtonSettings& settings = {}, const ConvergenceOptions& opts = {});

/// Cells counted as pre-plateau by fitted_slope: converged with
/// err > 100 eps m^2 L, the roundoff level of a differentiated degree-m
/// interpolant on intervals of width 1/L.
[[nodiscard]] bool pre_plateau(const ConvergenceRow& row);

/// Least-squares slope of ln(err) against m over the pre-plateau cells of
/// mesh L; nullopt with fewer than two such cells.
std::optional<double> fitted_slope(const ConvergenceTable& table, int L);

/// Solves a single cell from the given warm start.
ConvergenceRow solve_cell(const DdeProblem& problem, const DiscreteState& warm, double p, int L, int m,
                          const NewtonSettings& settings, const ConvergenceOptions& opts,
                          DiscreteState* solution = nullptr);

// --- interpolation bounds --------------------------------------------------

/// 4 M exp(-eta m)/(exp(eta) - 1) for the Bernstein ellipse of parameter eta.
struct BernsteinBound {
  double eta = 0.0;
  double M = 0.0;
  [[nodiscard]] double operator()(int m) const;
};

using ComplexFunction = std::function<std::complex<double>(std::complex<double>)>;

/// Point of the Bernstein ellipse with parameter eta about [a,b] at angle theta.
std::complex<double> bernstein_ellipse_point(double a, double b, double eta, double theta);

/// M = max |f| over `samples` points of the ellipse about [0,1]. Nested inner
/// ellipses are sampled as well: a nonfinite value, or an inner maximum above
/// the outer one (impossible for analytic f by the maximum principle), raises
/// AnalyticityViolation.
BernsteinBound bernstein_bound_fit(const ComplexFunction& f, double eta, int samples = 2000);

// --- circle map --------------------------------------------------------------

enum class CircleMapKind { Generic, Identity, Rotation };

struct PeriodicPoints {
  int k = 0;
  CircleMapKind kind = CircleMapKind::Generic;
  std::vector<double> points;
  /// true where |d/dt g^k| > 1
  std::vector<bool> unstable;
};

struct CircleMapResult {
  std::vector<double> grid;
  /// iterates[k-1][i] = g^k(grid[i]) mod 1
  std::vector<std::vector<double>> iterates;
  std::vector<PeriodicPoints> periodic_points;
};

/// Iterates g(t) = t - r(t) mod 1 up to k_max times on a uniform grid and
/// finds the fixed points of every iterate through the lift G^k(t) - t
/// crossing an integer, refined by bisection to 1e-10.
CircleMapResult circle_map_analysis(const std::function<double(double)>& r, int k_max, int grid = 10000);

/// r*(t) = (tau + y(t) + y(t)^2)/T on the unit-period sd_quadratic profile.
std::function<double(double)> sd_quadratic_delay_map(const DiscreteState& state);

}  // namespace semdde
