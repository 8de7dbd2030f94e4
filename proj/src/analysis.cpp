#include "semdde/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <thread>

#include "semdde/oracle.hpp"

namespace semdde {

double residual_err(const DiscreteState& state, const DdeProblem& problem, int grid_points) {
  if (grid_points < 2) throw InvalidArgument("residual_err: grid_points must be >= 2");
  const RescaledRhs rhs(problem, state.poly);
  const double period = state.period();
  double err = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double t = static_cast<double>(k) / (grid_points - 1);
    const Eigen::VectorXd r = state.poly.eval_deriv(t) / period - rhs.unscaled(t, state.mu);
    err = std::max(err, r.cwiseAbs().maxCoeff());
  }
  return err;
}

// ---------------------------------------------------------------------------

const ConvergenceRow* ConvergenceTable::find(int L, int m) const {
  for (const auto& row : rows) {
    if (row.L == L && row.m == m) return &row;
  }
  return nullptr;
}

bool pre_plateau(const ConvergenceRow& row) {
  const double roundoff = std::numeric_limits<double>::epsilon() * row.m * row.m * row.L;
  return row.converged && row.err > 100.0 * roundoff;
}

std::optional<double> fitted_slope(const ConvergenceTable& table, int L) {
  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    if (row.L == L && pre_plateau(row)) {
      xs.push_back(row.m);
      ys.push_back(std::log(row.err));
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ConvergenceRow solve_cell(const DdeProblem& problem, const DiscreteState& warm, double p, int L, int m,
                          const NewtonSettings& settings, const ConvergenceOptions& opts, DiscreteState* solution) {
  ConvergenceRow row;
  row.L = L;
  row.m = m;
  const auto start = std::chrono::steady_clock::now();
  try {
    DiscreteState guess{resample(warm.poly, Mesh::uniform(L), m), warm.mu, opts.kind};
    guess.mu(1) = p;
    const AffineConstraints cons = default_constraints(problem, guess);
    NewtonSettings polish = settings;
    polish.min_iter = std::max(polish.min_iter, 1);
    NewtonResult res = newton_solve(guess, problem, cons, polish);
    row.converged = true;
    row.newton_iters = res.iterations;
    row.period = res.state.period();
    row.err = residual_err(res.state, problem, opts.grid);
    row.phi_defect = phi_m_defect(res.state, problem, cons, opts.defect_grid).max();
    if (solution) *solution = std::move(res.state);
  } catch (const Error& e) {
    row.converged = false;
    row.failure = e.what();
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

ConvergenceTable convergence_study(const DdeProblem& problem, const DiscreteState& reference, double p,
                                   const std::vector<int>& L_list, const std::vector<int>& m_list,
                                   const NewtonSettings& settings, const ConvergenceOptions& opts) {
  if (L_list.empty() || m_list.empty()) throw InvalidArgument("convergence_study: empty L or m list");
  for (int L : L_list) {
    if (L < 1) throw InvalidArgument("convergence_study: L must be >= 1");
  }
  for (int m : m_list) {
    if (m < 2) throw InvalidArgument("convergence_study: m must be >= 2");
  }
  std::vector<int> ls = L_list, ms = m_list;
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

  ConvergenceTable table{problem.name, p, opts.kind, opts.grid, {}};
  // last converged state per L row, the warm start for the next degree
  std::vector<std::optional<DiscreteState>> warm(ls.size());
  std::vector<std::vector<ConvergenceRow>> rows(ls.size());

  auto run = [&](std::size_t li, int m) {
    const DiscreteState& start = warm[li] ? *warm[li] : reference;
    DiscreteState sol = start;
    ConvergenceRow row = solve_cell(problem, start, p, ls[li], m, settings, opts, &sol);
    if (row.converged) warm[li] = std::move(sol);
    rows[li].push_back(std::move(row));
  };

  for (int m : ms) {
    const int jobs = std::clamp(opts.jobs, 1, static_cast<int>(ls.size()));
    if (jobs == 1) {
      for (std::size_t li = 0; li < ls.size(); ++li) run(li, m);
      continue;
    }
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t li = w; li < ls.size(); li += jobs) run(li, m);
      });
    }
  }
  for (auto& r : rows) table.rows.insert(table.rows.end(), r.begin(), r.end());
  return table;
}

// ---------------------------------------------------------------------------

double BernsteinBound::operator()(int m) const {
  return 4.0 * M * std::exp(-eta * m) / (std::exp(eta) - 1.0);
}

std::complex<double> bernstein_ellipse_point(double a, double b, double eta, double theta) {
  return {(a + b) / 2 + (a - b) / 2 * std::cosh(eta) * std::cos(theta),
          -(a - b) / 2 * std::sinh(eta) * std::sin(theta)};
}

BernsteinBound bernstein_bound_fit(const ComplexFunction& f, double eta, int samples) {
  if (!(eta > 0.0)) throw InvalidArgument("bernstein_bound_fit: eta must be positive");
  if (samples < 8) throw InvalidArgument("bernstein_bound_fit: too few samples");
  auto ellipse_max = [&](double e) {
    double best = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / samples;
      const double v = std::abs(f(bernstein_ellipse_point(0.0, 1.0, e, theta)));
      if (!std::isfinite(v))
        throw AnalyticityViolation("bernstein_bound_fit: f is not finite on the ellipse with eta=" +
                                   std::to_string(e));
      best = std::max(best, v);
    }
    return best;
  };
  const double outer = ellipse_max(eta);
  constexpr int nested = 32;
  // slack for the sampled (not exact) maximum on the outer ellipse
  constexpr double slack = 1.05;
  for (int s = 0; s < nested; ++s) {
    const double inner = ellipse_max(eta * s / nested);
    if (inner > slack * outer)
      throw AnalyticityViolation("bernstein_bound_fit: |f| inside the ellipse exceeds its boundary maximum; "
                                 "f has a singularity within eta=" + std::to_string(eta));
  }
  return {eta, outer};
}

// ---------------------------------------------------------------------------

namespace {

double lift_iterate(const std::function<double(double)>& r, double t, int k) {
  for (int n = 0; n < k; ++n) t -= r(wrap_unit(t));
  return t;
}

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

}  // namespace

CircleMapResult circle_map_analysis(const std::function<double(double)>& r, int k_max, int grid) {
  if (k_max < 1) throw InvalidArgument("circle_map_analysis: k_max must be >= 1");
  if (grid < 1000) throw InvalidArgument("circle_map_analysis: grid must be >= 1000");
  CircleMapResult out;
  out.grid.resize(grid);
  for (int i = 0; i < grid; ++i) out.grid[i] = static_cast<double>(i) / grid;

  // displacement D_k(t) = G^k(t) - t of the lift, periodic in t
  std::vector<double> lift(out.grid);
  std::vector<double> disp(grid + 1);

  // classify the map itself from D_1
  double d1_lo = std::numeric_limits<double>::infinity(), d1_hi = -d1_lo;
  for (int i = 0; i < grid; ++i) {
    const double d = -r(out.grid[i]);
    d1_lo = std::min(d1_lo, d);
    d1_hi = std::max(d1_hi, d);
  }
  constexpr double flat_tol = 1e-12;
  CircleMapKind base = CircleMapKind::Generic;
  if (d1_hi - d1_lo <= flat_tol) base = near_integer(d1_lo, flat_tol) ? CircleMapKind::Identity : CircleMapKind::Rotation;

  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> mapped(grid);
    for (int i = 0; i < grid; ++i) {
      lift[i] -= r(wrap_unit(lift[i]));
      mapped[i] = wrap_unit(lift[i]);
      disp[i] = lift[i] - out.grid[i];
    }
    disp[grid] = disp[0];
    out.iterates.push_back(std::move(mapped));

    PeriodicPoints pp;
    pp.k = k;
    pp.kind = base;
    if (base != CircleMapKind::Generic) {
      out.periodic_points.push_back(std::move(pp));
      continue;
    }
    auto displacement = [&](double t) { return lift_iterate(r, t, k) - t; };
    for (int i = 0; i < grid; ++i) {
      const double a = out.grid[i];
      const double b = i + 1 < grid ? out.grid[i + 1] : 1.0;
      const double da = disp[i], db = disp[i + 1];
      const auto n_lo = static_cast<long>(std::ceil(std::min(da, db)));
      const auto n_hi = static_cast<long>(std::floor(std::max(da, db)));
      for (long n = n_lo; n <= n_hi; ++n) {
        const double fa = da - n, fb = db - n;
        double root;
        if (fa == 0.0) {
          root = a;
        } else if (fb == 0.0 || fa * fb > 0.0) {
          continue;  // a root at b is counted by the next cell
        } else {
          double lo = a, hi = b, flo = fa;
          while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            const double fm = displacement(mid) - n;
            if ((fm > 0.0) == (flo > 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          root = 0.5 * (lo + hi);
        }
        constexpr double h = 1e-6;
        const double slope = (lift_iterate(r, root + h, k) - lift_iterate(r, root - h, k)) / (2 * h);
        pp.points.push_back(root);
        pp.unstable.push_back(std::abs(slope) > 1.0);
      }
    }
    out.periodic_points.push_back(std::move(pp));
  }
  return out;
}

std::function<double(double)> sd_quadratic_delay_map(const DiscreteState& state) {
  const double tau = state.mu(1);
  const double period = state.period();
  auto poly = std::make_shared<const PeriodicPiecewisePoly>(state.poly);
  return [poly, tau, period](double t) {
    const double y = poly->eval(t)(0);
    return (tau + y + y * y) / period;
  };
}

}  // namespace semdde
