#include "semdde/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace semdde {

Eigen::VectorXd flatten(const DiscreteState& state) {
  const Eigen::MatrixXd& v = state.poly.node_values();
  Eigen::VectorXd x(state.size());
  Eigen::Index pos = 0;
  for (Eigen::Index q = 0; q < v.rows(); ++q) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) x(pos++) = v(q, k);
  }
  x.tail(state.mu.size()) = state.mu;
  return x;
}

DiscreteState unflatten(const Eigen::VectorXd& x, const DiscreteState& like) {
  if (x.size() != like.size()) throw InvalidArgument("unflatten: length mismatch");
  const Eigen::Index rows = like.poly.node_values().rows();
  const Eigen::Index cols = like.poly.node_values().cols();
  Eigen::MatrixXd v(rows, cols);
  Eigen::Index pos = 0;
  for (Eigen::Index q = 0; q < rows; ++q) {
    for (Eigen::Index k = 0; k < cols; ++k) v(q, k) = x(pos++);
  }
  return {PeriodicPiecewisePoly(like.poly.mesh(), like.poly.degree(), std::move(v)), x.tail(like.mu.size()),
          like.collocation};
}

std::vector<double> collocation_points(const DiscreteState& state) {
  const Mesh& mesh = state.poly.mesh();
  const int m = state.poly.degree();
  const auto family = cached_nodes(state.collocation, m);
  if (family->size() != m) throw InvalidArgument("collocation kind must provide exactly m nodes");
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(mesh.intervals()) * m);
  for (int i = 0; i < mesh.intervals(); ++i) {
    for (int j = 0; j < m; ++j) pts.push_back(mesh.left(i) + mesh.width(i) * family->nodes(j));
  }
  return pts;
}

// ---------------------------------------------------------------------------

namespace {

/// Storage rows and weights such that y(t) = sum w * node_values.row(q).
std::vector<std::pair<Eigen::Index, double>> point_basis(const PeriodicPiecewisePoly& poly, double t) {
  const double s = wrap_unit(t);
  const int i = poly.mesh().locate(s);
  const int m = poly.degree();
  const int L = poly.mesh().intervals();
  auto row_of = [&](int j) -> Eigen::Index {
    if (j < m) return static_cast<Eigen::Index>(i) * m + j;
    return i + 1 < L ? static_cast<Eigen::Index>(i + 1) * m : 0;
  };
  for (int j = 0; j <= m; ++j) {
    if (s == poly.node_time(i, j)) return {{row_of(j), 1.0}};
  }
  const Eigen::VectorXd l = lagrange_basis(poly.rep_family(), (s - poly.mesh().left(i)) / poly.mesh().width(i));
  std::vector<std::pair<Eigen::Index, double>> out;
  out.reserve(m + 1);
  for (int j = 0; j <= m; ++j) out.emplace_back(row_of(j), l(j));
  return out;
}

double max_norm(const Eigen::VectorXd& r) { return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::VectorXd AffineConstraints::evaluate(const DiscreteState& state) const {
  Eigen::VectorXd out(size());
  for (int r = 0; r < size(); ++r) {
    const auto& row = rows_[r];
    double value = row.offset;
    for (const auto& term : row.points) value += term.coeff * state.poly.eval(term.time)(term.component);
    if (row.mu_coeffs.size() > 0) value += row.mu_coeffs.dot(state.mu);
    out(r) = value;
  }
  return out;
}

Eigen::MatrixXd AffineConstraints::jacobian(const DiscreteState& like) const {
  const Eigen::Index n_y = like.poly.dim();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(size(), like.size());
  for (int r = 0; r < size(); ++r) {
    const auto& row = rows_[r];
    for (const auto& term : row.points) {
      for (const auto& [q, w] : point_basis(like.poly, term.time)) jac(r, q * n_y + term.component) += term.coeff * w;
    }
    if (row.mu_coeffs.size() > 0) jac.row(r).tail(like.mu.size()) += row.mu_coeffs.transpose();
  }
  return jac;
}

void AffineConstraints::pin_parameter(int param_index, double target) {
  for (auto& row : rows_) {
    if (row.pinned_param == param_index) {
      row.offset = -target;
      return;
    }
  }
  throw InvalidArgument("pin_parameter: no row pins parameter " + std::to_string(param_index));
}

std::optional<double> AffineConstraints::pinned_value(int param_index) const {
  for (const auto& row : rows_) {
    if (row.pinned_param == param_index) return -row.offset;
  }
  return std::nullopt;
}

AffineConstraints default_constraints(double anchor, const Eigen::VectorXd& targets) {
  const Eigen::Index n_mu = targets.size() + 1;
  std::vector<AffineConstraint> rows;
  AffineConstraint phase;
  phase.points = {PointTerm{0.0, 0, 1.0}};
  phase.mu_coeffs = Eigen::VectorXd::Zero(n_mu);
  phase.offset = -anchor;
  rows.push_back(phase);
  for (Eigen::Index k = 0; k < targets.size(); ++k) {
    AffineConstraint pin;
    pin.mu_coeffs = Eigen::VectorXd::Zero(n_mu);
    pin.mu_coeffs(k + 1) = 1.0;
    pin.offset = -targets(k);
    pin.pinned_param = static_cast<int>(k);
    rows.push_back(pin);
  }
  return AffineConstraints(std::move(rows));
}

AffineConstraints default_constraints(const DdeProblem& problem, const DiscreteState& guess) {
  const double anchor = problem.equilibrium ? (*problem.equilibrium)(0) : guess.poly.eval(0.0)(0);
  return default_constraints(anchor, guess.params());
}

// ---------------------------------------------------------------------------

void NewtonSettings::validate() const {
  if (!(tol_residual > 0.0)) throw InvalidArgument("newton: tol_residual must be positive");
  if (!(tol_step > 0.0)) throw InvalidArgument("newton: tol_step must be positive");
  if (max_iter < 1) throw InvalidArgument("newton: max_iter must be positive");
  if (min_iter < 0 || min_iter > max_iter) throw InvalidArgument("newton: min_iter must be in [0, max_iter]");
  if (!(min_damping > 0.0) || min_damping > 1.0) throw InvalidArgument("newton: min_damping must be in (0,1]");
  if (!(fd_step > 0.0)) throw InvalidArgument("newton: fd_step must be positive");
  if (jobs < 1) throw InvalidArgument("newton: jobs must be positive");
}

Eigen::VectorXd assemble_residual(const DiscreteState& state, const DdeProblem& problem,
                                  const AffineConstraints& cons) {
  const Eigen::Index n_y = state.poly.dim();
  if (cons.size() != state.mu.size())
    throw InvalidArgument("assemble_residual: need exactly n_mu affine constraints");
  const std::vector<double> pts = collocation_points(state);
  const RescaledRhs rhs(problem, state.poly);
  Eigen::VectorXd r(state.size());
  for (std::size_t c = 0; c < pts.size(); ++c) {
    r.segment(static_cast<Eigen::Index>(c) * n_y, n_y) = state.poly.eval_deriv(pts[c]) - rhs(pts[c], state.mu);
  }
  r.tail(cons.size()) = cons.evaluate(state);
  return r;
}

Eigen::MatrixXd assemble_jacobian(const DiscreteState& state, const DdeProblem& problem,
                                  const AffineConstraints& cons, const NewtonSettings& settings) {
  const Eigen::Index n = state.size();
  const Eigen::Index n_rows = state.profile_size();
  const Eigen::VectorXd x = flatten(state);
  const Eigen::VectorXd r0 = assemble_residual(state, problem, cons);
  Eigen::MatrixXd jac(n, n);
  jac.bottomRows(cons.size()) = cons.jacobian(state);

  auto fill = [&](Eigen::Index first, Eigen::Index last) {
    Eigen::VectorXd xh = x;
    for (Eigen::Index j = first; j < last; ++j) {
      const double h = settings.fd_step * std::max(1.0, std::abs(x(j)));
      xh(j) = x(j) + h;
      const double step = xh(j) - x(j);
      const Eigen::VectorXd rh = assemble_residual(unflatten(xh, state), problem, cons);
      jac.col(j).head(n_rows) = (rh.head(n_rows) - r0.head(n_rows)) / step;
      xh(j) = x(j);
    }
  };

  const int jobs = std::max(1, std::min<int>(settings.jobs, static_cast<int>(n)));
  if (jobs == 1) {
    fill(0, n);
    return jac;
  }
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      const Eigen::Index first = n * w / jobs;
      const Eigen::Index last = n * (w + 1) / jobs;
      workers.emplace_back([&, w, first, last] {
        try {
          fill(first, last);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return jac;
}

// ---------------------------------------------------------------------------

namespace {

struct Trial {
  bool ok = false;
  std::optional<DiscreteState> state;
  double norm = std::numeric_limits<double>::infinity();
};

Trial try_state(const Eigen::VectorXd& x, const DiscreteState& like, const DdeProblem& problem,
                const AffineConstraints& cons) {
  DiscreteState s = unflatten(x, like);
  if (!x.allFinite() || !(s.period() > 0.0)) return {false, std::move(s)};
  try {
    const double norm = max_norm(assemble_residual(s, problem, cons));
    if (!std::isfinite(norm)) return {false, std::move(s)};
    return {true, std::move(s), norm};
  } catch (const NegativeDelayError&) {
    return {false, std::move(s)};
  } catch (const OutOfWindowError&) {
    return {false, std::move(s)};
  }
}

}  // namespace

NewtonResult newton_solve(const DiscreteState& init, const DdeProblem& problem, const AffineConstraints& cons,
                          const NewtonSettings& settings) {
  settings.validate();
  if (!(init.period() > 0.0)) throw InvalidArgument("newton_solve: initial period must be positive");
  if (!flatten(init).allFinite()) throw InvalidArgument("newton_solve: initial state is not finite");

  NewtonResult result{init, 0, {}};
  Eigen::VectorXd residual = assemble_residual(result.state, problem, cons);
  double norm = max_norm(residual);
  if (!std::isfinite(norm)) throw NewtonError(NewtonError::Kind::NonfiniteResidual, "newton: nonfinite residual");
  result.residual_history.push_back(norm);

  while (norm > settings.tol_residual || result.iterations < settings.min_iter) {
    if (result.iterations >= settings.max_iter)
      throw NewtonError(NewtonError::Kind::MaxIterExceeded,
                        "newton: no convergence after " + std::to_string(settings.max_iter) +
                            " iterations (residual " + std::to_string(norm) + ")");
    const Eigen::MatrixXd jac = assemble_jacobian(result.state, problem, cons, settings);
    if (!jac.allFinite())
      throw NewtonError(NewtonError::Kind::NonfiniteResidual, "newton: nonfinite Jacobian entries");
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const double scale = jac.cwiseAbs().maxCoeff();
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-14 * scale)
      throw NewtonError(NewtonError::Kind::SingularJacobian, "newton: singular Jacobian");
    const Eigen::VectorXd delta = lu.solve(-residual);
    const Eigen::VectorXd x = flatten(result.state);

    double damping = 1.0;
    Trial trial;
    for (;;) {
      trial = try_state(x + damping * delta, result.state, problem, cons);
      if (trial.ok && trial.norm <= norm) break;
      if (damping / 2 < settings.min_damping) break;
      damping /= 2;
    }
    if (!trial.ok)
      throw NewtonError(NewtonError::Kind::NonfiniteResidual,
                        "newton: damped step leaves the domain of the right-hand side");

    ++result.iterations;
    const double step = damping * max_norm(delta);
    result.state = std::move(*trial.state);
    residual = assemble_residual(result.state, problem, cons);
    norm = trial.norm;
    result.residual_history.push_back(norm);
    if (norm > settings.tol_residual && step <= settings.tol_step * std::max(1.0, max_norm(x)))
      throw NewtonError(NewtonError::Kind::Stagnation,
                        "newton: step below tol_step with residual " + std::to_string(norm));
  }
  return result;
}

}  // namespace semdde
