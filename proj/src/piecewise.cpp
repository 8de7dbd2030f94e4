#include "semdde/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace semdde {

std::shared_ptr<const NodeFamilyd> cached_nodes(NodeKind kind, int m) {
  static std::mutex mutex;
  static std::map<std::pair<NodeKind, int>, std::shared_ptr<const NodeFamilyd>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{kind, m}];
  if (!slot) slot = std::make_shared<const NodeFamilyd>(make_nodes<double>(kind, m));
  return slot;
}

namespace {

const Eigen::VectorXd& gauss_weights_cached(int n) {
  static std::mutex mutex;
  static std::map<int, Eigen::VectorXd> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_weights(*cached_nodes(NodeKind::GaussLegendre, n))).first;
  return it->second;
}

template <typename Poly>
Eigen::VectorXd integrate_impl(const Poly& p, int quad_nodes, double a, double b) {
  if (!(a <= b)) throw InvalidArgument("integrate: require a <= b");
  if (a < 0.0 || b > 1.0) throw InvalidArgument("integrate: bounds must lie in [0,1]");
  const auto& gl = *cached_nodes(NodeKind::GaussLegendre, quad_nodes);
  const Eigen::VectorXd& w = gauss_weights_cached(quad_nodes);
  const Mesh& mesh = p.mesh();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(p.dim());
  for (int i = 0; i < mesh.intervals(); ++i) {
    const double lo = std::max(a, mesh.left(i));
    const double hi = std::min(b, mesh.right(i));
    if (!(hi > lo)) continue;
    for (Eigen::Index k = 0; k < gl.size(); ++k) {
      total += (hi - lo) * w(k) * p.eval_in(i, lo + (hi - lo) * gl.nodes(k));
    }
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------

Mesh::Mesh(Eigen::VectorXd breaks) : breaks_(std::move(breaks)) {
  if (breaks_.size() < 2) throw InvalidArgument("Mesh: need at least one interval");
  if (breaks_(0) != 0.0 || breaks_(breaks_.size() - 1) != 1.0)
    throw InvalidArgument("Mesh: breaks must start at 0 and end at 1");
  for (Eigen::Index i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_(i) > breaks_(i - 1))) throw InvalidArgument("Mesh: breaks must be strictly increasing");
  }
}

Mesh Mesh::uniform(int intervals) {
  if (intervals < 1) throw InvalidArgument("Mesh::uniform: need L >= 1");
  Eigen::VectorXd b(intervals + 1);
  for (int i = 0; i <= intervals; ++i) b(i) = static_cast<double>(i) / intervals;
  b(intervals) = 1.0;
  return Mesh(std::move(b));
}

double Mesh::max_width() const {
  double h = 0.0;
  for (int i = 0; i < intervals(); ++i) h = std::max(h, width(i));
  return h;
}

int Mesh::locate(double s) const {
  const double* begin = breaks_.data();
  const double* end = begin + breaks_.size();
  const auto it = std::upper_bound(begin, end, s);
  const int i = static_cast<int>(it - begin) - 1;
  return std::clamp(i, 0, intervals() - 1);
}

double wrap_unit(double t) {
  double s = t - std::floor(t);
  if (s >= 1.0) s = 0.0;
  return s;
}

// ---------------------------------------------------------------------------

PeriodicPiecewisePoly::PeriodicPiecewisePoly(Mesh mesh, int degree, Eigen::MatrixXd node_values)
    : mesh_(std::move(mesh)), degree_(degree), values_(std::move(node_values)) {
  if (degree_ < 1) throw InvalidArgument("PeriodicPiecewisePoly: degree must be >= 1");
  const int L = mesh_.intervals();
  if (values_.rows() != static_cast<Eigen::Index>(L) * degree_ || values_.cols() < 1)
    throw InvalidArgument("PeriodicPiecewisePoly: expected L*m rows of node values");
  rep_ = cached_nodes(NodeKind::ChebyshevLobatto, degree_);
  local_.resize(L);
  local_deriv_.resize(L);
  for (int i = 0; i < L; ++i) {
    Eigen::MatrixXd v(degree_ + 1, values_.cols());
    v.topRows(degree_) = values_.middleRows(static_cast<Eigen::Index>(i) * degree_, degree_);
    v.row(degree_) = values_.row(i + 1 < L ? static_cast<Eigen::Index>(i + 1) * degree_ : 0);
    local_deriv_[i] = rep_->diff_matrix * v / mesh_.width(i);
    local_[i] = std::move(v);
  }
}

PeriodicPiecewisePoly PeriodicPiecewisePoly::sample(const Function& f, Mesh mesh, int degree, int dim) {
  const int L = mesh.intervals();
  const auto rep = cached_nodes(NodeKind::ChebyshevLobatto, degree);
  Eigen::MatrixXd v(static_cast<Eigen::Index>(L) * degree, dim);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < degree; ++j) {
      const double t = j == 0 ? mesh.left(i) : mesh.left(i) + mesh.width(i) * rep->nodes(j);
      v.row(static_cast<Eigen::Index>(i) * degree + j) = f(t).transpose();
    }
  }
  return {std::move(mesh), degree, std::move(v)};
}

PeriodicPiecewisePoly PeriodicPiecewisePoly::constant(const Eigen::VectorXd& value, Mesh mesh, int degree) {
  const Eigen::Index rows = static_cast<Eigen::Index>(mesh.intervals()) * degree;
  Eigen::MatrixXd v = value.transpose().replicate(rows, 1);
  return {std::move(mesh), degree, std::move(v)};
}

double PeriodicPiecewisePoly::node_time(int i, int j) const {
  if (j == 0) return mesh_.left(i);
  if (j == degree_) return mesh_.right(i);
  return mesh_.left(i) + mesh_.width(i) * rep_->nodes(j);
}

Eigen::VectorXd PeriodicPiecewisePoly::eval(double t) const {
  const double s = wrap_unit(t);
  const int i = mesh_.locate(s);
  for (int j = 0; j <= degree_; ++j) {
    if (s == node_time(i, j)) return local_[i].row(j).transpose();
  }
  return eval_in(i, s);
}

Eigen::VectorXd PeriodicPiecewisePoly::eval_in(int i, double s) const {
  const double x = (s - mesh_.left(i)) / mesh_.width(i);
  return barycentric_eval(*rep_, local_[i], x).transpose();
}

Eigen::VectorXd PeriodicPiecewisePoly::eval_deriv(double t) const {
  const double s = wrap_unit(t);
  const int i = mesh_.locate(s);
  const double x = (s - mesh_.left(i)) / mesh_.width(i);
  return barycentric_eval(*rep_, local_deriv_[i], x).transpose();
}

// ---------------------------------------------------------------------------

PiecewiseProjection::PiecewiseProjection(Mesh mesh, NodeKind kind, int m, Eigen::MatrixXd node_values)
    : mesh_(std::move(mesh)), m_(m), family_(cached_nodes(kind, m)), values_(std::move(node_values)) {
  if (family_->size() != m)
    throw InvalidArgument("PiecewiseProjection: node kind must have exactly m nodes");
  if (values_.rows() != static_cast<Eigen::Index>(mesh_.intervals()) * m_)
    throw InvalidArgument("PiecewiseProjection: expected L*m rows of node values");
}

double PiecewiseProjection::node_time(int i, int j) const {
  return mesh_.left(i) + mesh_.width(i) * family_->nodes(j);
}

Eigen::VectorXd PiecewiseProjection::eval(double t) const {
  const double s = wrap_unit(t);
  return eval_in(mesh_.locate(s), s);
}

Eigen::VectorXd PiecewiseProjection::eval_in(int i, double s) const {
  const double x = (s - mesh_.left(i)) / mesh_.width(i);
  return barycentric_eval(*family_, values_.middleRows(static_cast<Eigen::Index>(i) * m_, m_), x).transpose();
}

PiecewiseProjection project(const std::function<Eigen::VectorXd(double)>& f, const Mesh& mesh, int m,
                            NodeKind kind) {
  if (m < 1) throw InvalidArgument("project: m must be >= 1");
  const auto family = cached_nodes(kind, m);
  if (family->size() != m) throw InvalidArgument("project: node kind must have exactly m nodes");
  const int L = mesh.intervals();
  Eigen::MatrixXd v;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd fx = f(mesh.left(i) + mesh.width(i) * family->nodes(j));
      if (v.size() == 0) v.resize(static_cast<Eigen::Index>(L) * m, fx.size());
      v.row(static_cast<Eigen::Index>(i) * m + j) = fx.transpose();
    }
  }
  return {mesh, kind, m, std::move(v)};
}

Eigen::VectorXd integrate(const PeriodicPiecewisePoly& p, double a, double b) {
  return integrate_impl(p, p.degree() + 1, a, b);
}

Eigen::VectorXd integrate(const PiecewiseProjection& p, double a, double b) {
  return integrate_impl(p, p.nodes_per_interval() + 1, a, b);
}

PeriodicPiecewisePoly resample(const PeriodicPiecewisePoly& p, const Mesh& mesh, int degree) {
  return PeriodicPiecewisePoly::sample([&](double t) { return p.eval(t); }, mesh, degree, p.dim());
}

}  // namespace semdde
