#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <string_view>

#include "semdde/errors.hpp"

namespace semdde {

enum class NodeKind { GaussLegendre, ChebyshevGauss, ChebyshevLobatto, Equidistant };

[[nodiscard]] std::string_view to_string(NodeKind kind);
[[nodiscard]] NodeKind node_kind_from_string(std::string_view name);

/// Interpolation nodes on the reference interval [0,1] together with their
/// barycentric weights and the differentiation matrix of the interpolant.
///
/// `m` is the parameter passed to make_nodes. All kinds except
/// ChebyshevLobatto have m nodes; ChebyshevLobatto has m+1 nodes including
/// both endpoints, so that a degree-m polynomial is determined by its values.
template <typename Scalar>
struct NodeFamily {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  NodeKind kind = NodeKind::GaussLegendre;
  int m = 0;
  Vector nodes;
  Vector bary_weights;
  Matrix diff_matrix;

  [[nodiscard]] Eigen::Index size() const { return nodes.size(); }
};

using NodeFamilyd = NodeFamily<double>;

namespace detail {

/// Legendre polynomial P_n and its derivative at x by the three-term recurrence.
template <typename Scalar>
void legendre(int n, Scalar x, Scalar& value, Scalar& deriv) {
  Scalar p0 = 1, p1 = x;
  if (n == 0) {
    value = 1;
    deriv = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  value = p1;
  deriv = n * (x * p1 - p0) / (x * x - 1);
}

/// Positive roots of P_n on [-1,1], descending, by Newton from Chebyshev guesses.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> legendre_roots_upper(int n) {
  using std::abs;
  using std::cos;
  const int half = (n + 1) / 2;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> roots(half);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int k = 1; k <= half; ++k) {
    Scalar x = cos(pi * (Scalar(k) - Scalar(0.25)) / (Scalar(n) + Scalar(0.5)));
    if (n % 2 == 1 && k == half) {
      roots(k - 1) = 0;
      continue;
    }
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p, dp;
      legendre(n, x, p, dp);
      const Scalar dx = p / dp;
      x -= dx;
      if (abs(dx) <= Scalar(1e-16) * (1 + abs(x))) break;
    }
    roots(k - 1) = x;
  }
  return roots;
}

/// Fills nodes from their lower half and the mirror condition x_j + x_{n-1-j} = 1.
template <typename Scalar, typename F>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> symmetric_nodes(Eigen::Index n, F&& lower) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n);
  for (Eigen::Index j = 0; j < n / 2; ++j) {
    x(j) = lower(j);
    x(n - 1 - j) = 1 - x(j);
  }
  if (n % 2 == 1) x(n / 2) = Scalar(0.5);
  return x;
}

}  // namespace detail

/// Barycentric weights 1/prod_{k!=j}(x_j - x_k), rescaled so that the largest
/// has unit modulus. Differences are scaled by 4 (the inverse capacity of a
/// unit interval) to keep the products in range for large node counts.
template <typename Derived>
auto barycentric_weights(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Scalar prod = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) prod *= 4 * (x(j) - x(k));
    }
    w(j) = 1 / prod;
  }
  return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(w / w.cwiseAbs().maxCoeff());
}

/// Differentiation matrix D with (D f)_i = p'(x_i) for the interpolant p of f.
/// Diagonal by the negative-sum trick so that D annihilates constants.
template <typename Derived, typename Derived2>
auto differentiation_matrix(const Eigen::MatrixBase<Derived>& x,
                            const Eigen::MatrixBase<Derived2>& w) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar diag = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w(j) / w(i)) / (x(i) - x(j));
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

template <typename Scalar = double>
NodeFamily<Scalar> make_nodes(NodeKind kind, int m) {
  using std::sin;
  if (m < 1) throw InvalidArgument("make_nodes: m must be >= 1, got " + std::to_string(m));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  NodeFamily<Scalar> f;
  f.kind = kind;
  f.m = m;
  switch (kind) {
    case NodeKind::GaussLegendre: {
      const auto upper = detail::legendre_roots_upper<Scalar>(m);
      // roots sorted descending map to ascending (1 - x)/2
      f.nodes = detail::symmetric_nodes<Scalar>(m, [&](Eigen::Index j) { return (1 - upper(j)) / 2; });
      break;
    }
    case NodeKind::ChebyshevGauss:
      // (1 - cos θ)/2 = sin²(θ/2), the latter without cancellation near 0
      f.nodes = detail::symmetric_nodes<Scalar>(m, [&](Eigen::Index j) {
        const Scalar s = sin((2 * Scalar(j) + 1) * pi / (4 * Scalar(m)));
        return s * s;
      });
      break;
    case NodeKind::ChebyshevLobatto:
      f.nodes = detail::symmetric_nodes<Scalar>(m + 1, [&](Eigen::Index j) {
        const Scalar s = sin(Scalar(j) * pi / (2 * Scalar(m)));
        return s * s;
      });
      break;
    case NodeKind::Equidistant:
      f.nodes = detail::symmetric_nodes<Scalar>(m, [&](Eigen::Index j) { return Scalar(j) / Scalar(m - 1); });
      break;
  }
  f.bary_weights = barycentric_weights(f.nodes);
  f.diff_matrix = differentiation_matrix(f.nodes, f.bary_weights);
  return f;
}

/// Gauss-Legendre quadrature weights on [0,1] for a GaussLegendre family.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gauss_weights(const NodeFamily<Scalar>& family) {
  if (family.kind != NodeKind::GaussLegendre)
    throw InvalidArgument("gauss_weights: family is not Gauss-Legendre");
  const Eigen::Index n = family.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar x = 2 * family.nodes(j) - 1;
    Scalar p, dp;
    detail::legendre(family.m, x, p, dp);
    // 2/((1-x²)P'²) on [-1,1], halved for the unit interval
    w(j) = 1 / ((1 - x * x) * dp * dp);
  }
  // enforce the mirror symmetry of the rule
  for (Eigen::Index j = 0; j < n / 2; ++j) w(n - 1 - j) = w(j);
  return w;
}

/// Values of the Lagrange basis l_j(x) of the family at x, via the
/// barycentric formula; exact unit vector when x coincides with a node.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lagrange_basis(const NodeFamily<Scalar>& family, Scalar x) {
  const Eigen::Index n = family.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> l(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x == family.nodes(j)) {
      l.setZero();
      l(j) = 1;
      return l;
    }
    l(j) = family.bary_weights(j) / (x - family.nodes(j));
  }
  return l / l.sum();
}

/// Evaluates the interpolant through (nodes, values) at x. `values` holds one
/// row per node and one column per component.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> barycentric_eval(const NodeFamily<Scalar>& family,
                                                           const Eigen::MatrixBase<Derived>& values, Scalar x) {
  const Eigen::Index n = family.size();
  Scalar denom = 0;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> numer = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(values.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar diff = x - family.nodes(j);
    if (diff == 0) return values.row(j);
    const Scalar term = family.bary_weights(j) / diff;
    numer += term * values.row(j);
    denom += term;
  }
  return numer / denom;
}

/// Maximum of sum_j |l_j(t)| over a uniform grid of `samples` points in [0,1].
template <typename Scalar>
Scalar lebesgue_constant(const NodeFamily<Scalar>& family, int samples = 10001) {
  using std::abs;
  using std::max;
  if (samples < 10 * family.size())
    throw InvalidArgument("lebesgue_constant: need samples >= 10*m");
  Scalar best = 0;
  for (int k = 0; k < samples; ++k) {
    const Scalar t = Scalar(k) / Scalar(samples - 1);
    best = max(best, lagrange_basis(family, t).cwiseAbs().sum());
  }
  return best;
}

}  // namespace semdde
