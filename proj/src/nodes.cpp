#include "semdde/nodes.hpp"

namespace semdde {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::GaussLegendre: return "gauss_legendre";
    case NodeKind::ChebyshevGauss: return "chebyshev_gauss";
    case NodeKind::ChebyshevLobatto: return "chebyshev_lobatto";
    case NodeKind::Equidistant: return "equidistant";
  }
  return "unknown";
}

NodeKind node_kind_from_string(std::string_view name) {
  for (auto kind : {NodeKind::GaussLegendre, NodeKind::ChebyshevGauss, NodeKind::ChebyshevLobatto,
                    NodeKind::Equidistant}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown node kind '" + std::string(name) + "'");
}

}  // namespace semdde
