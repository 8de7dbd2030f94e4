#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semdde/collocation.hpp"
#include "semdde/io.hpp"

namespace semdde::cli {

struct GuessConfig {
  enum class Type { Hopf, File, Constant };
  Type type = Type::Hopf;
  double amplitude = 0.01;
  double offset = 1e-3;
  std::filesystem::path path;
  std::vector<double> value;
  double period = 1.0;
};

struct MeshConfig {
  std::optional<int> intervals;
  std::vector<double> breaks;

  [[nodiscard]] Mesh build() const;
};

struct ContinuationConfig {
  std::optional<double> from;
  double to = 0.0;
  int steps = 40;
  int max_bisections = 6;
  std::optional<std::filesystem::path> resume_branch;
  std::optional<std::filesystem::path> resume_solution;
};

struct ConvergenceConfig {
  std::vector<int> intervals;
  std::vector<int> degrees;
  std::vector<double> parameters;
  /// Natural-parameter steps from the solved guess to each parameter.
  int reference_steps = 40;
};

struct CircleMapConfig {
  std::optional<std::filesystem::path> solution;
  /// Constant r, for checking the degenerate rotation and identity cases.
  std::optional<double> shift;
  int k_max = 5;
  int grid = 10000;
};

struct NodesConfig {
  std::vector<NodeKind> kinds{NodeKind::GaussLegendre, NodeKind::ChebyshevGauss, NodeKind::ChebyshevLobatto,
                              NodeKind::Equidistant};
  std::vector<int> degrees{4, 8, 16, 32, 64};
  int samples = 10001;
};

struct RunConfig {
  std::optional<std::string> problem;
  NodeKind collocation = NodeKind::GaussLegendre;
  MeshConfig mesh;
  int degree = 4;
  std::optional<double> parameter;
  GuessConfig guess;
  NewtonSettings newton;
  int grid = 10001;
  std::filesystem::path output_dir = ".";
  std::optional<ContinuationConfig> continuation;
  std::optional<ConvergenceConfig> convergence;
  std::optional<CircleMapConfig> circle_map;
  NodesConfig nodes;
};

/// Parses a run configuration; relative paths are resolved against base_dir.
/// Unknown keys at any level, wrong types and out-of-range values raise
/// FormatError.
RunConfig parse_run_config(const io::Json& doc, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace semdde::cli
