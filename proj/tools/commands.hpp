#pragma once

#include <filesystem>
#include <optional>

#include "config.hpp"

namespace semdde::cli {

struct Context {
  RunConfig config;
  std::filesystem::path out_dir;
  int jobs = 1;
  /// --grid override of the command's evaluation grid.
  std::optional<int> grid;
};

int cmd_solve(const Context& ctx);
int cmd_continue(const Context& ctx);
int cmd_convergence(const Context& ctx);
int cmd_circle_map(const Context& ctx);
int cmd_nodes(const Context& ctx);

}  // namespace semdde::cli
