#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "semdde/continuation.hpp"

namespace {

using semdde::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

int report(int code, const std::string& type, const std::string& message) {
  std::cerr << Json{{"error", {{"type", type}, {"message", message}}}, {"exit_code", code}}.dump() << '\n';
  return code;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("semdde");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("SEMDDE_LOG");
  const std::string level = env ? env : "error";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw semdde::FormatError("SEMDDE_LOG must be error, info or debug, got '" + level + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral element collocation for periodic orbits of delay equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::optional<int> grid;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    if (config_required) opt->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--grid", grid, "Evaluation grid size")->check(CLI::PositiveNumber);
  };
  auto* solve = app.add_subcommand("solve", "Converge one periodic orbit");
  auto* cont = app.add_subcommand("continue", "Natural-parameter continuation of a branch");
  auto* conv = app.add_subcommand("convergence", "Residual study over mesh sizes and degrees");
  auto* circle = app.add_subcommand("circle-map", "Periodic points of the delay circle map");
  auto* nodes = app.add_subcommand("nodes", "Node, weight and Lebesgue constant tables");
  for (auto* sub : {solve, cont, conv, circle}) add_common(sub, true);
  add_common(nodes, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(kExitConfig, "usage_error", e.what());
  }

  try {
    setup_logging();
    semdde::cli::Context ctx;
    if (!config_path.empty()) ctx.config = semdde::cli::load_run_config(config_path);
    ctx.out_dir = out_dir.empty() ? ctx.config.output_dir : std::filesystem::path(out_dir);
    ctx.jobs = jobs;
    ctx.grid = grid;
    if (*solve) return semdde::cli::cmd_solve(ctx);
    if (*cont) return semdde::cli::cmd_continue(ctx);
    if (*conv) return semdde::cli::cmd_convergence(ctx);
    if (*circle) return semdde::cli::cmd_circle_map(ctx);
    return semdde::cli::cmd_nodes(ctx);
  } catch (const semdde::StepFailure& e) {
    return report(kExitSolver, "continuation_failure", e.what());
  } catch (const semdde::NewtonError& e) {
    return report(kExitSolver, "newton_failure", e.what());
  } catch (const semdde::FormatError& e) {
    return report(kExitConfig, "config_error", e.what());
  } catch (const semdde::InvalidArgument& e) {
    return report(kExitConfig, "config_error", e.what());
  } catch (const semdde::NoHopfError& e) {
    return report(kExitConfig, "config_error", e.what());
  } catch (const semdde::Error& e) {
    return report(kExitSolver, "solver_error", e.what());
  } catch (const std::exception& e) {
    return report(kExitConfig, "io_error", e.what());
  }
  return kExitOk;
}
