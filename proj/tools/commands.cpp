#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "semdde/analysis.hpp"
#include "semdde/continuation.hpp"
#include "semdde/oracle.hpp"

namespace semdde::cli {

namespace {

using io::Json;
namespace fs = std::filesystem;

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

DdeProblem require_problem(const RunConfig& cfg) {
  if (!cfg.problem) throw FormatError("config: missing required key 'problem'");
  try {
    return problem_by_name(*cfg.problem);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

HopfData hopf_for(const DdeProblem& problem) {
  if (problem.name == "mackey_glass") return mackey_glass_hopf();
  if (problem.name == "sd_quadratic") return sd_quadratic_hopf();
  throw FormatError("no Hopf point is known for problem '" + problem.name + "'");
}

NewtonSettings newton_settings(const Context& ctx) {
  NewtonSettings s = ctx.config.newton;
  s.jobs = ctx.jobs;
  return s;
}

int err_grid(const Context& ctx) { return ctx.grid.value_or(ctx.config.grid); }

DiscreteState initial_state(const RunConfig& cfg, const DdeProblem& problem) {
  const Mesh mesh = cfg.mesh.build();
  DiscreteState state = [&]() -> DiscreteState {
    switch (cfg.guess.type) {
      case GuessConfig::Type::Hopf: {
        HopfGuessOptions opts;
        opts.amplitude = cfg.guess.amplitude;
        opts.parameter_offset = cfg.guess.offset;
        opts.collocation = cfg.collocation;
        return hopf_initial_guess(hopf_for(problem), mesh, cfg.degree, opts);
      }
      case GuessConfig::Type::File: {
        io::Solution sol = io::solution_from_json(io::read_json_file(cfg.guess.path));
        if (sol.problem != problem.name)
          throw FormatError("guess file is for problem '" + sol.problem + "', not '" + problem.name + "'");
        return {resample(sol.state.poly, mesh, cfg.degree), sol.state.mu, cfg.collocation};
      }
      case GuessConfig::Type::Constant: {
        if (static_cast<int>(cfg.guess.value.size()) != problem.dim)
          throw FormatError("initial_guess.value must have " + std::to_string(problem.dim) + " entries");
        const Eigen::VectorXd value = Eigen::Map<const Eigen::VectorXd>(
            cfg.guess.value.data(), static_cast<Eigen::Index>(cfg.guess.value.size()));
        Eigen::VectorXd mu(problem.num_params + 1);
        mu(0) = cfg.guess.period;
        if (problem.num_params > 0) {
          if (!problem.default_params && !cfg.parameter)
            throw FormatError("config: 'parameter' is required for a constant guess");
          if (problem.default_params) mu.tail(problem.num_params) = *problem.default_params;
        }
        return {PeriodicPiecewisePoly::constant(value, mesh, cfg.degree), mu, cfg.collocation};
      }
    }
    throw FormatError("unknown initial guess type");
  }();
  if (state.mu.size() != problem.num_params + 1)
    throw FormatError("guess has " + std::to_string(state.mu.size() - 1) + " parameters, problem needs " +
                      std::to_string(problem.num_params));
  if (cfg.parameter) {
    if (problem.num_params < 1) throw FormatError("config: problem has no parameter to set");
    state.mu(1) = *cfg.parameter;
  }
  return state;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  return out;
}

void write_meta(const Context& ctx, const std::string& command, double wall_time, Json extra = Json::object()) {
  Json meta{{"format_version", io::kFormatVersion}, {"command", command}, {"jobs", ctx.jobs}, {"wall_time", wall_time}};
  meta.update(extra);
  io::write_json_file(ctx.out_dir / "meta.json", meta);
}

Json params_json(const DiscreteState& state) {
  Json p = Json::array();
  for (Eigen::Index k = 1; k < state.mu.size(); ++k) p.push_back(state.mu(k));
  return p;
}

std::string point_file(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%04zu.json", index);
  return buf;
}

// Solves the configured guess, then walks parameter 0 to `target` if needed.
DiscreteState reference_state(const Context& ctx, const DdeProblem& problem, double target, int steps) {
  const NewtonSettings settings = newton_settings(ctx);
  const DiscreteState guess = initial_state(ctx.config, problem);
  AffineConstraints cons = default_constraints(problem, guess);
  NewtonResult res = newton_solve(guess, problem, cons, settings);
  const double start = res.state.mu(1);
  spdlog::info("reference solved at p={} (T={}, {} iterations)", start, res.state.period(), res.iterations);
  if (start == target) return res.state;
  ContinuationOptions opts;
  opts.err_grid = err_grid(ctx);
  auto branch = continue_branch(res.state, problem, cons, start, target, steps, settings, opts);
  spdlog::info("reference continued to p={} (T={})", target, branch.back().period);
  return branch.back().state;
}

}  // namespace

int cmd_solve(const Context& ctx) {
  const Stopwatch clock;
  const DdeProblem problem = require_problem(ctx.config);
  const DiscreteState guess = initial_state(ctx.config, problem);
  const AffineConstraints cons = default_constraints(problem, guess);
  spdlog::info("solve {}: L={} m={} unknowns={}", problem.name, guess.poly.mesh().intervals(), guess.poly.degree(),
               guess.size());
  const NewtonResult res = newton_solve(guess, problem, cons, newton_settings(ctx));
  for (std::size_t k = 0; k < res.residual_history.size(); ++k)
    spdlog::debug("newton {}: residual {:.3e}", k, res.residual_history[k]);

  ensure_dir(ctx.out_dir);
  io::write_json_file(ctx.out_dir / "solution.json", io::solution_to_json(problem.name, res.state));
  const Json result{{"format_version", io::kFormatVersion},
                    {"problem", problem.name},
                    {"period", res.state.period()},
                    {"params", params_json(res.state)},
                    {"err", residual_err(res.state, problem, err_grid(ctx))},
                    {"phi_defect", phi_m_defect(res.state, problem, cons).max()},
                    {"iterations", res.iterations},
                    {"residual_history", res.residual_history}};
  io::write_json_file(ctx.out_dir / "result.json", result);
  std::cout << result.dump() << '\n';
  write_meta(ctx, "solve", clock.seconds());
  return 0;
}

int cmd_continue(const Context& ctx) {
  const Stopwatch clock;
  if (!ctx.config.continuation) throw FormatError("config: 'continuation' block is required");
  const ContinuationConfig& cc = *ctx.config.continuation;
  const DdeProblem problem = require_problem(ctx.config);
  const NewtonSettings settings = newton_settings(ctx);

  std::vector<io::BranchRow> rows;
  std::optional<DiscreteState> start;
  double p_from = 0.0;
  if (cc.resume_branch) {
    std::ifstream in(*cc.resume_branch);
    if (!in) throw FormatError("cannot open '" + cc.resume_branch->string() + "'");
    rows = io::read_branch_csv(in);
    if (rows.empty()) throw FormatError("branch csv to resume from has no rows");
    io::Solution sol = io::solution_from_json(io::read_json_file(*cc.resume_solution));
    if (sol.problem != problem.name) throw FormatError("resume solution is for problem '" + sol.problem + "'");
    if (sol.state.mu(1) != rows.back().p)
      throw FormatError("resume solution does not match the last row of the branch csv");
    p_from = rows.back().p;
    start = std::move(sol.state);
    spdlog::info("resuming from p={} after {} rows", p_from, rows.size());
  } else {
    const DiscreteState guess = initial_state(ctx.config, problem);
    const AffineConstraints cons = default_constraints(problem, guess);
    NewtonResult res = newton_solve(guess, problem, cons, settings);
    p_from = cc.from.value_or(res.state.mu(1));
    if (p_from != res.state.mu(1)) {
      throw FormatError("continuation.from must equal the parameter of the solved start point");
    }
    start = std::move(res.state);
  }

  ContinuationOptions opts;
  opts.max_bisections = cc.max_bisections;
  opts.err_grid = err_grid(ctx);
  const AffineConstraints cons = default_constraints(problem, *start);
  ensure_dir(ctx.out_dir);
  ensure_dir(ctx.out_dir / "solutions");
  const std::size_t offset = rows.size();

  auto flush = [&](const std::vector<BranchPoint>& points) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      rows.push_back(io::to_row(points[k]));
      io::write_json_file(ctx.out_dir / "solutions" / point_file(offset + k),
                          io::solution_to_json(problem.name, points[k].state));
    }
    auto out = open_out(ctx.out_dir / "branch.csv");
    io::write_branch_csv(out, rows);
    if (!points.empty()) {
      io::write_json_file(ctx.out_dir / "last_solution.json",
                          io::solution_to_json(problem.name, points.back().state));
    }
  };

  try {
    const auto points = continue_branch(*start, problem, cons, p_from, cc.to, cc.steps, settings, opts);
    for (const auto& p : points)
      spdlog::info("p={} T={} amplitude={} iters={}", p.parameter, p.period, p.amplitude, p.newton_iters);
    flush(points);
  } catch (const StepFailure& e) {
    flush(e.partial());
    write_meta(ctx, "continue", clock.seconds());
    throw;
  }
  write_meta(ctx, "continue", clock.seconds());
  return 0;
}

int cmd_convergence(const Context& ctx) {
  const Stopwatch clock;
  if (!ctx.config.convergence) throw FormatError("config: 'convergence' block is required");
  const ConvergenceConfig& cc = *ctx.config.convergence;
  const DdeProblem problem = require_problem(ctx.config);
  if (problem.num_params < 1) throw FormatError("convergence: problem has no parameter");

  ConvergenceOptions opts;
  opts.kind = ctx.config.collocation;
  opts.grid = err_grid(ctx);
  opts.jobs = ctx.jobs;
  NewtonSettings settings = newton_settings(ctx);
  // cells run concurrently; keep each Newton solve single-threaded
  settings.jobs = 1;

  std::vector<ConvergenceTable> tables;
  Json timings = Json::array();
  for (double p : cc.parameters) {
    const DiscreteState ref = reference_state(ctx, problem, p, cc.reference_steps);
    tables.push_back(convergence_study(problem, ref, p, cc.intervals, cc.degrees, settings, opts));
    for (const auto& r : tables.back().rows) {
      spdlog::info("p={} L={} m={} err={:.3e} iters={}", p, r.L, r.m, r.err, r.newton_iters);
      timings.push_back({{"p", p}, {"L", r.L}, {"m", r.m}, {"wall_time", r.wall_time}});
    }
  }

  ensure_dir(ctx.out_dir);
  auto csv = open_out(ctx.out_dir / "convergence.csv");
  io::write_convergence_csv(csv, tables);
  Json doc{{"format_version", io::kFormatVersion}, {"tables", Json::array()}};
  for (const auto& t : tables) doc["tables"].push_back(io::convergence_to_json(t));
  io::write_json_file(ctx.out_dir / "convergence.json", doc);
  write_meta(ctx, "convergence", clock.seconds(), {{"cells", timings}});

  int failed = 0;
  for (const auto& t : tables) {
    for (const auto& r : t.rows) failed += r.converged ? 0 : 1;
  }
  if (failed > 0) spdlog::warn("{} cells did not converge", failed);
  return 0;
}

int cmd_circle_map(const Context& ctx) {
  const Stopwatch clock;
  if (!ctx.config.circle_map) throw FormatError("config: 'circle_map' block is required");
  const CircleMapConfig& cc = *ctx.config.circle_map;
  std::function<double(double)> r;
  if (cc.shift) {
    const double shift = *cc.shift;
    r = [shift](double) { return shift; };
  } else {
    const io::Solution sol = io::solution_from_json(io::read_json_file(*cc.solution));
    if (sol.problem != "sd_quadratic")
      throw FormatError("circle-map needs an sd_quadratic solution, got '" + sol.problem + "'");
    r = sd_quadratic_delay_map(sol.state);
  }
  const CircleMapResult result = circle_map_analysis(r, cc.k_max, ctx.grid.value_or(cc.grid));

  ensure_dir(ctx.out_dir);
  auto iterates = open_out(ctx.out_dir / "circle_map.csv");
  io::write_circle_map_csv(iterates, result);
  auto points = open_out(ctx.out_dir / "periodic_points.csv");
  io::write_periodic_points_csv(points, result);
  const Json summary = io::circle_map_summary(result);
  io::write_json_file(ctx.out_dir / "circle_map.json", summary);
  std::cout << summary.dump() << '\n';
  write_meta(ctx, "circle-map", clock.seconds());
  return 0;
}

int cmd_nodes(const Context& ctx) {
  const Stopwatch clock;
  const NodesConfig& nc = ctx.config.nodes;
  const int samples = ctx.grid.value_or(nc.samples);
  ensure_dir(ctx.out_dir);
  auto nodes = open_out(ctx.out_dir / "nodes.csv");
  auto leb = open_out(ctx.out_dir / "lebesgue.csv");
  nodes << "# format_version: " << io::kFormatVersion << "\nkind,m,j,node,bary_weight\n";
  leb << "# format_version: " << io::kFormatVersion << "\nkind,m,lebesgue,lebesgue_over_m\n";
  for (NodeKind kind : nc.kinds) {
    for (int m : nc.degrees) {
      const NodeFamilyd fam = make_nodes(kind, m);
      for (int j = 0; j < fam.size(); ++j) {
        nodes << to_string(kind) << ',' << m << ',' << j << ',' << io::format_double(fam.nodes(j)) << ','
              << io::format_double(fam.bary_weights(j)) << '\n';
      }
      if (samples < 10 * fam.size())
        throw FormatError("nodes: grid must be at least 10 times the node count");
      const double lambda = lebesgue_constant(fam, samples);
      leb << to_string(kind) << ',' << m << ',' << io::format_double(lambda) << ','
          << io::format_double(lambda / m) << '\n';
    }
  }
  write_meta(ctx, "nodes", clock.seconds());
  return 0;
}

}  // namespace semdde::cli
