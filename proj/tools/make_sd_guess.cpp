// Regenerates the shipped sd_quadratic starting guesses: a fine FEM-style
// solve (L=100, m=6) at tau=1.1 from a sinusoid, continued to tau=0.95, then
// resampled to L=12, m=5.
#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>

#include "semdde/continuation.hpp"
#include "semdde/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate coarse sd_quadratic guess files"};
  std::string out_dir = "data";
  int jobs = 1;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  using namespace semdde;
  const DdeProblem problem = sd_quadratic();
  const Mesh fine = Mesh::uniform(100);
  auto sinusoid = [](double t) { return Eigen::VectorXd::Constant(1, 0.8 * std::sin(2 * std::numbers::pi * t)); };
  DiscreteState guess{PeriodicPiecewisePoly::sample(sinusoid, fine, 6, 1), Eigen::Vector2d(8.0, 1.1)};
  NewtonSettings settings;
  settings.jobs = jobs;
  settings.max_iter = 40;
  const AffineConstraints cons = default_constraints(problem, guess);
  const NewtonResult start = newton_solve(guess, problem, cons, settings);
  const auto branch = continue_branch(start.state, problem, cons, 1.1, 0.95, 10, settings);

  auto write = [&](const DiscreteState& s, const std::string& name) {
    const DiscreteState coarse{resample(s.poly, Mesh::uniform(12), 5), s.mu};
    io::write_json_file(std::filesystem::path(out_dir) / name, io::solution_to_json(problem.name, coarse));
    std::cout << name << ": tau=" << s.mu(1) << " T=" << s.period() << '\n';
  };
  write(start.state, "sd_quadratic_tau1.1.json");
  write(branch.back().state, "sd_quadratic_tau0.95.json");
}
