#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "semdde/analysis.hpp"
#include "semdde/collocation.hpp"
#include "semdde/continuation.hpp"

namespace semdde::io {

using Json = nlohmann::json;

/// Version written into every output file; readers reject larger values.
inline constexpr int kFormatVersion = 1;

/// Throws FormatError unless doc carries an integer format_version in
/// [1, kFormatVersion].
void check_format_version(const Json& doc, const std::string& what);

/// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

Json to_json(const PeriodicPiecewisePoly& poly);
/// Rejects unknown representation kinds, ragged arrays, non-finite values and
/// endpoint values that disagree across a break or across the period.
PeriodicPiecewisePoly poly_from_json(const Json& doc);

struct Solution {
  std::string problem;
  DiscreteState state;
};

Json solution_to_json(const std::string& problem, const DiscreteState& state);
Solution solution_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
/// Two-space indented, newline terminated.
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// One row of a branch CSV.
struct BranchRow {
  double p = 0.0;
  double period = 0.0;
  double amplitude = 0.0;
  int newton_iters = 0;
  double residual_err = 0.0;
  double phi_defect = 0.0;
};

BranchRow to_row(const BranchPoint& point);

/// CSV with a "# format_version: N" line, then the header
/// p,T,amplitude,newton_iters,residual_err,phi_defect.
void write_branch_csv(std::ostream& out, const std::vector<BranchRow>& rows);
std::vector<BranchRow> read_branch_csv(std::istream& in);

/// Header p,L,m,converged,err,phi_defect,newton_iters,period, one block of
/// rows per table; wall times are left to the run metadata.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceTable>& tables);
Json convergence_to_json(const ConvergenceTable& table);

/// Columns t,g1,...,gk of the iterates mod 1.
void write_circle_map_csv(std::ostream& out, const CircleMapResult& result);
/// Columns k,t,unstable of the located fixed points of every iterate.
void write_periodic_points_csv(std::ostream& out, const CircleMapResult& result);
Json circle_map_summary(const CircleMapResult& result);

std::string to_string(CircleMapKind kind);

}  // namespace semdde::io
