#include "semdde/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace semdde::io {

namespace {

constexpr const char* kBranchHeader = "p,T,amplitude,newton_iters,residual_err,phi_defect";

void write_version_line(std::ostream& out) { out << "# format_version: " << kFormatVersion << '\n'; }

double finite_or_throw(double x, const char* what) {
  if (!std::isfinite(x)) throw FormatError(std::string(what) + ": non-finite value");
  return x;
}

template <class T>
T get_field(const Json& doc, const char* key, const std::string& what) {
  if (!doc.contains(key)) throw FormatError(what + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(what + ": field '" + key + "' has the wrong type");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("csv: bad number '" + s + "'");
  return x;
}

int parse_int(const std::string& s) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("csv: bad integer '" + s + "'");
  return x;
}

}  // namespace

void check_format_version(const Json& doc, const std::string& what) {
  if (!doc.is_object()) throw FormatError(what + ": expected a JSON object");
  if (!doc.contains("format_version")) throw FormatError(what + ": missing format_version");
  const Json& v = doc.at("format_version");
  if (!v.is_number_integer()) throw FormatError(what + ": format_version must be an integer");
  const auto version = v.get<long long>();
  if (version > kFormatVersion)
    throw FormatError(what + ": format_version " + std::to_string(version) +
                      " is newer than the supported version " + std::to_string(kFormatVersion));
  if (version < 1) throw FormatError(what + ": invalid format_version " + std::to_string(version));
}

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, ptr};
}

// --- piecewise polynomials -------------------------------------------------

Json to_json(const PeriodicPiecewisePoly& poly) {
  const Mesh& mesh = poly.mesh();
  const int L = mesh.intervals();
  Json breaks = Json::array();
  for (Eigen::Index i = 0; i <= L; ++i) breaks.push_back(mesh.breaks()(i));
  Json values = Json::array();
  for (int i = 0; i < L; ++i) {
    const Eigen::MatrixXd& local = poly.interval_values(i);
    Json interval = Json::array();
    for (Eigen::Index j = 0; j < local.rows(); ++j) {
      Json node = Json::array();
      for (Eigen::Index k = 0; k < local.cols(); ++k) node.push_back(finite_or_throw(local(j, k), "poly"));
      interval.push_back(std::move(node));
    }
    values.push_back(std::move(interval));
  }
  return {{"format_version", kFormatVersion},
          {"breaks", std::move(breaks)},
          {"degree", poly.degree()},
          {"dim", poly.dim()},
          {"rep_kind", std::string(semdde::to_string(poly.rep_family().kind))},
          {"values", std::move(values)}};
}

PeriodicPiecewisePoly poly_from_json(const Json& doc) {
  const std::string what = "piecewise polynomial";
  check_format_version(doc, what);
  const auto rep_kind = get_field<std::string>(doc, "rep_kind", what);
  if (rep_kind != semdde::to_string(NodeKind::ChebyshevLobatto))
    throw FormatError(what + ": unsupported rep_kind '" + rep_kind + "'");
  const auto breaks = get_field<std::vector<double>>(doc, "breaks", what);
  const int degree = get_field<int>(doc, "degree", what);
  const int dim = get_field<int>(doc, "dim", what);
  if (degree < 1 || dim < 1) throw FormatError(what + ": degree and dim must be positive");
  Mesh mesh = [&] {
    try {
      return Mesh(Eigen::Map<const Eigen::VectorXd>(breaks.data(), static_cast<Eigen::Index>(breaks.size())));
    } catch (const InvalidArgument& e) {
      throw FormatError(what + ": " + e.what());
    }
  }();
  const int L = mesh.intervals();
  const auto values = get_field<std::vector<std::vector<std::vector<double>>>>(doc, "values", what);
  if (static_cast<int>(values.size()) != L) throw FormatError(what + ": values must have one entry per interval");
  for (const auto& interval : values) {
    if (static_cast<int>(interval.size()) != degree + 1)
      throw FormatError(what + ": each interval needs degree+1 node values");
    for (const auto& node : interval) {
      if (static_cast<int>(node.size()) != dim) throw FormatError(what + ": node value has the wrong dimension");
      for (double v : node) finite_or_throw(v, "piecewise polynomial");
    }
  }
  Eigen::MatrixXd storage(static_cast<Eigen::Index>(L) * degree, dim);
  for (int i = 0; i < L; ++i) {
    const auto& next = values[(i + 1) % L];
    for (int k = 0; k < dim; ++k) {
      if (values[i][degree][k] != next[0][k])
        throw FormatError(what + ": discontinuous at the right end of interval " + std::to_string(i));
    }
    for (int j = 0; j < degree; ++j) {
      for (int k = 0; k < dim; ++k) storage(static_cast<Eigen::Index>(i) * degree + j, k) = values[i][j][k];
    }
  }
  return {std::move(mesh), degree, std::move(storage)};
}

// --- solutions -------------------------------------------------------------

Json solution_to_json(const std::string& problem, const DiscreteState& state) {
  Json params = Json::array();
  for (Eigen::Index k = 1; k < state.mu.size(); ++k) params.push_back(finite_or_throw(state.mu(k), "solution"));
  return {{"format_version", kFormatVersion},
          {"problem", problem},
          {"collocation", std::string(semdde::to_string(state.collocation))},
          {"period", finite_or_throw(state.period(), "solution")},
          {"params", std::move(params)},
          {"profile", to_json(state.poly)}};
}

Solution solution_from_json(const Json& doc) {
  const std::string what = "solution";
  check_format_version(doc, what);
  for (const auto& [key, value] : doc.items()) {
    static const std::vector<std::string> known{"format_version", "problem", "collocation",
                                                "period", "params", "profile"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw FormatError(what + ": unknown key '" + key + "'");
  }
  const auto problem = get_field<std::string>(doc, "problem", what);
  NodeKind collocation;
  try {
    collocation = node_kind_from_string(get_field<std::string>(doc, "collocation", what));
  } catch (const InvalidArgument& e) {
    throw FormatError(what + ": " + e.what());
  }
  const auto period = get_field<double>(doc, "period", what);
  if (!(period > 0.0) || !std::isfinite(period)) throw FormatError(what + ": period must be positive");
  const auto params = get_field<std::vector<double>>(doc, "params", what);
  if (!doc.contains("profile")) throw FormatError(what + ": missing field 'profile'");
  PeriodicPiecewisePoly poly = poly_from_json(doc.at("profile"));
  Eigen::VectorXd mu(static_cast<Eigen::Index>(params.size()) + 1);
  mu(0) = period;
  for (std::size_t k = 0; k < params.size(); ++k) mu(static_cast<Eigen::Index>(k) + 1) = params[k];
  return {problem, DiscreteState{std::move(poly), std::move(mu), collocation}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

// --- branches --------------------------------------------------------------

BranchRow to_row(const BranchPoint& point) {
  return {point.parameter, point.period, point.amplitude, point.newton_iters, point.residual_err, point.phi_defect};
}

void write_branch_csv(std::ostream& out, const std::vector<BranchRow>& rows) {
  write_version_line(out);
  out << kBranchHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.p) << ',' << format_double(r.period) << ',' << format_double(r.amplitude) << ','
        << r.newton_iters << ',' << format_double(r.residual_err) << ',' << format_double(r.phi_defect) << '\n';
  }
}

std::vector<BranchRow> read_branch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# format_version:", 0) != 0)
    throw FormatError("branch csv: missing format_version line");
  const int version = parse_int(line.substr(line.find(':') + 2));
  if (version > kFormatVersion || version < 1)
    throw FormatError("branch csv: unsupported format_version " + std::to_string(version));
  if (!std::getline(in, line) || line != kBranchHeader) throw FormatError("branch csv: unexpected header");
  std::vector<BranchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 6) throw FormatError("branch csv: expected 6 columns in '" + line + "'");
    rows.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2]), parse_int(cells[3]),
                    parse_double(cells[4]), parse_double(cells[5])});
  }
  return rows;
}

// --- convergence tables ----------------------------------------------------

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceTable>& tables) {
  write_version_line(out);
  out << "p,L,m,converged,err,phi_defect,newton_iters,period\n";
  for (const auto& table : tables) {
    for (const auto& r : table.rows) {
      out << format_double(table.parameter) << ',' << r.L << ',' << r.m << ',' << (r.converged ? 1 : 0) << ',';
      if (r.converged) {
        out << format_double(r.err) << ',' << format_double(r.phi_defect) << ',' << r.newton_iters << ','
            << format_double(r.period) << '\n';
      } else {
        out << ",,,\n";
      }
    }
  }
}

Json convergence_to_json(const ConvergenceTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json row{{"L", r.L}, {"m", r.m}, {"converged", r.converged}};
    if (r.converged) {
      row["err"] = r.err;
      row["phi_defect"] = r.phi_defect;
      row["newton_iters"] = r.newton_iters;
      row["period"] = r.period;
    } else {
      row["failure"] = r.failure;
    }
    rows.push_back(std::move(row));
  }
  Json slopes = Json::object();
  std::vector<int> ls;
  for (const auto& r : table.rows) {
    if (std::find(ls.begin(), ls.end(), r.L) == ls.end()) ls.push_back(r.L);
  }
  for (int L : ls) {
    const auto s = fitted_slope(table, L);
    slopes[std::to_string(L)] = s ? Json(*s) : Json(nullptr);
  }
  return {{"format_version", kFormatVersion},
          {"problem", table.problem},
          {"parameter", table.parameter},
          {"kind", std::string(semdde::to_string(table.kind))},
          {"grid", table.grid},
          {"rows", std::move(rows)},
          {"slopes", std::move(slopes)}};
}

// --- circle maps -----------------------------------------------------------

std::string to_string(CircleMapKind kind) {
  switch (kind) {
    case CircleMapKind::Generic: return "generic";
    case CircleMapKind::Identity: return "identity";
    case CircleMapKind::Rotation: return "rotation";
  }
  return "generic";
}

void write_circle_map_csv(std::ostream& out, const CircleMapResult& result) {
  write_version_line(out);
  out << 't';
  for (std::size_t k = 1; k <= result.iterates.size(); ++k) out << ",g" << k;
  out << '\n';
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    out << format_double(result.grid[i]);
    for (const auto& it : result.iterates) out << ',' << format_double(it[i]);
    out << '\n';
  }
}

void write_periodic_points_csv(std::ostream& out, const CircleMapResult& result) {
  write_version_line(out);
  out << "k,t,unstable\n";
  for (const auto& pp : result.periodic_points) {
    for (std::size_t i = 0; i < pp.points.size(); ++i)
      out << pp.k << ',' << format_double(pp.points[i]) << ',' << (pp.unstable[i] ? 1 : 0) << '\n';
  }
}

Json circle_map_summary(const CircleMapResult& result) {
  Json iterates = Json::array();
  for (const auto& pp : result.periodic_points) {
    int unstable = 0;
    for (bool u : pp.unstable) unstable += u ? 1 : 0;
    iterates.push_back({{"k", pp.k},
                        {"kind", to_string(pp.kind)},
                        {"fixed_points", pp.points.size()},
                        {"unstable", unstable}});
  }
  return {{"format_version", kFormatVersion}, {"grid", result.grid.size()}, {"iterates", std::move(iterates)}};
}

}  // namespace semdde::io
