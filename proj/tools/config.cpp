#include "config.hpp"

#include <set>

namespace semdde::cli {

namespace {

using io::Json;

// Reads the keys of one JSON object and rejects whatever was not read.
class ObjectReader {
 public:
  ObjectReader(const Json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw FormatError(where_ + ": expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return doc_.contains(key); }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!doc_.contains(key)) return std::nullopt;
    try {
      return doc_.at(key).get<T>();
    } catch (const Json::exception&) {
      throw FormatError(where_ + "." + key + ": wrong type");
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    return optional<T>(key).value_or(std::move(fallback));
  }

  template <class T>
  T require(const std::string& key) {
    auto v = optional<T>(key);
    if (!v) throw FormatError(where_ + ": missing required key '" + key + "'");
    return *v;
  }

  const Json& child(const std::string& key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) throw FormatError(where_ + ": unknown key '" + key + "'");
    }
  }

  [[nodiscard]] const std::string& where() const { return where_; }

 private:
  const Json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

NodeKind parse_kind(const std::string& name, const std::string& where) {
  try {
    return node_kind_from_string(name);
  } catch (const InvalidArgument&) {
    throw FormatError(where + ": unknown node kind '" + name + "'");
  }
}

void require_positive(int v, const std::string& what) {
  if (v < 1) throw FormatError(what + " must be >= 1, got " + std::to_string(v));
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() ? p : base / p;
}

GuessConfig parse_guess(const Json& doc, const std::filesystem::path& base) {
  ObjectReader r(doc, "initial_guess");
  GuessConfig g;
  const auto type = r.require<std::string>("type");
  if (type == "hopf") {
    g.type = GuessConfig::Type::Hopf;
    g.amplitude = r.get("amplitude", g.amplitude);
    g.offset = r.get("offset", g.offset);
  } else if (type == "file") {
    g.type = GuessConfig::Type::File;
    g.path = resolve(r.require<std::string>("path"), base);
  } else if (type == "constant") {
    g.type = GuessConfig::Type::Constant;
    g.value = r.require<std::vector<double>>("value");
    g.period = r.require<double>("period");
    if (g.value.empty()) throw FormatError("initial_guess.value must not be empty");
    if (!(g.period > 0.0)) throw FormatError("initial_guess.period must be positive");
  } else {
    throw FormatError("initial_guess.type must be hopf, file or constant, got '" + type + "'");
  }
  r.finish();
  return g;
}

MeshConfig parse_mesh(const Json& doc) {
  ObjectReader r(doc, "mesh");
  MeshConfig m;
  m.intervals = r.optional<int>("intervals");
  m.breaks = r.get<std::vector<double>>("breaks", {});
  r.finish();
  if (m.intervals.has_value() == !m.breaks.empty())
    throw FormatError("mesh: give exactly one of 'intervals' and 'breaks'");
  if (m.intervals) require_positive(*m.intervals, "mesh.intervals");
  try {
    (void)m.build();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("mesh: ") + e.what());
  }
  return m;
}

NewtonSettings parse_newton(const Json& doc) {
  ObjectReader r(doc, "newton");
  NewtonSettings s;
  s.tol_residual = r.get("tol_residual", s.tol_residual);
  s.tol_step = r.get("tol_step", s.tol_step);
  s.max_iter = r.get("max_iter", s.max_iter);
  s.min_iter = r.get("min_iter", s.min_iter);
  s.min_damping = r.get("min_damping", s.min_damping);
  s.fd_step = r.get("fd_step", s.fd_step);
  r.finish();
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return s;
}

ContinuationConfig parse_continuation(const Json& doc, const std::filesystem::path& base) {
  ObjectReader r(doc, "continuation");
  ContinuationConfig c;
  c.from = r.optional<double>("from");
  c.to = r.require<double>("to");
  c.steps = r.get("steps", c.steps);
  c.max_bisections = r.get("max_bisections", c.max_bisections);
  if (r.has("resume")) {
    ObjectReader rr(r.child("resume"), "continuation.resume");
    c.resume_branch = resolve(rr.require<std::string>("branch"), base);
    c.resume_solution = resolve(rr.require<std::string>("solution"), base);
    rr.finish();
  }
  r.finish();
  require_positive(c.steps, "continuation.steps");
  if (c.max_bisections < 0) throw FormatError("continuation.max_bisections must be >= 0");
  return c;
}

ConvergenceConfig parse_convergence(const Json& doc) {
  ObjectReader r(doc, "convergence");
  ConvergenceConfig c;
  c.intervals = r.require<std::vector<int>>("intervals");
  c.degrees = r.require<std::vector<int>>("degrees");
  c.parameters = r.require<std::vector<double>>("parameters");
  c.reference_steps = r.get("reference_steps", c.reference_steps);
  r.finish();
  if (c.intervals.empty()) throw FormatError("convergence.intervals must not be empty");
  if (c.degrees.empty()) throw FormatError("convergence.degrees must not be empty");
  if (c.parameters.empty()) throw FormatError("convergence.parameters must not be empty");
  for (int L : c.intervals) require_positive(L, "convergence.intervals entry");
  for (int m : c.degrees) {
    if (m < 2) throw FormatError("convergence.degrees entries must be >= 2");
  }
  require_positive(c.reference_steps, "convergence.reference_steps");
  return c;
}

CircleMapConfig parse_circle_map(const Json& doc, const std::filesystem::path& base) {
  ObjectReader r(doc, "circle_map");
  CircleMapConfig c;
  if (auto s = r.optional<std::string>("solution")) c.solution = resolve(*s, base);
  c.shift = r.optional<double>("shift");
  c.k_max = r.get("k_max", c.k_max);
  c.grid = r.get("grid", c.grid);
  r.finish();
  if (c.solution.has_value() == c.shift.has_value())
    throw FormatError("circle_map: give exactly one of 'solution' and 'shift'");
  require_positive(c.k_max, "circle_map.k_max");
  if (c.grid < 1000) throw FormatError("circle_map.grid must be >= 1000");
  return c;
}

NodesConfig parse_nodes(const Json& doc) {
  ObjectReader r(doc, "nodes");
  NodesConfig c;
  if (auto kinds = r.optional<std::vector<std::string>>("kinds")) {
    c.kinds.clear();
    for (const auto& k : *kinds) c.kinds.push_back(parse_kind(k, "nodes.kinds"));
  }
  c.degrees = r.get("degrees", c.degrees);
  c.samples = r.get("samples", c.samples);
  r.finish();
  for (int m : c.degrees) require_positive(m, "nodes.degrees entry");
  return c;
}

}  // namespace

Mesh MeshConfig::build() const {
  if (intervals) return Mesh::uniform(*intervals);
  return Mesh(Eigen::Map<const Eigen::VectorXd>(breaks.data(), static_cast<Eigen::Index>(breaks.size())));
}

RunConfig parse_run_config(const io::Json& doc, const std::filesystem::path& base_dir) {
  io::check_format_version(doc, "config");
  ObjectReader r(doc, "config");
  (void)r.optional<int>("format_version");
  RunConfig c;
  c.problem = r.optional<std::string>("problem");
  c.collocation = parse_kind(r.get<std::string>("collocation", "gauss_legendre"), "collocation");
  if (r.has("mesh")) {
    c.mesh = parse_mesh(r.child("mesh"));
  } else {
    c.mesh.intervals = 11;
  }
  c.degree = r.get("degree", c.degree);
  require_positive(c.degree, "degree");
  c.parameter = r.optional<double>("parameter");
  if (r.has("initial_guess")) c.guess = parse_guess(r.child("initial_guess"), base_dir);
  if (r.has("newton")) c.newton = parse_newton(r.child("newton"));
  c.grid = r.get("grid", c.grid);
  if (c.grid < 2) throw FormatError("grid must be >= 2");
  if (auto out = r.optional<std::string>("output_dir")) c.output_dir = resolve(*out, base_dir);
  if (r.has("continuation")) c.continuation = parse_continuation(r.child("continuation"), base_dir);
  if (r.has("convergence")) c.convergence = parse_convergence(r.child("convergence"));
  if (r.has("circle_map")) c.circle_map = parse_circle_map(r.child("circle_map"), base_dir);
  if (r.has("nodes")) c.nodes = parse_nodes(r.child("nodes"));
  r.finish();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const io::Json doc = io::read_json_file(path);
  return parse_run_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace semdde::cli
