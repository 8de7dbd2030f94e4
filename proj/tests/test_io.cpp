#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "semdde/io.hpp"

namespace semdde::io {
namespace {

PeriodicPiecewisePoly wobbly(int m) {
  auto f = [](double t) {
    Eigen::VectorXd v(2);
    v << std::sin(2 * std::numbers::pi * t) / 3.0, std::exp(std::cos(2 * std::numbers::pi * t));
    return v;
  };
  return PeriodicPiecewisePoly::sample(f, Mesh(Eigen::Vector4d(0.0, 0.1, 0.55, 1.0)), m, 2);
}

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng) * std::pow(10.0, k % 40 - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(FormatVersion, Checks) {
  EXPECT_NO_THROW(check_format_version(Json{{"format_version", 1}}, "x"));
  EXPECT_THROW(check_format_version(Json{{"format_version", 2}}, "x"), FormatError);
  EXPECT_THROW(check_format_version(Json{{"format_version", 0}}, "x"), FormatError);
  EXPECT_THROW(check_format_version(Json{{"format_version", "1"}}, "x"), FormatError);
  EXPECT_THROW(check_format_version(Json::object(), "x"), FormatError);
}

TEST(PolyJson, BitExactRoundTrip) {
  const PeriodicPiecewisePoly p = wobbly(7);
  const Json doc = Json::parse(to_json(p).dump());
  const PeriodicPiecewisePoly q = poly_from_json(doc);
  EXPECT_TRUE(q.mesh() == p.mesh());
  EXPECT_EQ(q.degree(), 7);
  EXPECT_EQ(q.node_values(), p.node_values());
}

TEST(PolyJson, RejectsFutureVersion) {
  Json doc = to_json(wobbly(4));
  doc["format_version"] = kFormatVersion + 1;
  EXPECT_THROW(poly_from_json(doc), FormatError);
}

TEST(PolyJson, RejectsDiscontinuity) {
  Json doc = to_json(wobbly(4));
  doc["values"][1][0][0] = doc["values"][1][0][0].get<double>() + 1e-12;
  EXPECT_THROW(poly_from_json(doc), FormatError);
  Json wrap = to_json(wobbly(4));
  wrap["values"][2][4][1] = 0.0;
  EXPECT_THROW(poly_from_json(wrap), FormatError);
}

TEST(PolyJson, RejectsMalformedArrays) {
  Json doc = to_json(wobbly(4));
  doc["values"][0].erase(0);
  EXPECT_THROW(poly_from_json(doc), FormatError);
  Json kind = to_json(wobbly(4));
  kind["rep_kind"] = "monomial";
  EXPECT_THROW(poly_from_json(kind), FormatError);
  Json nan = to_json(wobbly(4));
  nan["values"][1][2][0] = nullptr;
  EXPECT_THROW(poly_from_json(nan), FormatError);
}

TEST(SolutionJson, RoundTripAndUnknownKeys) {
  const DiscreteState s{wobbly(5), Eigen::Vector3d(2.5, 0.125, -1.0)};
  const Solution back = solution_from_json(Json::parse(solution_to_json("custom", s).dump()));
  EXPECT_EQ(back.problem, "custom");
  EXPECT_EQ(back.state.mu, s.mu);
  EXPECT_EQ(back.state.poly.node_values(), s.poly.node_values());
  Json extra = solution_to_json("custom", s);
  extra["comment"] = "hi";
  EXPECT_THROW(solution_from_json(extra), FormatError);
}

TEST(BranchCsv, RoundTrip) {
  std::vector<BranchRow> rows{{0.5, 1.6, 0.01, 3, 1e-9, 2e-12}, {0.52, 1.61, 0.11, 2, 1.25e-9, 3e-12}};
  std::stringstream ss;
  write_branch_csv(ss, rows);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# format_version: 1\np,T,amplitude,newton_iters,residual_err,phi_defect\n", 0), 0u);
  const std::vector<BranchRow> back = read_branch_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].p, 0.52);
  EXPECT_EQ(back[1].newton_iters, 2);
  EXPECT_EQ(back[1].residual_err, 1.25e-9);
}

TEST(BranchCsv, RejectsBadInput) {
  std::stringstream future("# format_version: 2\np,T,amplitude,newton_iters,residual_err,phi_defect\n");
  EXPECT_THROW(read_branch_csv(future), FormatError);
  std::stringstream header("# format_version: 1\np,T,amp\n");
  EXPECT_THROW(read_branch_csv(header), FormatError);
  std::stringstream row("# format_version: 1\np,T,amplitude,newton_iters,residual_err,phi_defect\n1,2,3\n");
  EXPECT_THROW(read_branch_csv(row), FormatError);
}

TEST(ConvergenceCsv, HeaderAndRows) {
  ConvergenceTable t;
  t.parameter = 1.0;
  t.rows.push_back({2, 4, true, 1e-3, 1e-12, 3, 0.5, 3.1, ""});
  t.rows.push_back({2, 6, false, 0.0, 0.0, 40, 0.5, 0.0, "max_iter"});
  std::stringstream ss;
  write_convergence_csv(ss, {t});
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "# format_version: 1");
  std::getline(ss, line);
  EXPECT_EQ(line, "p,L,m,converged,err,phi_defect,newton_iters,period");
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 10), "1,2,4,1,0.");
  const Json j = convergence_to_json(t);
  EXPECT_EQ(j["rows"].size(), 2u);
}

TEST(CircleMapOutput, SummaryNamesTheKinds) {
  const CircleMapResult r = circle_map_analysis([](double) { return 0.0; }, 2, 1000);
  const Json j = circle_map_summary(r);
  EXPECT_EQ(j["iterates"][0]["kind"], "identity");
  EXPECT_EQ(j["grid"], 1000);
  std::stringstream ss;
  write_circle_map_csv(ss, r);
  std::string header;
  std::getline(ss, header);
  if (header.starts_with("#")) std::getline(ss, header);
  EXPECT_EQ(header, "t,g1,g2");
}

}  // namespace
}  // namespace semdde::io
