#include <gtest/gtest.h>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("semdde_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!HasFailure()) fs::remove_all(dir_);
  }

  fs::path write_config(const std::string& name, const Json& doc) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  CliRun run(const std::string& args, const std::string& env = "") {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd =
        env + " '" + SEMDDE_CLI + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  CliRun run_config(const std::string& sub, const Json& doc, const fs::path& out) {
    const fs::path cfg = write_config(sub + ".json", doc);
    return run(sub + " --config '" + cfg.string() + "' --out '" + out.string() + "'");
  }

  static Json mg_solve() {
    return {{"format_version", 1},
            {"problem", "mackey_glass"},
            {"mesh", {{"intervals", 5}}},
            {"degree", 4},
            {"initial_guess", {{"type", "hopf"}}}};
  }

  static void expect_error(const CliRun& r, int code, const std::string& type) {
    EXPECT_EQ(r.code, code) << r.err;
    const Json e = Json::parse(r.err.substr(r.err.rfind('{', r.err.find("\"error\"")))).at("error");
    EXPECT_EQ(e.at("type"), type);
    EXPECT_FALSE(e.at("message").get<std::string>().empty());
  }

  fs::path dir_;
};

TEST_F(Cli, SolveWritesSolutionAndResult) {
  const CliRun r = run_config("solve", mg_solve(), dir_ / "out");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json res = Json::parse(slurp(dir_ / "out" / "result.json"));
  EXPECT_EQ(res.at("format_version"), 1);
  EXPECT_LT(res.at("phi_defect").get<double>(), 1e-8);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "solution.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "meta.json"));
  EXPECT_EQ(Json::parse(r.out).at("period"), res.at("period"));
}

TEST_F(Cli, OutputsAreDeterministic) {
  Json cfg = mg_solve();
  cfg["continuation"] = {{"to", 0.6}, {"steps", 4}};
  ASSERT_EQ(run_config("continue", cfg, dir_ / "a").code, 0);
  ASSERT_EQ(run_config("continue", cfg, dir_ / "b").code, 0);
  for (const auto& entry : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "meta.json") continue;
    const fs::path twin = dir_ / "b" / fs::relative(entry.path(), dir_ / "a");
    EXPECT_EQ(slurp(entry.path()), slurp(twin)) << entry.path();
  }
  const Json meta = Json::parse(slurp(dir_ / "a" / "meta.json"));
  EXPECT_TRUE(meta.contains("wall_time"));
}

TEST_F(Cli, ContinuationResumes) {
  Json first = mg_solve();
  first["continuation"] = {{"to", 0.6}, {"steps", 4}};
  ASSERT_EQ(run_config("continue", first, dir_ / "part").code, 0);

  Json second = mg_solve();
  second["continuation"] = {{"to", 0.8},
                            {"steps", 3},
                            {"resume", {{"branch", "part/branch.csv"}, {"solution", "part/last_solution.json"}}}};
  const CliRun r = run_config("continue", second, dir_ / "full");
  ASSERT_EQ(r.code, 0) << r.err;

  const std::string part = slurp(dir_ / "part" / "branch.csv");
  const std::string full = slurp(dir_ / "full" / "branch.csv");
  EXPECT_EQ(full.rfind(part, 0), 0u);
  std::istringstream lines(full);
  std::string line, last;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    last = line;
  }
  EXPECT_EQ(count, 2 + 4 + 3);
  EXPECT_EQ(last.substr(0, 4), "0.8,");
  EXPECT_TRUE(fs::exists(dir_ / "full" / "solutions" / "point_0006.json"));
}

TEST_F(Cli, ResumeRejectsMismatchedSolution) {
  Json first = mg_solve();
  first["continuation"] = {{"to", 0.6}, {"steps", 2}};
  ASSERT_EQ(run_config("continue", first, dir_ / "part").code, 0);
  Json second = mg_solve();
  second["continuation"] = {
      {"to", 0.8}, {"resume", {{"branch", "part/branch.csv"}, {"solution", "part/solutions/point_0000.json"}}}};
  expect_error(run_config("continue", second, dir_ / "full"), 1, "config_error");
}

TEST_F(Cli, ConfigErrorsExitWithOne) {
  Json unknown = mg_solve();
  unknown["mesh"]["spacing"] = "uniform";
  expect_error(run_config("solve", unknown, dir_ / "o"), 1, "config_error");

  Json future = mg_solve();
  future["format_version"] = 2;
  expect_error(run_config("solve", future, dir_ / "o"), 1, "config_error");

  Json problem = mg_solve();
  problem["problem"] = "lorenz";
  expect_error(run_config("solve", problem, dir_ / "o"), 1, "config_error");

  Json tol = mg_solve();
  tol["newton"] = {{"tol_residual", -1.0}};
  expect_error(run_config("solve", tol, dir_ / "o"), 1, "config_error");

  std::ofstream(dir_ / "broken.json") << "{\"format_version\": 1,";
  expect_error(run("solve --config '" + (dir_ / "broken.json").string() + "'"), 1, "config_error");
}

TEST_F(Cli, UsageAndEnvironmentErrors) {
  expect_error(run("solve"), 1, "usage_error");
  expect_error(run("nodes --jobs 0"), 1, "usage_error");
  expect_error(run("solve --config '" + (dir_ / "missing.json").string() + "'"), 1, "usage_error");
  const fs::path cfg = write_config("ok.json", mg_solve());
  expect_error(run("solve --config '" + cfg.string() + "'", "SEMDDE_LOG=verbose"), 1, "config_error");
}

TEST_F(Cli, NewtonFailureExitsWithTwo) {
  Json cfg = mg_solve();
  cfg["newton"] = {{"max_iter", 1}};
  expect_error(run_config("solve", cfg, dir_ / "o"), 2, "newton_failure");
}

TEST_F(Cli, NodesCommand) {
  const CliRun r = run("nodes --out '" + (dir_ / "n").string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir_ / "n" / "lebesgue.csv");
  EXPECT_NE(csv.find("kind,m,lebesgue,lebesgue_over_m"), std::string::npos);
  EXPECT_NE(csv.find("chebyshev_gauss,8,"), std::string::npos);
}

TEST_F(Cli, IdentityCircleMap) {
  const Json cfg{{"format_version", 1}, {"circle_map", {{"shift", 0.0}, {"k_max", 2}, {"grid", 2000}}}};
  const CliRun r = run_config("circle-map", cfg, dir_ / "c");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = Json::parse(slurp(dir_ / "c" / "circle_map.json"));
  EXPECT_EQ(s.at("iterates")[0].at("kind"), "identity");
  EXPECT_EQ(s.at("iterates")[1].at("fixed_points"), 0);
}

TEST_F(Cli, PeriodFiveOrbitFromDataFile) {
  const fs::path data = fs::path(SEMDDE_DATA_DIR) / "sd_quadratic_tau0.95.json";
  Json solve{{"format_version", 1},
             {"problem", "sd_quadratic"},
             {"mesh", {{"intervals", 20}}},
             {"degree", 8},
             {"initial_guess", {{"type", "file"}, {"path", data.string()}}}};
  ASSERT_EQ(run_config("solve", solve, dir_ / "s").code, 0);
  const Json cm{{"format_version", 1}, {"circle_map", {{"solution", "s/solution.json"}, {"k_max", 5}}}};
  const CliRun r = run_config("circle-map", cm, dir_ / "c");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = Json::parse(slurp(dir_ / "c" / "circle_map.json"));
  for (int k = 0; k < 4; ++k) EXPECT_EQ(s.at("iterates")[k].at("fixed_points"), 0) << "k=" << k + 1;
  EXPECT_EQ(s.at("iterates")[4].at("unstable"), 5);
}

}  // namespace
