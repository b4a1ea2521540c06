#include "subeik/app.hpp"
#include "subeik/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace subeik;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("subeik_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& text, const std::string& name = "run.cfg") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text << "output.dir = " << (dir_ / "out").string() << '\n';
    return p.string();
  }

  int run_cmd(const std::string& sub, const std::string& cfg,
              const std::vector<std::string>& overrides = {}) {
    out_.str("");
    err_.str("");
    return run(sub, cfg, overrides, out_, err_);
  }

  std::string slurp(const std::string& name) const {
    std::ifstream f(dir_ / "out" / name);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  CsvTable table(const std::string& name) const {
    std::ifstream f(dir_ / "out" / name);
    return read_csv(f);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

const char* kDisk = "system.name = euclidean\ndomain.params = 1\ngrid.h = 0.0625\n";
const char* kHeis = "system.name = heisenberg\ndomain.params = 1\n";

}  // namespace

TEST_F(Cli, SolveWritesField) {
  const auto cfg = write_config(kDisk);
  ASSERT_EQ(run_cmd("solve", cfg), kExitOk) << err_.str();
  const auto t = table("field.csv");
  EXPECT_EQ(t.column("value"), 2);
  EXPECT_EQ(t.rows.size(), 37u * 37u);  // 33 nodes across plus two pad nodes a side
  EXPECT_NE(out_.str().find("residual_max"), std::string::npos);
  const std::string first = slurp("field.csv");
  ASSERT_EQ(run_cmd("solve", cfg), kExitOk);
  EXPECT_EQ(slurp("field.csv"), first);
}

TEST_F(Cli, ConfigErrors) {
  EXPECT_EQ(run_cmd("solve", write_config("system.name = euclidean\n")), kExitConfig);
  EXPECT_NE(err_.str().find("ConfigError"), std::string::npos);
  EXPECT_EQ(run_cmd("solve", write_config(std::string(kDisk) + "grid.colour = red\n")),
            kExitConfig);
  EXPECT_EQ(run_cmd("solve", (dir_ / "missing.cfg").string()), kExitConfig);
  EXPECT_EQ(run_cmd("solve", write_config(kDisk), {"grid.h=-1"}), kExitConfig);
  EXPECT_EQ(run_cmd("study", write_config(kDisk)), kExitConfig);
}

TEST_F(Cli, NumericalFailureIsReported) {
  const auto cfg = write_config(kDisk);
  EXPECT_EQ(run_cmd("solve", cfg, {"solver.max_sweeps=1"}), kExitNumerical);
  EXPECT_EQ(err_.str().rfind("NotConverged", 0), 0u) << err_.str();
}

TEST_F(Cli, TraceSkipsCharacteristicSeed) {
  const auto cfg = write_config(std::string(kHeis) +
                                "flow.seed_points = 0 0 1; 1 0 0\nflow.t_max = 0.2\n");
  ASSERT_EQ(run_cmd("trace", cfg), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("seed 0: CharacteristicLaunch"), std::string::npos) << out_.str();
  EXPECT_FALSE(fs::exists(dir_ / "out" / "trajectory_0.csv"));
  const auto t = table("trajectory_1.csv");
  EXPECT_EQ(t.header.front(), "t");
  EXPECT_EQ(t.header.size(), 9u);
  EXPECT_EQ(parse_double(t.rows.front()[1]), 1.0);

  ASSERT_EQ(run_cmd("trace", cfg, {"output.concat=true"}), kExitOk);
  const auto c = table("trajectories.csv");
  EXPECT_EQ(c.header.front(), "seed");
  for (const auto& row : c.rows) EXPECT_EQ(row[0], "1");
}

TEST_F(Cli, ConjugateOnCircle) {
  const auto cfg = write_config(std::string(kDisk) + "flow.seeds = 4\nflow.t_max = 1.5\n");
  ASSERT_EQ(run_cmd("conjugate", cfg), kExitOk) << err_.str();
  const auto t = table("conjugate.csv");
  ASSERT_EQ(t.rows.size(), 4u);
  const int t0 = t.column("t0"), has = t.column("has_conjugate");
  for (const auto& row : t.rows) {
    EXPECT_EQ(row[has], "1");
    EXPECT_NEAR(parse_double(row[t0]), 1.0, 1e-6);
  }
}

TEST_F(Cli, SingularAndStudy) {
  const auto cfg = write_config(std::string(kDisk) + "singular.h_list = 0.125 0.0625 0.03125\n");
  ASSERT_EQ(run_cmd("singular", cfg), kExitOk) << err_.str();
  EXPECT_NE(slurp("report.txt").find("[measures]"), std::string::npos);
  const auto flagged = table("flagged.csv");
  EXPECT_FALSE(flagged.rows.empty());
  for (const auto& row : flagged.rows) {
    EXPECT_LE(std::hypot(parse_double(row[0]), parse_double(row[1])), 4 * 0.0625);
  }
  ASSERT_EQ(run_cmd("study", cfg), kExitOk) << err_.str();
  const auto s = table("study.csv");
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_GT(parse_double(s.rows[0][1]), parse_double(s.rows[2][1]));
}

TEST_F(Cli, PolynomialTableRelativeToConfig) {
  std::ofstream(dir_ / "grushin.tbl") << "# X1 = d/dx, X2 = x d/dy\n"
                                      << "1 1 0 0 1\n"
                                      << "2 2 1 0 1\n";
  const auto cfg = write_config(
      "system.name = polynomial\nsystem.dim = 2\nsystem.count = 2\n"
      "system.table = grushin.tbl\ndomain.params = 0 0.5 1\ngrid.h = 0.0625\n");
  ASSERT_EQ(run_cmd("solve", cfg), kExitOk) << err_.str();
}

#ifdef SUBEIK_CLI_PATH
TEST_F(Cli, BinaryArguments) {
  const std::string bin = SUBEIK_CLI_PATH;
  const std::string quiet = " > " + (dir_ / "log").string() + " 2>&1";
  const auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + quiet).c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("solve"), 2);
  EXPECT_EQ(status("frobnicate --config x"), 2);
  EXPECT_EQ(status("--help"), 0);
  const auto cfg = write_config(std::string(kHeis) + "flow.seeds = 3\nflow.t_max = 0.1\n");
  EXPECT_EQ(status("trace --config " + cfg + " --concat --set flow.step=0.01 --set flow.seeds=2"),
            0);
  const auto c = table("trajectories.csv");
  EXPECT_EQ(c.header.front(), "seed");
  EXPECT_EQ(parse_double(c.rows[1][1]), 0.01);
  for (const auto& row : c.rows) EXPECT_LT(std::stoi(row[0]), 2);  // both --set applied
  EXPECT_EQ(status("solve --config " + cfg), 2);
}
#endif
