#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CARRYSTATE_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "carrystate_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("ladder --family navier --out-dir " + fresh("usage").string()), 1);
  EXPECT_EQ(run("replay"), 1);
}

TEST(Cli, DataErrorsExitTwo) {
  const fs::path d = fresh("data");
  EXPECT_EQ(run("metrics --pred " + (d / "none.fld").string() + " --truth " + (d / "none.fld").string() +
                " --n-coarse 8 --out-dir " + d.string()),
            2);
}

TEST(Cli, GenThenMetricsWritesManifest) {
  const fs::path d = fresh("gen");
  ASSERT_EQ(run("gen --family advection --n-fine 64 --count 2 --out-dir " + d.string()), 0);
  EXPECT_TRUE(fs::exists(d / "advection_0000.fld"));
  EXPECT_TRUE(fs::exists(d / "advection_0001.fld"));
  EXPECT_TRUE(fs::exists(d / "gen.manifest.json"));
  const std::string f0 = (d / "advection_0000.fld").string();
  ASSERT_EQ(run("metrics --pred " + f0 + " --truth " + f0 + " --n-coarse 16 --out-dir " + d.string()), 0);
  EXPECT_NE(slurp(d / "metrics.csv").find("expr_rel"), std::string::npos);
}

TEST(Cli, ReplayReproducesOutputs) {
  const fs::path a = fresh("replay_a"), b = fresh("replay_b");
  ASSERT_EQ(run("phase-diagram --B 0,2,4,6,8,10,12 --r 2,4,8 --out-dir " + a.string()), 0);
  ASSERT_EQ(run("replay " + (a / "phase-diagram.manifest.json").string() + " --out-dir " + b.string()), 0);
  for (const char* f : {"phase_diagram.csv", "phase_contour.csv", "phase_diagram.svg"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}
