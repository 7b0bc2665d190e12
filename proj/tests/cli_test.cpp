#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pruefer/report.hpp"
#include "pruefer/table_io.hpp"
#include "pruefer/trajectory_io.hpp"

using namespace pruefer;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pruefer_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the CLI inside the scratch directory; returns the exit status.
  int run(const std::string& args, const std::string& log = "log.txt") const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" PRUEFER_CLI "' " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  [[nodiscard]] std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, IntegrateZero) {
  ASSERT_EQ(run("integrate --potential zero --k 1.0 --theta0 0.3 --x-end 100"), 0) << read("log.txt");
  const auto traj = import_trajectory(dir_ / "trajectory.csv");
  EXPECT_EQ(traj.config.theta0, 0.3);
  EXPECT_EQ(traj.x_reached, 100.0);
  for (const auto& s : traj.samples) EXPECT_NEAR(s.theta, 0.3 + s.x, 1e-9);
}

TEST_F(CliTest, IntegrateFeedbackWritesEvents) {
  ASSERT_EQ(run("integrate --potential feedback --a 1.0 --k 0.5 --x-end 1e4"), 0) << read("log.txt");
  const auto events = read("trajectory.events.csv");
  EXPECT_NE(events.find("\nslide_begin,"), std::string::npos);
  EXPECT_NE(events.find("\nslide_end,3,"), std::string::npos);
  EXPECT_NE(events.find("\nsign_switch,"), std::string::npos);
  EXPECT_NE(events.find("\ncrossing,"), std::string::npos);
}

TEST_F(CliTest, SynthesizeThenIntegrateTable) {
  ASSERT_EQ(run("synthesize --a 1 --lambda 0.25 --x-end 1e4"), 0) << read("log.txt");
  const auto log = read("log.txt");
  EXPECT_NE(log.find("limsup|xV|"), std::string::npos);
  EXPECT_NE(log.find(": 1.000000"), std::string::npos) << log;
  EXPECT_NE(log.find("a/(k pi): 0.636620"), std::string::npos) << log;
  ASSERT_EQ(run("integrate --potential table --file potential.csv --k 0.5"), 0) << read("log.txt");
  const auto traj = import_trajectory(dir_ / "trajectory.csv");
  EXPECT_EQ(traj.x_reached, 1e4);
  ASSERT_EQ(run("fit-decay --input trajectory.csv --a 1", "fit.json"), 0) << read("fit.json");
  const auto v = verdict_from_json(Json::parse(read("fit.json")));
  EXPECT_EQ(v.verdict, Verdict::embedded_eigenvalue);
}

TEST_F(CliTest, SynthesizeRefusesAboveThreshold) {
  EXPECT_EQ(run("synthesize --a 1 --lambda 0.41"), 2);
  EXPECT_NE(read("log.txt").find("0.405285"), std::string::npos) << read("log.txt");
  EXPECT_FALSE(fs::exists(dir_ / "potential.csv"));
  EXPECT_EQ(run("synthesize --a 2 --lambda 1.0 --x-end 1e3"), 0) << read("log.txt");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("integrate --no-such-flag"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("integrate --k 0"), 2);
  EXPECT_EQ(run("integrate --k 1 --lambda 1"), 2);
  EXPECT_EQ(run("integrate --potential table"), 2);
  EXPECT_EQ(run("integrate --potential nonsense"), 2);
  EXPECT_EQ(run("verify --potential feedback --a 1 --k 0.5"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, NumericalFailureExitsOne) {
  {
    std::ofstream out(dir_ / "steep.csv");
    out << "x,V\n0,-1e300\n10,-1e300\n";
  }
  EXPECT_EQ(run("integrate --potential table --file steep.csv --k 1"), 1);
  EXPECT_NE(read("log.txt").find("x ="), std::string::npos) << read("log.txt");
}

TEST_F(CliTest, VerifyProfiles) {
  ASSERT_EQ(run("verify --potential coulomb-sign --a 1 --sign -1 --k 1 --x-end 1000", "v.json"), 0) << read("v.json");
  auto d = discrepancy_from_json(Json::parse(read("verify.json")));
  EXPECT_EQ(d.profile.name, "smooth");
  EXPECT_TRUE(d.pass);
  ASSERT_EQ(run("verify --potential zero --k 1", "v.json"), 0) << read("v.json");
  d = discrepancy_from_json(Json::parse(read("verify.json")));
  EXPECT_EQ(d.profile.name, "exact");
  ASSERT_EQ(run("verify --potential feedback --a 1 --k 0.5 --via-table", "v.json"), 0) << read("v.json");
  d = discrepancy_from_json(Json::parse(read("verify.json")));
  EXPECT_EQ(d.profile.name, "table");
  EXPECT_LE(d.max_dlog_r, 1e-4);
}

TEST_F(CliTest, VerifyFailureExitsOne) {
  // a coarse oracle step cannot meet the exact profile
  EXPECT_EQ(run("verify --potential zero --k 1 --step 0.1 --profile exact"), 1);
}

TEST_F(CliTest, ScanIndependentOfWorkers) {
  const std::string scan = "threshold-scan --a 1 --k 0.5,0.7 --x-end 1e4";
  ASSERT_EQ(run("--out-dir w1 --workers 1 " + scan), 0) << read("log.txt");
  ASSERT_EQ(run("--out-dir w3 --workers 3 " + scan), 0) << read("log.txt");
  EXPECT_EQ(read("w1/scan.jsonl"), read("w3/scan.jsonl"));
  EXPECT_EQ(read("w1/scan.summary.json"), read("w3/scan.summary.json"));
  std::istringstream lines(read("w1/scan.jsonl"));
  std::string line;
  std::vector<double> ks;
  while (std::getline(lines, line)) ks.push_back(Json::parse(line).at("k").get<double>());
  EXPECT_EQ(ks, (std::vector<double>{0.5, 0.7}));
}

TEST_F(CliTest, ScanZeroPotentialNeverEigenvalue) {
  ASSERT_EQ(run("threshold-scan --a 0 --k-range 0.4,0.9,0.1 --x-end 1e4"), 0) << read("log.txt");
  std::istringstream lines(read("scan.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(Json::parse(line).at("verdict"), "not_eigenvalue") << line;
    ++n;
  }
  EXPECT_EQ(n, 6);
}

TEST_F(CliTest, ScanAcceptsLambda) {
  ASSERT_EQ(run("threshold-scan --a 1 --lambda 0.25 --x-end 1e4"), 0) << read("log.txt");
  EXPECT_EQ(Json::parse(read("scan.jsonl")).at("k").get<double>(), 0.5);
}

TEST_F(CliTest, SweepWritesReadableTrajectories) {
  ASSERT_EQ(run("sweep --a 1 --k 0.5 --theta0 0.3,1.0 --x-end 1e3"), 0) << read("log.txt");
  std::istringstream lines(read("sweep.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = Json::parse(line);
    const auto traj = import_trajectory(dir_ / j.at("trajectory").get<std::string>());
    EXPECT_EQ(traj.config.theta0, j.at("theta0").get<double>());
    ++n;
  }
  EXPECT_EQ(n, 2);
}

TEST_F(CliTest, ConfigFilePrecedence) {
  {
    std::ofstream out(dir_ / "run.ini");
    out << "out-dir=from_config\nintegrate.k=0.5\nintegrate.x-end=50\n";
  }
  ASSERT_EQ(run("--config run.ini integrate"), 0) << read("log.txt");
  auto traj = import_trajectory(dir_ / "from_config" / "trajectory.csv");
  EXPECT_EQ(traj.config.k, 0.5);
  EXPECT_EQ(traj.config.x_end, 50.0);
  ASSERT_EQ(run("--config run.ini integrate --k 2"), 0) << read("log.txt");
  traj = import_trajectory(dir_ / "from_config" / "trajectory.csv");
  EXPECT_EQ(traj.config.k, 2.0);
}

TEST_F(CliTest, RepeatedRunsByteIdentical) {
  const std::string cmd = "integrate --potential feedback --a 1 --k 0.5 --x-end 1e4";
  ASSERT_EQ(run("--out-dir r1 " + cmd), 0);
  ASSERT_EQ(run("--out-dir r2 " + cmd), 0);
  EXPECT_EQ(read("r1/trajectory.csv"), read("r2/trajectory.csv"));
  EXPECT_EQ(read("r1/trajectory.events.csv"), read("r2/trajectory.events.csv"));
  ASSERT_EQ(run("--out-dir r1 synthesize --a 1 --k 0.5 --x-end 1e4"), 0);
  ASSERT_EQ(run("--out-dir r2 synthesize --a 1 --k 0.5 --x-end 1e4"), 0);
  EXPECT_EQ(read("r1/potential.csv"), read("r2/potential.csv"));
}
