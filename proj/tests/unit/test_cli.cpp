// Drives the onlineid executable through std::system.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "onlineid/csv.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("onlineid_cli_" + std::string(info->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }

  // exit status of `onlineid args`, stderr captured into err_
  int run(const std::string& args) {
    const fs::path err = root_ / "stderr.txt";
    const std::string cmd =
        std::string("\"") + ONLINEID_EXE + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    err_ = ss.str();
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static onlineid::io::CsvTable table(const fs::path& p) {
    std::ifstream in(p);
    return onlineid::io::read_csv(in);
  }

  fs::path root_;
  std::string err_;
};

const char* kShortRun = "horizon: 6\nsnapshot_times: [0, 3, 6]\nu_hat0_scale: 0.9\n";

}  // namespace

TEST_F(Cli, DefaultRunWritesOutputs) {
  const fs::path out = root_ / "run";
  ASSERT_EQ(run("run --out \"" + out.string() + "\""), 0) << err_;
  for (const char* f : {"trace.csv", "snapshots.csv", "observations.csv", "trajectory.csv",
                        "audit.txt", "config.yaml"})
    EXPECT_TRUE(fs::exists(out / f)) << f;

  const auto snap = table(out / "snapshots.csv");
  const auto tc = snap.column("t"), xc = snap.column("x"), uc = snap.column("u_star");
  std::set<double> times;
  bool centre = false;
  for (std::size_t i = 0; i < snap.rows.size(); ++i) {
    times.insert(snap.number(i, tc));
    if (snap.number(i, tc) == 0.0 && snap.number(i, xc) == 0.5) {
      centre = true;
      EXPECT_NEAR(snap.number(i, uc), 1.0, 1e-12);
    }
  }
  EXPECT_TRUE(centre);
  EXPECT_EQ(times, (std::set<double>{0, 6, 15, 30, 45, 60}));
  EXPECT_EQ(table(out / "trace.csv").rows.size(), 101u);
}

TEST_F(Cli, MalformedConfigNamesField) {
  const auto cfg = write("bad.yaml", "n_nodes: 31\ntime_stpe: 0.6\n");
  EXPECT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + (root_ / "o").string() + "\""), 2);
  EXPECT_NE(err_.find("time_stpe"), std::string::npos) << err_;

  const auto neg = write("neg.yaml", "noise_level: -1\nregime: noisy\n");
  EXPECT_EQ(run("run --config \"" + neg.string() + "\" --out \"" + (root_ / "o").string() + "\""), 2);
  EXPECT_NE(err_.find("noise_level"), std::string::npos) << err_;
}

TEST_F(Cli, MissingConfigFileIsInputError) {
  EXPECT_EQ(run("run --config \"" + (root_ / "nope.yaml").string() + "\""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, RefusesNonEmptyOutputWithoutForce) {
  const auto cfg = write("c.yaml", kShortRun);
  const fs::path out = root_ / "run";
  fs::create_directories(out);
  std::ofstream(out / "keep.txt") << "x";
  const std::string base = "run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"";
  EXPECT_EQ(run(base), 2);
  EXPECT_NE(err_.find("--force"), std::string::npos);
  EXPECT_FALSE(fs::exists(out / "trace.csv"));
  EXPECT_EQ(run(base + " --force"), 0) << err_;
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
}

TEST_F(Cli, ForwardRefinement) {
  const auto cfg = write("c.yaml", "horizon: 6\nsnapshot_times: [0, 6]\n");
  const fs::path out = root_ / "fw";
  ASSERT_EQ(run("forward --refine --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0)
      << err_;
  const auto ref = table(out / "refinement.csv");
  ASSERT_EQ(ref.rows.size(), 5u);
  const auto oc = ref.column("observed_order");
  // the coarsest pair is pre-asymptotic (pi^2 h_t ~ 6)
  for (std::size_t i = 2; i < 5; ++i) EXPECT_GT(ref.number(i, oc), 0.8);
  EXPECT_TRUE(fs::exists(out / "snapshots.csv"));
}

TEST_F(Cli, TuneSinglePoint) {
  const auto cfg = write("c.yaml", std::string(kShortRun) +
                                       "gain_mode: heuristic\ntune_target: mu_bar\ntune_grid: [10]\n");
  const fs::path out = root_ / "tune";
  ASSERT_EQ(run("tune --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0) << err_;
  const auto scores = table(out / "scores.csv");
  ASSERT_EQ(scores.rows.size(), 1u);
  EXPECT_EQ(scores.rows[0][scores.column("status")], "ok");
  EXPECT_TRUE(fs::exists(out / "best_config.yaml"));
}

TEST_F(Cli, TuneBestNotWorseThanEndpoints) {
  const auto cfg = write("c.yaml", std::string(kShortRun) + "tune_target: c1\n");
  const fs::path out = root_ / "tune";
  ASSERT_EQ(run("tune --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0) << err_;
  const auto scores = table(out / "scores.csv");
  ASSERT_EQ(scores.rows.size(), 37u);
  const auto sc = scores.column("score");
  double best = scores.number(0, sc);
  for (std::size_t i = 0; i < scores.rows.size(); ++i) best = std::min(best, scores.number(i, sc));
  EXPECT_LE(best, scores.number(0, sc));
  EXPECT_LE(best, scores.number(36, sc));
}

TEST_F(Cli, AuditRejectsTraceWithoutColumn) {
  const auto trace = write("trace.csv", "t,e_Q2\n0,1\n");
  EXPECT_NE(run("audit --trace \"" + trace.string() + "\" --out \"" + (root_ / "a").string() + "\""), 0);
  EXPECT_NE(err_.find("r_X2"), std::string::npos) << err_;
}

TEST_F(Cli, AuditOfStoredRun) {
  const auto cfg = write("c.yaml", kShortRun);
  const fs::path out = root_ / "run";
  ASSERT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0) << err_;
  EXPECT_EQ(run("audit --config \"" + cfg.string() + "\" --trace \"" + (out / "trace.csv").string() +
                "\" --out \"" + (root_ / "a").string() + "\""),
            0)
      << err_;
  EXPECT_TRUE(fs::exists(root_ / "a" / "audit.txt"));
}

TEST_F(Cli, ProbePeFromTrajectory) {
  const auto cfg = write("c.yaml", "horizon: 12\nsnapshot_times: [0, 12]\nu_hat0_scale: 0.9\n");
  const fs::path out = root_ / "run";
  ASSERT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0) << err_;
  ASSERT_EQ(run("probe-pe --config \"" + cfg.string() + "\" --trace \"" +
                (out / "trajectory.csv").string() + "\" --gamma0 3 --T0 3 --out \"" +
                (root_ / "pe").string() + "\""),
            0)
      << err_;
  EXPECT_FALSE(table(root_ / "pe" / "pe_probe.csv").rows.empty());
}

TEST_F(Cli, SameSeedSameBytes) {
  const auto cfg = write("c.yaml", std::string(kShortRun) + "regime: noisy\nnoise_level: 0.05\n");
  const fs::path a = root_ / "a", b = root_ / "b", c = root_ / "c";
  const std::string base = "run --config \"" + cfg.string() + "\" --out ";
  ASSERT_EQ(run(base + "\"" + a.string() + "\" --seed 7"), 0) << err_;
  ASSERT_EQ(run(base + "\"" + b.string() + "\" --seed 7"), 0) << err_;
  ASSERT_EQ(run(base + "\"" + c.string() + "\" --seed 8"), 0) << err_;
  for (const char* f : {"trace.csv", "snapshots.csv", "observations.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_NE(slurp(a / "trace.csv"), slurp(c / "trace.csv"));
}
