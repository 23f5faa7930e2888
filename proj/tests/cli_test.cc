// Copyright 2026 The Crowdgroups Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the command-line tool end to end through a shell.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "crowdgroups/harness.h"
#include "crowdgroups/partitioning.h"

namespace crowdgroups {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() /
                         ("crowdgroups-cli-" + std::to_string(::getpid())));
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    std::ofstream(*root_ / "spec.toml") << "n_groups = 2\nn_singletons = 3\n"
                                           "duration = 60\nextent = 15\n";
    std::ofstream(*root_ / "run.toml") << "training_span = 30\nruns = 1\n"
                                          "max_iterations = 100\n";
    ASSERT_EQ(Cli("synth --spec " + Path("spec.toml") + " --seed 1 --out " + Path("data")), 0);
    ASSERT_EQ(Cli("run --config " + Path("run.toml") + " --data " + Path("data") + " --out " +
                  Path("report")),
              0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }

  static std::string Path(const std::string& rel) { return (*root_ / rel).string(); }

  // Runs the tool with stdout to `stdout_file` and stderr to "stderr.txt";
  // returns the exit code.
  static int Cli(const std::string& args, const std::string& stdout_file = "stdout.txt") {
    const std::string cmd = std::string("'") + CROWDGROUPS_CLI_PATH + "' " + args + " > '" +
                            Path(stdout_file) + "' 2> '" + Path("stderr.txt") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static fs::path* root_;
};

fs::path* CliTest::root_ = nullptr;

TEST_F(CliTest, PipelineProducesReports) {
  for (const char* f : {"metrics.csv", "weights.csv", "per_window.csv", "config.resolved.toml"}) {
    EXPECT_TRUE(fs::exists(*root_ / "report" / "run-1" / f)) << f;
  }
  EXPECT_NE(ReadFile(*root_ / "report" / "run-1" / "config.resolved.toml").find("training_span = 30"),
            std::string::npos);
  EXPECT_NE(ReadFile(*root_ / "stdout.txt").find("G-MITRE"), std::string::npos);
}

TEST_F(CliTest, PredictReplaysRun) {
  ASSERT_EQ(Cli("predict --model " + Path("report/run-1/model.json") + " --data " + Path("data") +
                    " --window 10",
                "predict.json"),
            0);
  std::map<int, Partition> replay;
  for (auto& wp : ParsePartitionsJson(ReadFile(*root_ / "predict.json"))) {
    replay[wp.window] = wp.partition;
  }
  const auto from_run = ParsePartitionsJson(ReadFile(*root_ / "report/run-1/predictions.json"));
  ASSERT_FALSE(from_run.empty());
  for (const auto& wp : from_run) {
    ASSERT_TRUE(replay.count(wp.window)) << wp.window;
    EXPECT_EQ(replay[wp.window], wp.partition) << wp.window;
  }
}

TEST_F(CliTest, EvalAgainstItselfIsPerfect) {
  ASSERT_EQ(Cli("eval --truth " + Path("report/run-1/predictions.json") + " --pred " +
                    Path("report/run-1/predictions.json"),
                "eval.csv"),
            0);
  std::istringstream in(ReadFile(*root_ / "eval.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "window,metric,precision,recall,f1");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.substr(line.rfind(',')), ",1") << line;
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST_F(CliTest, EvalAgainstGroupFile) {
  EXPECT_EQ(Cli("eval --truth " + Path("data/groups.txt") + " --pred " +
                    Path("report/run-1/predictions.json"),
                "eval.csv"),
            0);
  EXPECT_EQ(ReadFile(*root_ / "eval.csv").rfind("window,metric,precision,recall,f1\n", 0), 0u);
}

TEST_F(CliTest, TrainFeaturesAndStats) {
  EXPECT_EQ(Cli("train --config " + Path("run.toml") + " --data " + Path("data") + " --out " +
                Path("model.json") + " --log " + Path("log.csv")),
            0);
  EXPECT_TRUE(fs::exists(*root_ / "log.csv"));
  // Same seed and windows as run-1, so the same weights.
  EXPECT_EQ(ModelFromJson(ReadFile(*root_ / "model.json")).w,
            ModelFromJson(ReadFile(*root_ / "report/run-1/model.json")).w);
  EXPECT_EQ(Cli("features --data " + Path("data"), "features.csv"), 0);
  EXPECT_EQ(ReadFile(*root_ / "features.csv").rfind("window,a,b,d_ph,d_sh,d_ca,d_he\n", 0), 0u);
  EXPECT_EQ(Cli("stats --data " + Path("data"), "stats.csv"), 0);
  EXPECT_EQ(ReadFile(*root_ / "stats.csv").rfind("d_in,d_out,d_io\n", 0), 0u);
}

TEST_F(CliTest, Deterministic) {
  ASSERT_EQ(Cli("synth --spec " + Path("spec.toml") + " --seed 1 --out " + Path("data2")), 0);
  EXPECT_EQ(ReadFile(*root_ / "data/trajectories.txt"), ReadFile(*root_ / "data2/trajectories.txt"));
  ASSERT_EQ(Cli("features --data " + Path("data"), "f1.csv"), 0);
  ASSERT_EQ(Cli("features --data " + Path("data2"), "f2.csv"), 0);
  EXPECT_EQ(ReadFile(*root_ / "f1.csv"), ReadFile(*root_ / "f2.csv"));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli("--help"), 0);
  EXPECT_EQ(Cli("run --data " + Path("data") + " --bogus-flag 3"), 2);
  EXPECT_FALSE(ReadFile(*root_ / "stderr.txt").empty());
  EXPECT_EQ(Cli(""), 2);
  EXPECT_EQ(Cli("run --data " + Path("data") + " --loss hamming"), 2);
  EXPECT_EQ(Cli("stats --data " + Path("missing")), 1);
  std::ofstream(*root_ / "broken.json") << "[{\"window\": 0, \"groups\": [[1, 1]]}]";
  EXPECT_EQ(Cli("eval --truth " + Path("broken.json") + " --pred " + Path("broken.json")), 1);
}

}  // namespace
}  // namespace crowdgroups
