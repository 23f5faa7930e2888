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

// Experiment orchestration: run configuration, synthetic crowds and the
// train / predict / score pipeline behind the command-line tool.

#ifndef CROWDGROUPS_HARNESS_H_
#define CROWDGROUPS_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "crowdgroups/features.h"
#include "crowdgroups/keyvalue.h"
#include "crowdgroups/learning.h"
#include "crowdgroups/losses.h"
#include "crowdgroups/trajectories.h"

namespace crowdgroups {

struct RunConfig {
  double window_len = 10.0;     // s
  double stride = 10.0;         // s
  double training_span = 100.0; // s, measured from the first window
  double C = 10.0;
  LossKind loss = LossKind::kGMitre;
  TrainingMode mode = TrainingMode::kBatch;
  std::uint64_t seed = 1;
  int runs = 5;
  int max_iterations = 1000;
  int sequential_budget = 100;  // steps per arriving example
  int online_budget = 10;       // steps per predicted scene
  int objective_every = 0;
  FeatureConfig features;

  // Throws ConfigError.
  void Validate() const;
};

// Overrides the fields named in `kv` on top of `base`. Unknown keys throw
// ConfigError.
RunConfig RunConfigFromKeyValues(const KeyValues& kv, RunConfig base = {});
// TOML text that RunConfigFromKeyValues reads back to the same config.
std::string FormatRunConfig(const RunConfig& config);

enum class GoalBehavior { kParallel, kConverging };

struct SynthSpec {
  int n_groups = 4;
  int group_size_min = 2;
  int group_size_max = 4;
  int n_singletons = 6;
  double spacing = 0.6;    // m between neighbouring group members
  double extent = 30.0;    // m, side of the square scene
  double duration = 200.0; // s
  double fps = 2.5;
  int lag = 1;             // follower delay, frames
  double noise = 0.02;     // m, positional noise std
  double speed = 1.2;      // m/s, preferred walking speed
  double turn_noise = 0.35;  // rad per sqrt(s), heading diffusion
  GoalBehavior behavior = GoalBehavior::kParallel;
  // Converging groups start this many times further apart than `spacing`.
  double dispersion = 8.0;

  void Validate() const;
};

SynthSpec SynthSpecFromKeyValues(const KeyValues& kv, SynthSpec base = {});
std::string FormatSynthSpec(const SynthSpec& spec);

struct SynthData {
  std::vector<Trajectory> trajectories;
  GroundTruthLabels labels;
  double fps = 2.5;
};

// Groups walk toward shared goals: a leader per group, followers replaying
// the leader's displacements `lag` frames later at fixed offsets. Singletons
// walk to independent random goals. Deterministic per seed.
SynthData SynthGenerate(const SynthSpec& spec, std::uint64_t seed);

Dataset ToDataset(const SynthData& data);

// Writes dataset.txt, trajectories.txt and groups.txt under `dir`.
void WriteDataset(const std::string& dir, const Dataset& dataset);

struct PreparedWindow {
  TimeWindow window;
  WindowedScene scene;
  Partition truth;  // empty when the dataset has no labels
};

// Slices the dataset and builds the scene of every window.
std::vector<PreparedWindow> PrepareWindows(const Dataset& dataset,
                                           const RunConfig& config);

struct RunResult {
  std::uint64_t seed = 0;
  Model model;
  std::vector<IterationLog> log;
  std::vector<int> train_windows;
  std::vector<int> test_windows;
  std::vector<WindowPartition> predictions;  // test windows
  std::vector<WindowScore> scores;           // test windows
  ForestScore gmitre_mean;
  PrecisionRecall pairwise_positive_mean;
};

// Trains on the windows starting within the first `training_span` seconds
// and predicts the rest, in the configured mode. Throws ConfigError when the
// dataset has no labels or either split is empty.
RunResult RunOnce(const RunConfig& config,
                  const std::vector<PreparedWindow>& windows,
                  std::uint64_t seed);

struct ExperimentSummary {
  std::vector<RunResult> runs;
  SceneStats stats;
  // Mean and sample standard deviation over runs.
  double gmitre_precision_mean = 0, gmitre_precision_std = 0;
  double gmitre_recall_mean = 0, gmitre_recall_std = 0;
  double gmitre_f1_mean = 0, gmitre_f1_std = 0;
  double pw_precision_mean = 0, pw_precision_std = 0;
  double pw_recall_mean = 0, pw_recall_std = 0;
};

// `config.runs` seeded runs (seed, seed + 1, ...). When `out_dir` is not
// empty, writes `<out>/run-<seed>/` reports and `<out>/summary.csv`.
ExperimentSummary RunExperiment(const RunConfig& config, const Dataset& dataset,
                                const std::string& out_dir = "");

// Rows of the learned-weight table. With alpha = w[0:4] and beta = -w[4:8]
// the affinity splits into the constant sum(alpha) and, per feature, the
// coefficient -(alpha_k + beta_k) of d_k. `share` is each term's fraction of
// the total absolute value; the signs of alpha and beta are reported as
// learned.
std::string WeightsCsv(const JointVector& w);

// Per window: bounds, member / dropped counts and feature fallbacks.
std::string WindowsCsv(const std::vector<PreparedWindow>& windows);

std::string SceneStatsCsv(const SceneStats& stats);

}  // namespace crowdgroups

#endif  // CROWDGROUPS_HARNESS_H_
