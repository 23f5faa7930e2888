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

// Structured max-margin learning of the 8 affinity weights [alpha; beta]
// with Block-Coordinate Frank-Wolfe and a greedy loss-augmented oracle.

#ifndef CROWDGROUPS_LEARNING_H_
#define CROWDGROUPS_LEARNING_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "crowdgroups/features.h"
#include "crowdgroups/losses.h"
#include "crowdgroups/partitioning.h"
#include "crowdgroups/types.h"

namespace crowdgroups {

struct TrainingExample {
  // Throws ContractError unless `truth` covers exactly the scene members.
  TrainingExample(WindowedScene scene, Partition truth);

  WindowedScene scene;
  Partition truth;
};

// Psi(x, y): sum over clusters and unordered intra-cluster pairs of the
// augmented pair vector [1 - d; d].
JointVector JointFeatureMap(const WindowedScene& scene, const Partition& p);

// w^T Psi(x, y).
double Compatibility(const WindowedScene& scene, const Partition& p,
                     const JointVector& w);

struct OracleResult {
  Partition label;     // y*
  double hinge = 0.0;  // Delta(y_i, y*) - w^T (Psi(x, y_i) - Psi(x, y*))
  double loss = 0.0;   // Delta(y_i, y*)
};

// H(y) = Delta(y_i, y) + w^T Psi(x, y) - w^T Psi(x, y_i).
double HingeValue(const TrainingExample& example, const Partition& y,
                  const JointVector& w, LossKind loss);

// Greedy ascent on H from the all-singletons partition: applies the best
// strictly improving cluster merge until none is left. The truth label
// (H = 0) is returned instead when the ascent ends below it, so the hinge is
// never negative.
OracleResult LossAugmentedOracle(const TrainingExample& example,
                                 const JointVector& w,
                                 LossKind loss = LossKind::kGMitre);

enum class TrainingMode { kBatch, kSequential, kOnline };

std::string_view ToString(TrainingMode mode);
TrainingMode ParseTrainingMode(std::string_view name);

struct TrainConfig {
  double C = 10.0;
  int max_iterations = 1000;
  std::uint64_t seed = 1;
  LossKind loss = LossKind::kGMitre;
  // Stop when the primal objective improves by less than `early_stop_tol`
  // over `early_stop_window` consecutive iterations. Costs one oracle call
  // per example per iteration.
  bool early_stop = false;
  double early_stop_tol = 1e-6;
  int early_stop_window = 50;
  // Record the primal objective every k iterations in the log (0: never).
  int objective_every = 0;

  void Validate() const;
};

struct BlockState {
  JointVector w{};
  double l = 0.0;
};

struct Model {
  static constexpr int kFormatVersion = 1;

  JointVector w{};
  double l = 0.0;
  std::vector<BlockState> blocks;
  double C = 10.0;
  std::uint64_t seed = 1;
  int iterations = 0;
  TrainingMode mode = TrainingMode::kBatch;
  LossKind loss = LossKind::kGMitre;
  FeatureConfig features;
};

struct IterationLog {
  int iteration = 0;
  int block = 0;
  double hinge = 0.0;
  double gamma = 0.0;
  std::optional<double> objective;
};

// Closed-form Frank-Wolfe step for one block, maximizing the dual
// l - ||w||^2 / 2 along the segment toward `candidate`, clipped to [0, 1].
// Returns 0 when the block already equals the candidate.
double BcfwStepSize(const BlockState& block, const BlockState& candidate,
                    const JointVector& w);

// l - ||w||^2 / 2. Never decreases under BCFW steps.
double DualObjective(const Model& model);

// ||w||^2 / 2 + (C / n) * sum_i hinge_i with the greedy oracle.
double PrimalObjective(const std::vector<TrainingExample>& examples,
                       const Model& model);

// Owns the example set, the model and the block-selection generator.
class BcfwTrainer {
 public:
  explicit BcfwTrainer(const TrainConfig& config,
                       const FeatureConfig& features = {});
  // Starts from the weights, dual value and feature snapshot of `init`,
  // with no blocks.
  BcfwTrainer(const TrainConfig& config, const Model& init);

  // Adds a block whose dual point is the truth label (w_i = 0, l_i = 0).
  // Existing blocks are rescaled by n / (n + 1) so that they keep their
  // dual weights under the new C / n scale.
  void AddExample(TrainingExample example);

  // Replaces all blocks by a single block holding the current (w, l).
  // Used by online updates that learn from one pseudo-labelled scene.
  void ResetToSingleExample(TrainingExample example);

  // One iteration: pick a block at random, call the oracle, line search.
  IterationLog Step();
  // Runs `iterations` steps (stopping early if configured). Appends to
  // `log` when given.
  void Run(int iterations, std::vector<IterationLog>* log = nullptr);

  const Model& model() const { return model_; }
  const std::vector<TrainingExample>& examples() const { return examples_; }

 private:
  TrainConfig config_;
  Model model_;
  std::vector<TrainingExample> examples_;
  std::mt19937_64 rng_;
};

// Batch training: all examples, `config.max_iterations` steps.
Model BcfwTrain(const std::vector<TrainingExample>& examples,
                const TrainConfig& config, const FeatureConfig& features = {},
                std::vector<IterationLog>* log = nullptr);

// Feeds examples one at a time in order; after each arrival runs
// `budget` steps over the examples seen so far. Returns one snapshot per
// example.
std::vector<Model> SequentialTrain(const std::vector<TrainingExample>& stream,
                                   const TrainConfig& config, int budget,
                                   const FeatureConfig& features = {});

struct OnlineStep {
  Partition prediction;
  Model model;
};

// For each scene: predict with the current weights, then run `budget` BCFW
// steps with the prediction as the (pseudo) label.
std::vector<OnlineStep> OnlinePredictTrain(
    const std::vector<WindowedScene>& stream, const Model& init,
    const TrainConfig& config, int budget = 10);

// Greedy correlation clustering on the learned affinity.
Partition Predict(const WindowedScene& scene, const JointVector& w);
Partition Predict(const WindowedScene& scene, const Model& model);

std::string ModelToJson(const Model& model);
// Throws ParseError on malformed or incompatible input.
Model ModelFromJson(const std::string& text,
                    const std::string& source = "<text>");

// `iter,block,hinge,gamma,objective`
std::string TrainingLogCsv(const std::vector<IterationLog>& log);

}  // namespace crowdgroups

#endif  // CROWDGROUPS_LEARNING_H_
