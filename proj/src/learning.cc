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

#include "crowdgroups/learning.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "crowdgroups/errors.h"

namespace crowdgroups {

TrainingExample::TrainingExample(WindowedScene scene_in, Partition truth_in)
    : scene(std::move(scene_in)), truth(std::move(truth_in)) {
  if (truth.members() != scene.members()) {
    throw ContractError("training label does not cover the window members");
  }
}

JointVector JointFeatureMap(const WindowedScene& scene, const Partition& p) {
  const auto labels = p.Labels(scene.members());
  JointVector psi{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] != labels[j]) continue;
      const auto& x = scene.augmented(i, j);
      for (int k = 0; k < kJointDim; ++k) psi[k] += x[k];
    }
  }
  return psi;
}

double Compatibility(const WindowedScene& scene, const Partition& p, const JointVector& w) {
  return Dot(w, JointFeatureMap(scene, p));
}

double HingeValue(const TrainingExample& example, const Partition& y, const JointVector& w,
                  LossKind loss) {
  return StructuredLoss(loss, example.truth, y) + Compatibility(example.scene, y, w) -
         Compatibility(example.scene, example.truth, w);
}

OracleResult LossAugmentedOracle(const TrainingExample& example, const JointVector& w,
                                 LossKind loss) {
  const auto& members = example.scene.members();
  const std::size_t n = members.size();
  const auto truth_labels = example.truth.Labels(members);
  const AffinityMatrix affinity = Affinity(example.scene, w);
  Eigen::MatrixXd between = affinity.entries();

  // Cluster slots as in the greedy clusterer: slot k starts as member k and
  // a merge folds the larger slot into the smaller.
  std::vector<int> labels(n);
  for (std::size_t k = 0; k < n; ++k) labels[k] = static_cast<int>(k);
  std::vector<bool> active(n, true);
  const double truth_score = PartitionScore(example.truth, affinity);
  double score = 0.0;
  double h = StructuredLoss(loss, truth_labels, labels) - truth_score;

  std::vector<int> candidate(n);
  while (true) {
    double best_h = -std::numeric_limits<double>::infinity();
    std::size_t best_i = n, best_j = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        candidate = labels;
        for (int& c : candidate) {
          if (c == static_cast<int>(j)) c = static_cast<int>(i);
        }
        const double gain = between(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const double hc = StructuredLoss(loss, truth_labels, candidate) + score + gain - truth_score;
        if (hc > best_h) {
          best_h = hc;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i == n || !(best_h > h)) break;
    const auto bi = static_cast<Eigen::Index>(best_i);
    const auto bj = static_cast<Eigen::Index>(best_j);
    score += between(bi, bj);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == best_i || k == best_j) continue;
      const auto kk = static_cast<Eigen::Index>(k);
      between(bi, kk) += between(bj, kk);
      between(kk, bi) = between(bi, kk);
    }
    for (int& c : labels) {
      if (c == static_cast<int>(best_j)) c = static_cast<int>(best_i);
    }
    active[best_j] = false;
    h = best_h;
  }

  std::vector<Partition::Cluster> clusters(n);
  for (std::size_t k = 0; k < n; ++k) clusters[labels[k]].push_back(members[k]);
  std::erase_if(clusters, [](const auto& c) { return c.empty(); });
  Partition y(std::move(clusters));

  OracleResult result;
  result.loss = StructuredLoss(loss, example.truth, y);
  result.hinge = result.loss + Compatibility(example.scene, y, w) -
                 Compatibility(example.scene, example.truth, w);
  if (result.hinge < 0.0) {
    result.label = example.truth;
    result.hinge = 0.0;
    result.loss = 0.0;
  } else {
    result.label = std::move(y);
  }
  return result;
}

std::string_view ToString(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::kBatch: return "batch";
    case TrainingMode::kSequential: return "sequential";
    case TrainingMode::kOnline: return "online";
  }
  return "unknown";
}

TrainingMode ParseTrainingMode(std::string_view name) {
  if (name == "batch") return TrainingMode::kBatch;
  if (name == "sequential") return TrainingMode::kSequential;
  if (name == "online") return TrainingMode::kOnline;
  throw ConfigError("unknown training mode '" + std::string(name) +
                    "' (expected batch, sequential or online)");
}

void TrainConfig::Validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("C must be positive");
  if (max_iterations < 0) throw ConfigError("max_iterations must be non-negative");
  if (early_stop && (early_stop_window < 1 || !(early_stop_tol >= 0.0))) {
    throw ConfigError("early stop needs a positive window and a non-negative tolerance");
  }
  if (objective_every < 0) throw ConfigError("objective_every must be non-negative");
}

double BcfwStepSize(const BlockState& block, const BlockState& candidate, const JointVector& w) {
  double num = candidate.l - block.l;
  double den = 0.0;
  for (int k = 0; k < kJointDim; ++k) {
    const double d = block.w[k] - candidate.w[k];
    num += d * w[k];
    den += d * d;
  }
  if (den <= 0.0) return 0.0;
  return std::clamp(num / den, 0.0, 1.0);
}

double DualObjective(const Model& model) { return model.l - 0.5 * SquaredNorm(model.w); }

double PrimalObjective(const std::vector<TrainingExample>& examples, const Model& model) {
  double hinge = 0.0;
  for (const auto& e : examples) hinge += LossAugmentedOracle(e, model.w, model.loss).hinge;
  const double scale = examples.empty() ? 0.0 : model.C / static_cast<double>(examples.size());
  return 0.5 * SquaredNorm(model.w) + scale * hinge;
}

BcfwTrainer::BcfwTrainer(const TrainConfig& config, const FeatureConfig& features)
    : config_(config), rng_(config.seed) {
  config_.Validate();
  model_.C = config.C;
  model_.seed = config.seed;
  model_.loss = config.loss;
  model_.features = features;
}

BcfwTrainer::BcfwTrainer(const TrainConfig& config, const Model& init)
    : BcfwTrainer(config, init.features) {
  model_.w = init.w;
  model_.l = init.l;
  model_.iterations = init.iterations;
}

void BcfwTrainer::AddExample(TrainingExample example) {
  const double n = static_cast<double>(examples_.size());
  const double shrink = n / (n + 1.0);
  for (auto& b : model_.blocks) {
    for (double& v : b.w) v *= shrink;
    b.l *= shrink;
  }
  for (double& v : model_.w) v *= shrink;
  model_.l *= shrink;
  examples_.push_back(std::move(example));
  model_.blocks.push_back({});
}

void BcfwTrainer::ResetToSingleExample(TrainingExample example) {
  examples_.clear();
  examples_.push_back(std::move(example));
  model_.blocks.assign(1, BlockState{model_.w, model_.l});
}

IterationLog BcfwTrainer::Step() {
  if (examples_.empty()) throw ConfigError("training needs at least one example");
  const std::size_t n = examples_.size();
  const std::size_t i = static_cast<std::size_t>(rng_() % n);
  const auto& example = examples_[i];

  const OracleResult oracle = LossAugmentedOracle(example, model_.w, config_.loss);
  const double scale = config_.C / static_cast<double>(n);
  const JointVector psi_truth = JointFeatureMap(example.scene, example.truth);
  const JointVector psi_star = JointFeatureMap(example.scene, oracle.label);
  BlockState target;
  for (int k = 0; k < kJointDim; ++k) target.w[k] = scale * (psi_truth[k] - psi_star[k]);
  target.l = scale * oracle.loss;

  BlockState& block = model_.blocks[i];
  const double gamma = BcfwStepSize(block, target, model_.w);
  if (gamma > 0.0) {
    const BlockState old = block;
    for (int k = 0; k < kJointDim; ++k) {
      block.w[k] = (1.0 - gamma) * old.w[k] + gamma * target.w[k];
      model_.w[k] += block.w[k] - old.w[k];
    }
    block.l = (1.0 - gamma) * old.l + gamma * target.l;
    model_.l += block.l - old.l;
  }
  ++model_.iterations;
  return {model_.iterations, static_cast<int>(i), oracle.hinge, gamma, std::nullopt};
}

void BcfwTrainer::Run(int iterations, std::vector<IterationLog>* log) {
  double best = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  for (int it = 0; it < iterations; ++it) {
    IterationLog entry = Step();
    const bool sample = config_.objective_every > 0 && entry.iteration % config_.objective_every == 0;
    if (config_.early_stop || sample) {
      const double objective = PrimalObjective(examples_, model_);
      if (sample) entry.objective = objective;
      if (config_.early_stop) {
        if (objective < best - config_.early_stop_tol) {
          best = objective;
          since_improvement = 0;
        } else if (++since_improvement >= config_.early_stop_window) {
          if (log) log->push_back(entry);
          return;
        }
      }
    }
    if (log) log->push_back(entry);
  }
}

Model BcfwTrain(const std::vector<TrainingExample>& examples, const TrainConfig& config,
                const FeatureConfig& features, std::vector<IterationLog>* log) {
  if (examples.empty()) throw ConfigError("training needs at least one example");
  BcfwTrainer trainer(config, features);
  for (const auto& e : examples) trainer.AddExample(e);
  trainer.Run(config.max_iterations, log);
  return trainer.model();
}

std::vector<Model> SequentialTrain(const std::vector<TrainingExample>& stream,
                                   const TrainConfig& config, int budget,
                                   const FeatureConfig& features) {
  BcfwTrainer trainer(config, features);
  std::vector<Model> snapshots;
  for (const auto& e : stream) {
    trainer.AddExample(e);
    trainer.Run(budget);
    Model m = trainer.model();
    m.mode = TrainingMode::kSequential;
    snapshots.push_back(std::move(m));
  }
  return snapshots;
}

std::vector<OnlineStep> OnlinePredictTrain(const std::vector<WindowedScene>& stream,
                                           const Model& init, const TrainConfig& config,
                                           int budget) {
  TrainConfig cfg = config;
  cfg.early_stop = false;
  cfg.objective_every = 0;
  BcfwTrainer trainer(cfg, init);
  std::vector<OnlineStep> out;
  for (const auto& scene : stream) {
    Partition prediction = Predict(scene, trainer.model().w);
    trainer.ResetToSingleExample(TrainingExample(scene, prediction));
    trainer.Run(budget);
    Model m = trainer.model();
    m.mode = TrainingMode::kOnline;
    out.push_back({std::move(prediction), std::move(m)});
  }
  return out;
}

Partition Predict(const WindowedScene& scene, const JointVector& w) {
  return GreedyCorrelationClustering(Affinity(scene, w)).partition;
}

Partition Predict(const WindowedScene& scene, const Model& model) {
  return Predict(scene, model.w);
}

namespace {

using nlohmann::json;

json VectorJson(const JointVector& v) { return json(std::vector<double>(v.begin(), v.end())); }

JointVector VectorFromJson(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != kJointDim) throw ContractError("weight vector must have 8 entries");
  JointVector out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

json FeaturesJson(const FeatureConfig& f) {
  return {
      {"proxemic_sigmas", std::vector<double>(f.proxemics.sigmas.begin(),
                                              f.proxemics.sigmas.end())},
      {"granger_lag", f.granger.lag},
      {"heatmap_cell_edge", f.heatmap.cell_edge},
      {"heatmap_k_s", f.heatmap.k_s},
      {"heatmap_k_r", f.heatmap.k_r},
      {"heatmap_energy", f.heatmap.energy == HeatEnergy::kBinary ? "binary" : "visit_count"},
      {"dtw_tau", f.dtw_tau},
      {"granger_fallback", f.granger_fallback},
      {"no_overlap_distance", f.no_overlap_distance},
  };
}

FeatureConfig FeaturesFromJson(const json& j) {
  FeatureConfig f;
  const auto sigmas = j.at("proxemic_sigmas").get<std::vector<double>>();
  if (sigmas.size() != 4) throw ContractError("expected four proxemic sigmas");
  std::copy(sigmas.begin(), sigmas.end(), f.proxemics.sigmas.begin());
  f.granger.lag = j.at("granger_lag").get<int>();
  f.heatmap.cell_edge = j.at("heatmap_cell_edge").get<double>();
  f.heatmap.k_s = j.at("heatmap_k_s").get<double>();
  f.heatmap.k_r = j.at("heatmap_k_r").get<double>();
  const auto energy = j.at("heatmap_energy").get<std::string>();
  if (energy == "binary") {
    f.heatmap.energy = HeatEnergy::kBinary;
  } else if (energy == "visit_count") {
    f.heatmap.energy = HeatEnergy::kVisitCount;
  } else {
    throw ContractError("unknown heat-map energy '" + energy + "'");
  }
  f.dtw_tau = j.at("dtw_tau").get<double>();
  f.granger_fallback = j.at("granger_fallback").get<double>();
  f.no_overlap_distance = j.at("no_overlap_distance").get<double>();
  return f;
}

}  // namespace

std::string ModelToJson(const Model& model) {
  json blocks = json::array();
  for (const auto& b : model.blocks) blocks.push_back({{"w", VectorJson(b.w)}, {"l", b.l}});
  json j = {
      {"format_version", Model::kFormatVersion},
      {"w", VectorJson(model.w)},
      {"l", model.l},
      {"C", model.C},
      {"seed", model.seed},
      {"iterations", model.iterations},
      {"mode", std::string(ToString(model.mode))},
      {"loss", std::string(ToString(model.loss))},
      {"features", FeaturesJson(model.features)},
      {"blocks", blocks},
  };
  return j.dump(2) + "\n";
}

Model ModelFromJson(const std::string& text, const std::string& source) {
  try {
    const json j = json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != Model::kFormatVersion) {
      throw ParseError(source, 0, "unsupported model format version " + std::to_string(version));
    }
    Model m;
    m.w = VectorFromJson(j.at("w"));
    m.l = j.at("l").get<double>();
    m.C = j.at("C").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations = j.at("iterations").get<int>();
    m.mode = ParseTrainingMode(j.at("mode").get<std::string>());
    m.loss = ParseLossKind(j.at("loss").get<std::string>());
    m.features = FeaturesFromJson(j.at("features"));
    m.features.Validate();
    for (const auto& b : j.at("blocks")) {
      m.blocks.push_back({VectorFromJson(b.at("w")), b.at("l").get<double>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const ContractError& e) {
    throw ParseError(source, 0, e.what());
  } catch (const ConfigError& e) {
    throw ParseError(source, 0, e.what());
  }
}

std::string TrainingLogCsv(const std::vector<IterationLog>& log) {
  std::string out = "iter,block,hinge,gamma,objective\n";
  char line[160];
  for (const auto& e : log) {
    std::snprintf(line, sizeof line, "%d,%d,%.9g,%.9g,", e.iteration, e.block, e.hinge, e.gamma);
    out += line;
    if (e.objective) {
      std::snprintf(line, sizeof line, "%.9g", *e.objective);
      out += line;
    }
    out += '\n';
  }
  return out;
}

}  // namespace crowdgroups
