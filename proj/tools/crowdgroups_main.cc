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

// Command-line front end: features, train, predict, eval, synth, run, stats.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crowdgroups/errors.h"
#include "crowdgroups/features.h"
#include "crowdgroups/harness.h"
#include "crowdgroups/keyvalue.h"
#include "crowdgroups/learning.h"
#include "crowdgroups/losses.h"
#include "crowdgroups/partitioning.h"
#include "crowdgroups/trajectories.h"

namespace cg = crowdgroups;

namespace {

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cg::Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes to `path`, or standard output for "-".
void Emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw cg::Error("cannot write " + path);
  out << text;
}

// Run-config file plus flag overrides. Flags are collected as key-value
// text so they go through the same validation as the file.
struct ConfigFlags {
  std::string config;
  std::optional<double> window, stride, training_span, C;
  std::optional<std::string> loss, mode;
  std::optional<long long> seed, runs, max_iterations;

  void Register(CLI::App* app, bool experiment) {
    app->add_option("--config", config, "TOML-style run configuration");
    app->add_option("--window", window, "window length (s)");
    app->add_option("--stride", stride, "window stride (s)");
    if (!experiment) return;
    app->add_option("--training-span", training_span, "training span (s)");
    app->add_option("--C", C, "regularization constant");
    app->add_option("--loss", loss, "gmitre, mitre or pairwise");
    app->add_option("--mode", mode, "batch, sequential or online");
    app->add_option("--seed", seed, "seed of the first run");
    app->add_option("--runs", runs, "number of seeded runs");
    app->add_option("--max-iterations", max_iterations, "BCFW iterations");
  }

  cg::RunConfig Resolve() const {
    cg::KeyValues kv = config.empty() ? cg::KeyValues() : cg::KeyValues::Load(config);
    auto set = [&kv](const char* key, const auto& value) {
      if (!value) return;
      std::ostringstream s;
      s.precision(17);
      s << *value;
      kv.Set(key, s.str());
    };
    set("window_len", window);
    set("stride", stride);
    set("training_span", training_span);
    set("C", C);
    set("loss", loss);
    set("mode", mode);
    set("seed", seed);
    set("runs", runs);
    set("max_iterations", max_iterations);
    return cg::RunConfigFromKeyValues(kv);
  }
};

int CmdFeatures(const ConfigFlags& flags, const std::string& data, const std::string& out) {
  const auto config = flags.Resolve();
  const auto windows = cg::PrepareWindows(cg::LoadDataset(data), config);
  std::vector<cg::WindowedScene> scenes;
  for (const auto& w : windows) scenes.push_back(w.scene);
  Emit(out, cg::FeaturesCsv(scenes));
  return 0;
}

int CmdTrain(const ConfigFlags& flags, const std::string& data, const std::string& out,
             const std::string& log_path) {
  auto config = flags.Resolve();
  config.mode = cg::TrainingMode::kBatch;
  const auto dataset = cg::LoadDataset(data);
  if (!dataset.labels) throw cg::ConfigError(data + " has no ground-truth groups");
  const auto windows = cg::PrepareWindows(dataset, config);
  if (windows.empty()) throw cg::ConfigError("the dataset has no complete window");
  const double split = windows.front().window.start_t + config.training_span;
  std::vector<cg::TrainingExample> examples;
  for (const auto& w : windows) {
    if (w.window.start_t < split - 1e-9) examples.emplace_back(w.scene, w.truth);
  }
  cg::TrainConfig tc;
  tc.C = config.C;
  tc.max_iterations = config.max_iterations;
  tc.seed = config.seed;
  tc.loss = config.loss;
  tc.objective_every = config.objective_every;
  std::vector<cg::IterationLog> log;
  const cg::Model model = cg::BcfwTrain(examples, tc, config.features, &log);
  Emit(out, cg::ModelToJson(model));
  if (!log_path.empty()) Emit(log_path, cg::TrainingLogCsv(log));
  return 0;
}

int CmdPredict(const ConfigFlags& flags, const std::string& model_path, const std::string& data,
               const std::string& out) {
  const cg::Model model = cg::ModelFromJson(ReadFile(model_path), model_path);
  auto config = flags.Resolve();
  config.features = model.features;
  const auto windows = cg::PrepareWindows(cg::LoadDataset(data), config);
  std::vector<cg::WindowPartition> predictions;
  for (const auto& w : windows) {
    predictions.push_back({w.window.index, cg::Predict(w.scene, model)});
  }
  Emit(out, cg::PartitionsToJson(predictions));
  return 0;
}

int CmdEval(const std::string& truth_path, const std::string& pred_path) {
  const auto predictions = cg::ParsePartitionsJson(ReadFile(pred_path), pred_path);
  const std::string truth_text = ReadFile(truth_path);
  const auto first = truth_text.find_first_not_of(" \t\r\n");
  const bool json = first != std::string::npos &&
                    (truth_text[first] == '[' || truth_text[first] == '{');

  std::map<int, cg::Partition> truth_by_window;
  std::optional<cg::GroundTruthLabels> groups;
  if (json) {
    for (auto& wp : cg::ParsePartitionsJson(truth_text, truth_path)) {
      truth_by_window[wp.window] = std::move(wp.partition);
    }
  } else {
    groups = cg::ParseGroundTruth(truth_text, truth_path);
  }

  std::vector<cg::WindowScore> scores;
  for (const auto& p : predictions) {
    cg::Partition truth;
    if (groups) {
      cg::TimeWindow window;
      window.index = p.window;
      window.members = p.partition.members();
      truth = cg::WindowGroundTruth(window, *groups);
    } else {
      auto it = truth_by_window.find(p.window);
      if (it == truth_by_window.end()) {
        throw cg::DataError("no ground truth for window " + std::to_string(p.window));
      }
      truth = it->second;
    }
    if (truth.members() != p.partition.members()) {
      throw cg::DataError("window " + std::to_string(p.window) +
                          ": prediction and ground truth cover different pedestrians");
    }
    scores.push_back(cg::ScoreWindow(p.window, truth, p.partition));
  }
  std::cout << cg::EvaluationCsv(scores);
  return 0;
}

int CmdSynth(const std::string& spec_path, std::uint64_t seed, const std::string& out) {
  cg::SynthSpec spec;
  if (!spec_path.empty()) spec = cg::SynthSpecFromKeyValues(cg::KeyValues::Load(spec_path));
  cg::WriteDataset(out, cg::ToDataset(cg::SynthGenerate(spec, seed)));
  return 0;
}

int CmdRun(const ConfigFlags& flags, const std::string& data, const std::string& out) {
  const auto config = flags.Resolve();
  const auto summary = cg::RunExperiment(config, cg::LoadDataset(data), out);
  std::printf("G-MITRE precision %.4f +- %.4f, recall %.4f +- %.4f, f1 %.4f +- %.4f (%d runs)\n",
              summary.gmitre_precision_mean, summary.gmitre_precision_std,
              summary.gmitre_recall_mean, summary.gmitre_recall_std, summary.gmitre_f1_mean,
              summary.gmitre_f1_std, config.runs);
  std::printf("reports written to %s\n", out.c_str());
  return 0;
}

int CmdStats(const ConfigFlags& flags, const std::string& data) {
  const auto config = flags.Resolve();
  const auto dataset = cg::LoadDataset(data);
  if (!dataset.labels) throw cg::ConfigError(data + " has no ground-truth groups");
  cg::SliceOptions slice;
  slice.window_len = config.window_len;
  slice.stride = config.stride;
  const auto windows = cg::SliceWindows(dataset.trajectories, slice);
  std::cout << cg::SceneStatsCsv(cg::ComputeSceneStats(windows, *dataset.labels));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social group detection in pedestrian crowds"};
  app.require_subcommand(1);

  ConfigFlags flags;
  // Each subcommand keeps its own output path so that defaults do not leak
  // between them.
  std::string features_out, train_out, predict_out, synth_out, run_out;
  std::string data, log_path, model_path, truth_path, pred_path, spec_path;
  std::uint64_t seed = 1;

  auto* features = app.add_subcommand("features", "write the pair-feature CSV");
  flags.Register(features, false);
  features->add_option("--data", data, "dataset directory")->required();
  features->add_option("--out", features_out, "output CSV ('-' for stdout)")->default_val("-");

  auto* train = app.add_subcommand("train", "train a model on the training span");
  flags.Register(train, true);
  train->add_option("--data", data, "dataset directory")->required();
  train->add_option("--out", train_out, "model JSON")->default_val("model.json");
  train->add_option("--log", log_path, "per-iteration training log CSV");

  auto* predict = app.add_subcommand("predict", "predict the groups of every window");
  flags.Register(predict, false);
  predict->add_option("--model", model_path, "model JSON")->required();
  predict->add_option("--data", data, "dataset directory")->required();
  predict->add_option("--out", predict_out, "partitions JSON ('-' for stdout)")->default_val("-");

  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--truth", truth_path, "groups file or partitions JSON")->required();
  eval->add_option("--pred", pred_path, "partitions JSON")->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic crowd dataset");
  synth->add_option("--spec", spec_path, "synthetic spec (TOML-style)");
  synth->add_option("--seed", seed, "generator seed")->default_val(1);
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* run = app.add_subcommand("run", "train, predict and score over seeded runs");
  flags.Register(run, true);
  run->add_option("--data", data, "dataset directory")->required();
  run->add_option("--out", run_out, "report directory")->default_val("report");

  auto* stats = app.add_subcommand("stats", "compute d_in, d_out and d_i/o");
  flags.Register(stats, false);
  stats->add_option("--data", data, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*features) return CmdFeatures(flags, data, features_out);
    if (*train) return CmdTrain(flags, data, train_out, log_path);
    if (*predict) return CmdPredict(flags, model_path, data, predict_out);
    if (*eval) return CmdEval(truth_path, pred_path);
    if (*synth) return CmdSynth(spec_path, seed, synth_out);
    if (*run) return CmdRun(flags, data, run_out);
    if (*stats) return CmdStats(flags, data);
  } catch (const cg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}
