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

#include "crowdgroups/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "crowdgroups/errors.h"

namespace crowdgroups {
namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<double> ParseNumberList(const std::string& key, const std::string& text) {
  std::string s = text;
  std::erase_if(s, [](char c) { return c == '[' || c == ']'; });
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (end == item.c_str() || *end != '\0') {
      throw ConfigError("'" + key + "' is not a list of numbers: " + text);
    }
    out.push_back(v);
  }
  return out;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void RejectUnknownKeys(const KeyValues& kv, const std::set<std::string>& known,
                       const std::string& what) {
  for (const auto& [key, value] : kv.entries()) {
    if (!known.count(key)) throw ConfigError("unknown " + what + " key '" + key + "'");
  }
}

}  // namespace

void RunConfig::Validate() const {
  if (!(window_len > 0) || !(stride > 0) || !(training_span > 0)) {
    throw ConfigError("window_len, stride and training_span must be positive");
  }
  if (!(C > 0)) throw ConfigError("C must be positive");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (max_iterations < 0 || sequential_budget < 0 || online_budget < 0 || objective_every < 0) {
    throw ConfigError("iteration counts must be non-negative");
  }
  features.Validate();
}

RunConfig RunConfigFromKeyValues(const KeyValues& kv, RunConfig c) {
  RejectUnknownKeys(kv,
                    {"window_len", "stride", "training_span", "C", "loss", "mode", "seed", "runs",
                     "max_iterations", "sequential_budget", "online_budget", "objective_every",
                     "features.proxemic_sigmas", "features.granger_lag",
                     "features.heatmap_cell_edge", "features.heatmap_k_s",
                     "features.heatmap_k_r", "features.heatmap_energy", "features.dtw_tau",
                     "features.granger_fallback", "features.no_overlap_distance"},
                    "run config");
  if (auto v = kv.GetDouble("window_len")) c.window_len = *v;
  if (auto v = kv.GetDouble("stride")) c.stride = *v;
  if (auto v = kv.GetDouble("training_span")) c.training_span = *v;
  if (auto v = kv.GetDouble("C")) c.C = *v;
  if (auto v = kv.Get("loss")) c.loss = ParseLossKind(*v);
  if (auto v = kv.Get("mode")) c.mode = ParseTrainingMode(*v);
  if (auto v = kv.GetInt("seed")) {
    if (*v < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = kv.GetInt("runs")) c.runs = static_cast<int>(*v);
  if (auto v = kv.GetInt("max_iterations")) c.max_iterations = static_cast<int>(*v);
  if (auto v = kv.GetInt("sequential_budget")) c.sequential_budget = static_cast<int>(*v);
  if (auto v = kv.GetInt("online_budget")) c.online_budget = static_cast<int>(*v);
  if (auto v = kv.GetInt("objective_every")) c.objective_every = static_cast<int>(*v);

  auto& f = c.features;
  if (auto v = kv.Get("features.proxemic_sigmas")) {
    const auto sigmas = ParseNumberList("features.proxemic_sigmas", *v);
    if (sigmas.size() != 4) throw ConfigError("features.proxemic_sigmas needs four values");
    std::copy(sigmas.begin(), sigmas.end(), f.proxemics.sigmas.begin());
  }
  if (auto v = kv.GetInt("features.granger_lag")) f.granger.lag = static_cast<int>(*v);
  if (auto v = kv.GetDouble("features.heatmap_cell_edge")) f.heatmap.cell_edge = *v;
  if (auto v = kv.GetDouble("features.heatmap_k_s")) f.heatmap.k_s = *v;
  if (auto v = kv.GetDouble("features.heatmap_k_r")) f.heatmap.k_r = *v;
  if (auto v = kv.Get("features.heatmap_energy")) {
    if (*v == "binary") {
      f.heatmap.energy = HeatEnergy::kBinary;
    } else if (*v == "visit_count") {
      f.heatmap.energy = HeatEnergy::kVisitCount;
    } else {
      throw ConfigError("features.heatmap_energy must be binary or visit_count");
    }
  }
  if (auto v = kv.GetDouble("features.dtw_tau")) f.dtw_tau = *v;
  if (auto v = kv.GetDouble("features.granger_fallback")) f.granger_fallback = *v;
  if (auto v = kv.GetDouble("features.no_overlap_distance")) f.no_overlap_distance = *v;
  c.Validate();
  return c;
}

std::string FormatRunConfig(const RunConfig& c) {
  const auto& f = c.features;
  std::string out;
  out += "window_len = " + Num(c.window_len) + "\n";
  out += "stride = " + Num(c.stride) + "\n";
  out += "training_span = " + Num(c.training_span) + "\n";
  out += "C = " + Num(c.C) + "\n";
  out += "loss = \"" + std::string(ToString(c.loss)) + "\"\n";
  out += "mode = \"" + std::string(ToString(c.mode)) + "\"\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "runs = " + std::to_string(c.runs) + "\n";
  out += "max_iterations = " + std::to_string(c.max_iterations) + "\n";
  out += "sequential_budget = " + std::to_string(c.sequential_budget) + "\n";
  out += "online_budget = " + std::to_string(c.online_budget) + "\n";
  out += "objective_every = " + std::to_string(c.objective_every) + "\n";
  out += "\n[features]\n";
  out += "proxemic_sigmas = \"" + Num(f.proxemics.sigmas[0]) + ", " + Num(f.proxemics.sigmas[1]) +
         ", " + Num(f.proxemics.sigmas[2]) + ", " + Num(f.proxemics.sigmas[3]) + "\"\n";
  out += "granger_lag = " + std::to_string(f.granger.lag) + "\n";
  out += "heatmap_cell_edge = " + Num(f.heatmap.cell_edge) + "\n";
  out += "heatmap_k_s = " + Num(f.heatmap.k_s) + "\n";
  out += "heatmap_k_r = " + Num(f.heatmap.k_r) + "\n";
  out += std::string("heatmap_energy = \"") +
         (f.heatmap.energy == HeatEnergy::kBinary ? "binary" : "visit_count") + "\"\n";
  out += "dtw_tau = " + Num(f.dtw_tau) + "\n";
  out += "granger_fallback = " + Num(f.granger_fallback) + "\n";
  out += "no_overlap_distance = " + Num(f.no_overlap_distance) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic crowds

void SynthSpec::Validate() const {
  if (n_groups < 0 || n_singletons < 0) throw ConfigError("counts must be non-negative");
  if (group_size_min < 2 || group_size_max < group_size_min) {
    throw ConfigError("group sizes need 2 <= group_size_min <= group_size_max");
  }
  if (!(spacing > 0)) throw ConfigError("spacing must be positive");
  if (lag < 0) throw ConfigError("lag must be non-negative");
  if (!(extent > 0) || !(duration > 0) || !(fps > 0) || !(speed > 0)) {
    throw ConfigError("extent, duration, fps and speed must be positive");
  }
  if (!(noise >= 0) || !(turn_noise >= 0)) throw ConfigError("noise levels must be non-negative");
  if (!(dispersion >= 1)) throw ConfigError("dispersion must be at least 1");
}

SynthSpec SynthSpecFromKeyValues(const KeyValues& kv, SynthSpec s) {
  RejectUnknownKeys(kv,
                    {"n_groups", "group_size_min", "group_size_max", "n_singletons", "spacing",
                     "extent", "duration", "fps", "lag", "noise", "speed", "turn_noise",
                     "behavior", "dispersion"},
                    "synthetic spec");
  if (auto v = kv.GetInt("n_groups")) s.n_groups = static_cast<int>(*v);
  if (auto v = kv.GetInt("group_size_min")) s.group_size_min = static_cast<int>(*v);
  if (auto v = kv.GetInt("group_size_max")) s.group_size_max = static_cast<int>(*v);
  if (auto v = kv.GetInt("n_singletons")) s.n_singletons = static_cast<int>(*v);
  if (auto v = kv.GetDouble("spacing")) s.spacing = *v;
  if (auto v = kv.GetDouble("extent")) s.extent = *v;
  if (auto v = kv.GetDouble("duration")) s.duration = *v;
  if (auto v = kv.GetDouble("fps")) s.fps = *v;
  if (auto v = kv.GetInt("lag")) s.lag = static_cast<int>(*v);
  if (auto v = kv.GetDouble("noise")) s.noise = *v;
  if (auto v = kv.GetDouble("speed")) s.speed = *v;
  if (auto v = kv.GetDouble("turn_noise")) s.turn_noise = *v;
  if (auto v = kv.Get("behavior")) {
    if (*v == "parallel") {
      s.behavior = GoalBehavior::kParallel;
    } else if (*v == "converging") {
      s.behavior = GoalBehavior::kConverging;
    } else {
      throw ConfigError("behavior must be parallel or converging");
    }
  }
  if (auto v = kv.GetDouble("dispersion")) s.dispersion = *v;
  s.Validate();
  return s;
}

std::string FormatSynthSpec(const SynthSpec& s) {
  std::string out;
  out += "n_groups = " + std::to_string(s.n_groups) + "\n";
  out += "group_size_min = " + std::to_string(s.group_size_min) + "\n";
  out += "group_size_max = " + std::to_string(s.group_size_max) + "\n";
  out += "n_singletons = " + std::to_string(s.n_singletons) + "\n";
  out += "spacing = " + Num(s.spacing) + "\n";
  out += "extent = " + Num(s.extent) + "\n";
  out += "duration = " + Num(s.duration) + "\n";
  out += "fps = " + Num(s.fps) + "\n";
  out += "lag = " + std::to_string(s.lag) + "\n";
  out += "noise = " + Num(s.noise) + "\n";
  out += "speed = " + Num(s.speed) + "\n";
  out += "turn_noise = " + Num(s.turn_noise) + "\n";
  out += std::string("behavior = \"") +
         (s.behavior == GoalBehavior::kParallel ? "parallel" : "converging") + "\"\n";
  out += "dispersion = " + Num(s.dispersion) + "\n";
  return out;
}

namespace {

// Noisy heading-controlled walk between uniformly drawn goals.
std::vector<Point2> GoalWalk(const SynthSpec& spec, int frames, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, spec.extent);
  std::uniform_real_distribution<double> speed_factor(0.85, 1.15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dt = 1.0 / spec.fps;
  const double speed = spec.speed * speed_factor(rng);

  Point2 p{coord(rng), coord(rng)};
  Point2 goal{coord(rng), coord(rng)};
  double heading = std::atan2(goal.y - p.y, goal.x - p.x);
  std::vector<Point2> path;
  path.reserve(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    path.push_back(p);
    if (Norm(goal - p) < 1.0) goal = {coord(rng), coord(rng)};
    const double target = std::atan2(goal.y - p.y, goal.x - p.x);
    const double error = std::remainder(target - heading, 2.0 * std::numbers::pi);
    heading += 2.0 * error * dt + spec.turn_noise * std::sqrt(dt) * gauss(rng);
    p = p + Point2{speed * dt * std::cos(heading), speed * dt * std::sin(heading)};
  }
  return path;
}

}  // namespace

SynthData SynthGenerate(const SynthSpec& spec, std::uint64_t seed) {
  spec.Validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> size_dist(spec.group_size_min, spec.group_size_max);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const int frames = std::max(1, static_cast<int>(std::llround(spec.duration * spec.fps)));
  const double converge_time = spec.duration / 2.0;

  SynthData data;
  data.fps = spec.fps;
  std::vector<std::vector<PedestrianId>> groups;
  PedestrianId next_id = 1;

  auto emit = [&](const std::vector<Point2>& path, PedestrianId id) {
    std::vector<Sample> samples;
    samples.reserve(path.size());
    for (std::size_t f = 0; f < path.size(); ++f) {
      Point2 p = path[f];
      if (spec.noise > 0) p = p + Point2{spec.noise * gauss(rng), spec.noise * gauss(rng)};
      samples.push_back({static_cast<double>(f) / spec.fps, p});
    }
    data.trajectories.emplace_back(id, std::move(samples));
  };

  for (int g = 0; g < spec.n_groups; ++g) {
    const int size = size_dist(rng);
    const auto leader = GoalWalk(spec, frames, rng);
    // Members sit on the vertices of a regular polygon with edge `spacing`;
    // the leader is vertex 0.
    const double radius = spec.spacing / (2.0 * std::sin(std::numbers::pi / size));
    const double phase = angle(rng);
    std::vector<Point2> vertex(size);
    for (int k = 0; k < size; ++k) {
      const double a = phase + 2.0 * std::numbers::pi * k / size;
      vertex[k] = {radius * std::cos(a), radius * std::sin(a)};
    }
    std::vector<PedestrianId> ids;
    for (int k = 0; k < size; ++k) {
      const PedestrianId id = next_id++;
      ids.push_back(id);
      if (k == 0) {
        emit(leader, id);
        continue;
      }
      const Point2 offset = vertex[k] - vertex[0];
      std::vector<Point2> path(static_cast<std::size_t>(frames));
      for (int f = 0; f < frames; ++f) {
        const Point2 lead = leader[static_cast<std::size_t>(std::max(0, f - spec.lag))];
        double scale = 1.0;
        if (spec.behavior == GoalBehavior::kConverging) {
          const double t = f / spec.fps;
          scale = 1.0 + (spec.dispersion - 1.0) * std::max(0.0, 1.0 - t / converge_time);
        }
        path[static_cast<std::size_t>(f)] = lead + Point2{scale * offset.x, scale * offset.y};
      }
      emit(path, id);
    }
    groups.push_back(std::move(ids));
  }
  for (int s = 0; s < spec.n_singletons; ++s) emit(GoalWalk(spec, frames, rng), next_id++);

  data.labels = GroundTruthLabels(std::move(groups));
  return data;
}

Dataset ToDataset(const SynthData& data) {
  Dataset ds;
  ds.descriptor.fps = data.fps;
  ds.trajectories = data.trajectories;
  ds.labels = data.labels;
  return ds;
}

void WriteDataset(const std::string& dir, const Dataset& dataset) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  WriteFile(root / kDescriptorFileName, FormatDatasetDescriptor(dataset.descriptor));
  WriteFile(root / dataset.descriptor.trajectories,
            FormatTrajectories(dataset.trajectories, dataset.descriptor.fps));
  if (dataset.labels) {
    WriteFile(root / dataset.descriptor.groups, FormatGroundTruth(*dataset.labels));
  }
}

// ---------------------------------------------------------------------------
// Pipeline

std::vector<PreparedWindow> PrepareWindows(const Dataset& dataset, const RunConfig& config) {
  config.Validate();
  SliceOptions slice;
  slice.window_len = config.window_len;
  slice.stride = config.stride;
  std::vector<PreparedWindow> out;
  for (auto& window : SliceWindows(dataset.trajectories, slice)) {
    PreparedWindow pw;
    pw.scene = BuildScene(window, config.features);
    if (dataset.labels) pw.truth = WindowGroundTruth(window, *dataset.labels);
    pw.window = std::move(window);
    out.push_back(std::move(pw));
  }
  return out;
}

namespace {

TrainConfig ToTrainConfig(const RunConfig& config, std::uint64_t seed) {
  TrainConfig t;
  t.C = config.C;
  t.max_iterations = config.max_iterations;
  t.seed = seed;
  t.loss = config.loss;
  t.objective_every = config.objective_every;
  return t;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

RunResult RunOnce(const RunConfig& config, const std::vector<PreparedWindow>& windows,
                  std::uint64_t seed) {
  config.Validate();
  if (windows.empty()) throw ConfigError("the dataset has no complete window");
  const double split = windows.front().window.start_t + config.training_span;
  RunResult result;
  result.seed = seed;
  std::vector<TrainingExample> train;
  std::vector<const PreparedWindow*> test;
  for (const auto& w : windows) {
    if (w.window.start_t < split - 1e-9) {
      if (w.truth.num_members() != w.window.members.size()) {
        throw ConfigError("training window " + std::to_string(w.window.index) +
                          " has no ground truth");
      }
      train.emplace_back(w.scene, w.truth);
      result.train_windows.push_back(w.window.index);
    } else {
      test.push_back(&w);
      result.test_windows.push_back(w.window.index);
    }
  }
  if (train.empty()) throw ConfigError("no window starts inside the training span");
  if (test.empty()) throw ConfigError("no window is left for testing after the training span");

  const TrainConfig tc = ToTrainConfig(config, seed);
  std::vector<Partition> predictions;
  switch (config.mode) {
    case TrainingMode::kBatch: {
      result.model = BcfwTrain(train, tc, config.features, &result.log);
      for (const auto* w : test) predictions.push_back(Predict(w->scene, result.model));
      break;
    }
    case TrainingMode::kSequential: {
      // Prequential: each test window is predicted before its label joins
      // the training stream.
      BcfwTrainer trainer(tc, config.features);
      for (auto& e : train) {
        trainer.AddExample(std::move(e));
        trainer.Run(config.sequential_budget, &result.log);
      }
      for (const auto* w : test) {
        predictions.push_back(Predict(w->scene, trainer.model()));
        if (w->truth.num_members() == w->window.members.size()) {
          trainer.AddExample(TrainingExample(w->scene, w->truth));
          trainer.Run(config.sequential_budget, &result.log);
        }
      }
      result.model = trainer.model();
      result.model.mode = TrainingMode::kSequential;
      break;
    }
    case TrainingMode::kOnline: {
      const Model init = BcfwTrain(train, tc, config.features, &result.log);
      std::vector<WindowedScene> stream;
      for (const auto* w : test) stream.push_back(w->scene);
      auto steps = OnlinePredictTrain(stream, init, tc, config.online_budget);
      for (auto& s : steps) predictions.push_back(std::move(s.prediction));
      result.model = steps.empty() ? init : steps.back().model;
      result.model.mode = TrainingMode::kOnline;
      break;
    }
  }
  result.model.seed = seed;

  std::vector<double> gp, gr, gf, pp, pr;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const auto& w = *test[k];
    result.predictions.push_back({w.window.index, predictions[k]});
    if (w.truth.num_members() != w.window.members.size()) continue;
    if (w.window.members.empty()) continue;
    const WindowScore s = ScoreWindow(w.window.index, w.truth, predictions[k]);
    result.scores.push_back(s);
    gp.push_back(s.gmitre.precision);
    gr.push_back(s.gmitre.recall);
    gf.push_back(s.gmitre.f1);
    pp.push_back(s.pairwise_positive.precision);
    pr.push_back(s.pairwise_positive.recall);
  }
  result.gmitre_mean = {Mean(gr), Mean(gp), Mean(gf)};
  result.pairwise_positive_mean = {Mean(pp), Mean(pr)};
  return result;
}

std::string WeightsCsv(const JointVector& w) {
  static constexpr const char* kNames[kNumFeatures] = {"d_ph", "d_sh", "d_ca", "d_he"};
  // W = sum(alpha) - sum_k (alpha_k + beta_k) d_k with alpha = w[0:4] and
  // beta = -w[4:8].
  double constant = 0.0;
  std::array<double, kNumFeatures> alpha{}, beta{}, coef{};
  for (int k = 0; k < kNumFeatures; ++k) {
    alpha[k] = w[k];
    beta[k] = -w[kNumFeatures + k];
    constant += alpha[k];
    coef[k] = -(alpha[k] + beta[k]);
  }
  double total = std::abs(constant);
  for (double c : coef) total += std::abs(c);
  auto share = [&](double v) { return total > 0 ? std::abs(v) / total : 0.0; };
  std::string out = "term,alpha,beta,coefficient,share\n";
  out += "constant,,," + Short(constant) + "," + Short(share(constant)) + "\n";
  for (int k = 0; k < kNumFeatures; ++k) {
    out += std::string(kNames[k]) + "," + Short(alpha[k]) + "," + Short(beta[k]) + "," +
           Short(coef[k]) + "," + Short(share(coef[k])) + "\n";
  }
  return out;
}

std::string WindowsCsv(const std::vector<PreparedWindow>& windows) {
  std::string out = "window,start,end,members,dropped,no_overlap_pairs,granger_fallback_pairs\n";
  for (const auto& w : windows) {
    out += std::to_string(w.window.index) + "," + Short(w.window.start_t) + "," +
           Short(w.window.end_t) + "," + std::to_string(w.window.members.size()) + "," +
           std::to_string(w.window.dropped.size()) + "," +
           std::to_string(w.scene.no_overlap_count()) + "," +
           std::to_string(w.scene.granger_fallback_count()) + "\n";
  }
  return out;
}

std::string SceneStatsCsv(const SceneStats& stats) {
  auto opt = [](const std::optional<double>& v) { return v ? Short(*v) : std::string(); };
  return "d_in,d_out,d_io\n" + opt(stats.d_in) + "," + opt(stats.d_out) + "," +
         opt(stats.d_io) + "\n";
}

namespace {

std::string RunMetricsCsv(const RunResult& r) {
  std::string out = "seed,metric,precision,recall,f1\n";
  const auto& g = r.gmitre_mean;
  out += std::to_string(r.seed) + ",gmitre," + Short(g.precision) + "," + Short(g.recall) + "," +
         Short(g.f1) + "\n";
  const auto& p = r.pairwise_positive_mean;
  out += std::to_string(r.seed) + ",pairwise_positive," + Short(p.precision) + "," +
         Short(p.recall) + "," + Short(F1Score(p.precision, p.recall)) + "\n";
  return out;
}

std::string PerWindowCsv(const RunResult& r) {
  // EvaluationCsv rows with the run seed prepended.
  std::istringstream in(EvaluationCsv(r.scores));
  std::string line, out;
  bool header = true;
  while (std::getline(in, line)) {
    out += (header ? std::string("seed") : std::to_string(r.seed)) + "," + line + "\n";
    header = false;
  }
  return out;
}

void WriteRun(const std::filesystem::path& dir, const RunConfig& config, const RunResult& r,
              const std::vector<PreparedWindow>& windows) {
  std::filesystem::create_directories(dir);
  RunConfig resolved = config;
  resolved.seed = r.seed;
  resolved.runs = 1;
  WriteFile(dir / "config.resolved.toml", FormatRunConfig(resolved));
  WriteFile(dir / "metrics.csv", RunMetricsCsv(r));
  WriteFile(dir / "weights.csv", WeightsCsv(r.model.w));
  WriteFile(dir / "per_window.csv", PerWindowCsv(r));
  WriteFile(dir / "model.json", ModelToJson(r.model));
  WriteFile(dir / "train_log.csv", TrainingLogCsv(r.log));
  WriteFile(dir / "predictions.json", PartitionsToJson(r.predictions));
  WriteFile(dir / "windows.csv", WindowsCsv(windows));
}

}  // namespace

ExperimentSummary RunExperiment(const RunConfig& config, const Dataset& dataset,
                                const std::string& out_dir) {
  config.Validate();
  if (!dataset.labels) throw ConfigError("the dataset has no ground-truth groups");
  const auto windows = PrepareWindows(dataset, config);

  ExperimentSummary summary;
  std::vector<TimeWindow> plain;
  for (const auto& w : windows) plain.push_back(w.window);
  summary.stats = ComputeSceneStats(plain, *dataset.labels);

  std::vector<double> gp, gr, gf, pp, pr;
  for (int k = 0; k < config.runs; ++k) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(k);
    RunResult r = RunOnce(config, windows, seed);
    gp.push_back(r.gmitre_mean.precision);
    gr.push_back(r.gmitre_mean.recall);
    gf.push_back(r.gmitre_mean.f1);
    pp.push_back(r.pairwise_positive_mean.precision);
    pr.push_back(r.pairwise_positive_mean.recall);
    if (!out_dir.empty()) {
      WriteRun(std::filesystem::path(out_dir) / ("run-" + std::to_string(seed)), config, r,
               windows);
    }
    summary.runs.push_back(std::move(r));
  }
  summary.gmitre_precision_mean = Mean(gp);
  summary.gmitre_precision_std = SampleStd(gp);
  summary.gmitre_recall_mean = Mean(gr);
  summary.gmitre_recall_std = SampleStd(gr);
  summary.gmitre_f1_mean = Mean(gf);
  summary.gmitre_f1_std = SampleStd(gf);
  summary.pw_precision_mean = Mean(pp);
  summary.pw_precision_std = SampleStd(pp);
  summary.pw_recall_mean = Mean(pr);
  summary.pw_recall_std = SampleStd(pr);

  if (!out_dir.empty()) {
    const std::filesystem::path root(out_dir);
    std::string csv = "metric,mean,std,runs,seed\n";
    const std::string tail =
        "," + std::to_string(config.runs) + "," + std::to_string(config.seed) + "\n";
    auto row = [&](const char* name, double mean, double sd) {
      csv += std::string(name) + "," + Short(mean) + "," + Short(sd) + tail;
    };
    row("gmitre_precision", summary.gmitre_precision_mean, summary.gmitre_precision_std);
    row("gmitre_recall", summary.gmitre_recall_mean, summary.gmitre_recall_std);
    row("gmitre_f1", summary.gmitre_f1_mean, summary.gmitre_f1_std);
    row("pairwise_positive_precision", summary.pw_precision_mean, summary.pw_precision_std);
    row("pairwise_positive_recall", summary.pw_recall_mean, summary.pw_recall_std);
    WriteFile(root / "summary.csv", csv);
    WriteFile(root / "scene_stats.csv", SceneStatsCsv(summary.stats));
    WriteFile(root / "config.resolved.toml", FormatRunConfig(config));
  }
  return summary;
}

}  // namespace crowdgroups
