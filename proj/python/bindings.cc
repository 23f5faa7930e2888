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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "crowdgroups/errors.h"
#include "crowdgroups/features.h"
#include "crowdgroups/harness.h"
#include "crowdgroups/keyvalue.h"
#include "crowdgroups/learning.h"
#include "crowdgroups/losses.h"
#include "crowdgroups/partitioning.h"
#include "crowdgroups/stats.h"

namespace py = pybind11;
namespace cg = crowdgroups;

namespace {

using Clusters = std::vector<std::vector<cg::PedestrianId>>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

cg::Partition ToPartition(const Clusters& c) { return cg::Partition(c); }

std::vector<cg::PedestrianId> DefaultMembers(const std::optional<std::vector<cg::PedestrianId>>& m,
                                             Eigen::Index n) {
  if (m) return *m;
  std::vector<cg::PedestrianId> out;
  for (Eigen::Index k = 1; k <= n; ++k) out.push_back(k);
  return out;
}

cg::AffinityMatrix ToAffinity(const Matrix& w,
                              const std::optional<std::vector<cg::PedestrianId>>& members) {
  return cg::AffinityMatrix(DefaultMembers(members, w.rows()), w);
}

py::dict ScoreDict(const cg::ForestScore& s) {
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  return d;
}

// Python dict -> key-value store, with values rendered the way a config file
// would spell them.
cg::KeyValues ToKeyValues(const py::dict& options) {
  cg::KeyValues kv;
  for (const auto& [key, value] : options) {
    std::string text;
    if (py::isinstance<py::bool_>(value)) {
      text = value.cast<bool>() ? "true" : "false";
    } else if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
      for (const auto& item : value) {
        if (!text.empty()) text += ",";
        text += py::str(item).cast<std::string>();
      }
    } else {
      text = py::str(value).cast<std::string>();
    }
    kv.Set(py::str(key).cast<std::string>(), text);
  }
  return kv;
}

cg::WindowedScene MakeScene(std::vector<cg::PedestrianId> members, const Matrix& features) {
  if (features.cols() != cg::kNumFeatures) {
    throw cg::ContractError("pair features must have 4 columns");
  }
  std::vector<cg::FeatureVector> pairs(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (int k = 0; k < cg::kNumFeatures; ++k) pairs[r][k] = features(r, k);
  }
  return cg::WindowedScene::FromFeatures(std::move(members), pairs);
}

Matrix SceneFeatures(const cg::WindowedScene& scene) {
  Matrix m(static_cast<Eigen::Index>(scene.pairs().size()), cg::kNumFeatures);
  for (std::size_t r = 0; r < scene.pairs().size(); ++r) {
    for (int k = 0; k < cg::kNumFeatures; ++k) m(static_cast<Eigen::Index>(r), k) = scene.pairs()[r].d[k];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Social group detection: clustering, scoring, features and training.";

  py::register_exception<cg::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<cg::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<cg::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<cg::ContractError>(m, "ContractError", PyExc_ValueError);

  // Scoring.
  m.def("gmitre_score", [](const Clusters& t, const Clusters& p) {
    return ScoreDict(cg::GMitreScore(ToPartition(t), ToPartition(p)));
  }, py::arg("truth"), py::arg("pred"));
  m.def("mitre_score", [](const Clusters& t, const Clusters& p) {
    return ScoreDict(cg::MitreScore(ToPartition(t), ToPartition(p)));
  }, py::arg("truth"), py::arg("pred"));
  m.def("structured_loss", [](const std::string& kind, const Clusters& t, const Clusters& p) {
    return cg::StructuredLoss(cg::ParseLossKind(kind), ToPartition(t), ToPartition(p));
  }, py::arg("kind"), py::arg("truth"), py::arg("pred"));
  m.def("positive_pairwise_metric", [](const Clusters& t, const Clusters& p) {
    const auto pr = cg::PositivePairwiseMetric(ToPartition(t), ToPartition(p));
    return std::make_pair(pr.precision, pr.recall);
  }, py::arg("truth"), py::arg("pred"));

  // Correlation clustering.
  m.def("greedy_cc", [](const Matrix& w, std::optional<std::vector<cg::PedestrianId>> members) {
    const auto r = cg::GreedyCorrelationClustering(ToAffinity(w, members));
    py::list trace;
    for (const auto& mg : r.trace) trace.append(py::make_tuple(mg.left, mg.right, mg.delta));
    return py::make_tuple(r.partition.clusters(), trace);
  }, py::arg("w"), py::arg("members") = py::none(),
        "Greedy agglomerative clustering; returns (clusters, merges).");
  m.def("exhaustive_cc", [](const Matrix& w, std::optional<std::vector<cg::PedestrianId>> members) {
    return cg::ExhaustiveCorrelationClustering(ToAffinity(w, members)).clusters();
  }, py::arg("w"), py::arg("members") = py::none());
  m.def("partition_score", [](const Clusters& p, const Matrix& w,
                              std::optional<std::vector<cg::PedestrianId>> members) {
    return cg::PartitionScore(ToPartition(p), ToAffinity(w, members));
  }, py::arg("clusters"), py::arg("w"), py::arg("members") = py::none());

  // Features and statistics.
  m.def("gmm_eval", [](double dx, double dy) { return cg::GmmEval({dx, dy}); });
  m.def("dtw_raw_cost", [](const Matrix& a, const Matrix& b) {
    auto pts = [](const Matrix& x) {
      if (x.cols() != 2) throw cg::ContractError("points must be an (n, 2) array");
      std::vector<cg::Point2> out;
      for (Eigen::Index r = 0; r < x.rows(); ++r) out.push_back({x(r, 0), x(r, 1)});
      return out;
    };
    return cg::DtwRawCost(pts(a), pts(b));
  });
  m.def("f_cdf", &cg::FisherSnedecorCdf, py::arg("s"), py::arg("d1"), py::arg("d2"));

  py::class_<cg::WindowedScene>(m, "Scene")
      .def(py::init(&MakeScene), py::arg("members"), py::arg("features"),
           "Scene from sorted member ids and one row (d_ph, d_sh, d_ca, d_he) per pair, in "
           "upper-triangular order.")
      .def_property_readonly("members", &cg::WindowedScene::members)
      .def_property_readonly("features", &SceneFeatures)
      .def_property_readonly("window", [](const cg::WindowedScene& s) { return s.window().index; });

  // Learning.
  py::class_<cg::Model>(m, "Model")
      .def_property_readonly("w", [](const cg::Model& model) {
        return std::vector<double>(model.w.begin(), model.w.end());
      })
      .def_readonly("iterations", &cg::Model::iterations)
      .def("to_json", &cg::ModelToJson)
      .def_static("from_json", [](const std::string& text) { return cg::ModelFromJson(text); });

  m.def("train", [](const std::vector<cg::WindowedScene>& scenes, const std::vector<Clusters>& truths,
                    double C, int max_iterations, std::uint64_t seed, const std::string& loss) {
    if (scenes.size() != truths.size()) throw cg::ContractError("one truth per scene is required");
    std::vector<cg::TrainingExample> examples;
    for (std::size_t k = 0; k < scenes.size(); ++k) examples.emplace_back(scenes[k], ToPartition(truths[k]));
    cg::TrainConfig cfg;
    cfg.C = C;
    cfg.max_iterations = max_iterations;
    cfg.seed = seed;
    cfg.loss = cg::ParseLossKind(loss);
    py::gil_scoped_release release;
    return cg::BcfwTrain(examples, cfg);
  }, py::arg("scenes"), py::arg("truths"), py::arg("C") = 10.0, py::arg("max_iterations") = 1000,
        py::arg("seed") = 1, py::arg("loss") = "gmitre");
  m.def("predict", [](const cg::WindowedScene& scene, const cg::Model& model) {
    return cg::Predict(scene, model).clusters();
  }, py::arg("scene"), py::arg("model"));

  // Datasets and experiments.
  m.def("synth", [](const std::string& out_dir, std::uint64_t seed, const py::dict& spec) {
    const auto s = cg::SynthSpecFromKeyValues(ToKeyValues(spec));
    cg::WriteDataset(out_dir, cg::ToDataset(cg::SynthGenerate(s, seed)));
  }, py::arg("out_dir"), py::arg("seed") = 1, py::arg("spec") = py::dict(),
        "Write a synthetic dataset directory.");
  m.def("prepare_windows", [](const std::string& data_dir, const py::dict& config) {
    const auto cfg = cg::RunConfigFromKeyValues(ToKeyValues(config));
    const auto windows = cg::PrepareWindows(cg::LoadDataset(data_dir), cfg);
    py::list out;
    for (const auto& w : windows) {
      py::dict d;
      d["index"] = w.window.index;
      d["start"] = w.window.start_t;
      d["end"] = w.window.end_t;
      d["scene"] = w.scene;
      d["truth"] = w.truth.clusters();
      out.append(d);
    }
    return out;
  }, py::arg("data_dir"), py::arg("config") = py::dict(),
        "Slice a dataset into windows with pair features and ground truth.");
  m.def("run_experiment", [](const std::string& data_dir, const std::string& out_dir,
                             const py::dict& config) {
    const auto cfg = cg::RunConfigFromKeyValues(ToKeyValues(config));
    const auto dataset = cg::LoadDataset(data_dir);
    cg::ExperimentSummary s;
    {
      py::gil_scoped_release release;
      s = cg::RunExperiment(cfg, dataset, out_dir);
    }
    py::dict d;
    d["gmitre_precision"] = py::make_tuple(s.gmitre_precision_mean, s.gmitre_precision_std);
    d["gmitre_recall"] = py::make_tuple(s.gmitre_recall_mean, s.gmitre_recall_std);
    d["gmitre_f1"] = py::make_tuple(s.gmitre_f1_mean, s.gmitre_f1_std);
    d["pairwise_positive_precision"] = py::make_tuple(s.pw_precision_mean, s.pw_precision_std);
    d["pairwise_positive_recall"] = py::make_tuple(s.pw_recall_mean, s.pw_recall_std);
    d["runs"] = static_cast<int>(s.runs.size());
    return d;
  }, py::arg("data_dir"), py::arg("out_dir") = "", py::arg("config") = py::dict(),
        "Train, predict and score over seeded runs; returns (mean, std) per metric.");
}
