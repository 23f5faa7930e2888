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

// Partition comparison: spanning-forest scores (MITRE and the group-aware
// G-MITRE variant), the pairwise Rand-style loss and the positive-pair
// metric.

#ifndef CROWDGROUPS_LOSSES_H_
#define CROWDGROUPS_LOSSES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdgroups/partitioning.h"

namespace crowdgroups {

// Union-find with path compression and union by size.
class DisjointSetForest {
 public:
  explicit DisjointSetForest(std::size_t n);

  std::size_t size() const { return parent_.size(); }
  std::size_t Find(std::size_t x);
  // Returns false when x and y were already connected.
  bool Union(std::size_t x, std::size_t y);
  // Size of the component whose root is `root`.
  std::size_t ComponentSize(std::size_t root) const { return size_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct ForestScore {
  double recall = 1.0;
  double precision = 1.0;
  double f1 = 1.0;
};

// 2pr / (p + r), and 0 when p + r = 0.
double F1Score(double precision, double recall);

struct ForestOptions {
  // Add a fake counterpart per member, linked to it when the member is a
  // singleton (G-MITRE). Without it this is the MITRE score.
  bool fake_counterparts = true;
  // Shuffle the order of UNION operations. The score must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

// Recall counts the links of `truth`'s spanning trees missing from `pred`;
// precision exchanges the roles. An empty link count scores 1. Throws
// ContractError when the member sets differ.
ForestScore SpanningForestScore(const Partition& truth, const Partition& pred,
                                const ForestOptions& options = {});

ForestScore GMitreScore(const Partition& truth, const Partition& pred);
double GMitreLoss(const Partition& truth, const Partition& pred);

ForestScore MitreScore(const Partition& truth, const Partition& pred);
double MitreLoss(const Partition& truth, const Partition& pred);

// Fraction of unordered member pairs whose co-membership differs; 0 with
// fewer than two members.
double PairwiseLoss(const Partition& truth, const Partition& pred);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

// Precision and recall over intra-group pairs only. An empty denominator
// scores 1.
PrecisionRecall PositivePairwiseMetric(const Partition& truth,
                                       const Partition& pred);

enum class LossKind { kGMitre, kMitre, kPairwise };

std::string_view ToString(LossKind kind);
// Accepts "gmitre", "mitre" or "pairwise"; throws ConfigError otherwise.
LossKind ParseLossKind(std::string_view name);

double StructuredLoss(LossKind kind, const Partition& truth,
                      const Partition& pred);

// Same losses on two cluster-label arrays over one member list (entry k of
// each array is the cluster of member k). Counts contingency tables instead
// of building forests; used by the training oracle's inner loop.
double StructuredLoss(LossKind kind, std::span<const int> truth_labels,
                      std::span<const int> pred_labels);

struct WindowScore {
  int window = 0;
  ForestScore gmitre;
  PrecisionRecall pairwise_positive;
};

WindowScore ScoreWindow(int window, const Partition& truth,
                        const Partition& pred);

// `window,metric,precision,recall,f1` rows for gmitre and pairwise_positive.
std::string EvaluationCsv(const std::vector<WindowScore>& scores);

}  // namespace crowdgroups

#endif  // CROWDGROUPS_LOSSES_H_
