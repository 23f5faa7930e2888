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

#include "crowdgroups/losses.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "crowdgroups/errors.h"

namespace crowdgroups {

DisjointSetForest::DisjointSetForest(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSetForest::Find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) x = std::exchange(parent_[x], root);
  return root;
}

bool DisjointSetForest::Union(std::size_t x, std::size_t y) {
  x = Find(x);
  y = Find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  return true;
}

double F1Score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

// Spanning-tree edges of `p` over member indices, plus fake-counterpart
// links (member k <-> n + k) for singletons when requested. With an rng the
// tree shape and the edge order are randomized.
std::vector<Edge> ForestEdges(const Partition& p, const std::vector<PedestrianId>& members,
                              bool fakes, std::mt19937_64* rng) {
  const std::size_t n = members.size();
  std::vector<Edge> edges;
  for (const auto& cluster : p.clusters()) {
    std::vector<std::size_t> idx;
    for (PedestrianId id : cluster) {
      idx.push_back(static_cast<std::size_t>(
          std::lower_bound(members.begin(), members.end(), id) - members.begin()));
    }
    if (idx.size() == 1) {
      if (fakes) edges.emplace_back(idx[0], n + idx[0]);
      continue;
    }
    if (rng) std::shuffle(idx.begin(), idx.end(), *rng);
    for (std::size_t k = 1; k < idx.size(); ++k) {
      std::size_t parent = k - 1;
      if (rng) parent = std::uniform_int_distribution<std::size_t>(0, k - 1)(*rng);
      edges.emplace_back(idx[parent], idx[k]);
    }
  }
  if (rng) std::shuffle(edges.begin(), edges.end(), *rng);
  return edges;
}

DisjointSetForest BuildForest(std::size_t universe, const std::vector<Edge>& edges) {
  DisjointSetForest forest(universe);
  for (const auto& [a, b] : edges) forest.Union(a, b);
  return forest;
}

// 1 - sum(v) / sum(c) over the components of `key`, where c is the number of
// links in the component and v the number missing from `response`.
double ForestRecall(DisjointSetForest& key, DisjointSetForest& response) {
  const std::size_t universe = key.size();
  std::vector<std::set<std::size_t>> parts(universe);
  for (std::size_t x = 0; x < universe; ++x) parts[key.Find(x)].insert(response.Find(x));
  double missing = 0.0, links = 0.0;
  for (std::size_t root = 0; root < universe; ++root) {
    if (key.Find(root) != root) continue;
    links += static_cast<double>(key.ComponentSize(root) - 1);
    missing += static_cast<double>(parts[root].size() - 1);
  }
  return links > 0.0 ? 1.0 - missing / links : 1.0;
}

}  // namespace

ForestScore SpanningForestScore(const Partition& truth, const Partition& pred,
                                const ForestOptions& options) {
  const auto members = truth.members();
  if (members != pred.members()) {
    throw ContractError("partitions compared over different member sets");
  }
  std::optional<std::mt19937_64> rng;
  if (options.shuffle_seed) rng.emplace(*options.shuffle_seed);
  std::mt19937_64* r = rng ? &*rng : nullptr;

  const std::size_t universe = members.size() * (options.fake_counterparts ? 2 : 1);
  auto q = BuildForest(universe, ForestEdges(truth, members, options.fake_counterparts, r));
  auto s = BuildForest(universe, ForestEdges(pred, members, options.fake_counterparts, r));

  ForestScore score;
  score.recall = ForestRecall(q, s);
  score.precision = ForestRecall(s, q);
  score.f1 = F1Score(score.precision, score.recall);
  return score;
}

ForestScore GMitreScore(const Partition& truth, const Partition& pred) {
  return SpanningForestScore(truth, pred, ForestOptions{.fake_counterparts = true, .shuffle_seed = std::nullopt});
}

double GMitreLoss(const Partition& truth, const Partition& pred) {
  return 1.0 - GMitreScore(truth, pred).f1;
}

ForestScore MitreScore(const Partition& truth, const Partition& pred) {
  return SpanningForestScore(truth, pred, ForestOptions{.fake_counterparts = false, .shuffle_seed = std::nullopt});
}

double MitreLoss(const Partition& truth, const Partition& pred) {
  return 1.0 - MitreScore(truth, pred).f1;
}

namespace {

struct PairCounts {
  std::size_t pairs = 0;
  std::size_t truth_pos = 0;
  std::size_t pred_pos = 0;
  std::size_t both_pos = 0;
};

PairCounts CountPairs(const Partition& truth, const Partition& pred) {
  const auto members = truth.members();
  if (members != pred.members()) {
    throw ContractError("partitions compared over different member sets");
  }
  const auto lt = truth.Labels(members);
  const auto lp = pred.Labels(members);
  PairCounts c;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const bool t = lt[i] == lt[j], p = lp[i] == lp[j];
      ++c.pairs;
      c.truth_pos += t;
      c.pred_pos += p;
      c.both_pos += t && p;
    }
  }
  return c;
}

}  // namespace

double PairwiseLoss(const Partition& truth, const Partition& pred) {
  const auto c = CountPairs(truth, pred);
  if (c.pairs == 0) return 0.0;
  const std::size_t disagree = c.truth_pos + c.pred_pos - 2 * c.both_pos;
  return static_cast<double>(disagree) / static_cast<double>(c.pairs);
}

PrecisionRecall PositivePairwiseMetric(const Partition& truth, const Partition& pred) {
  const auto c = CountPairs(truth, pred);
  PrecisionRecall pr;
  if (c.pred_pos > 0) pr.precision = static_cast<double>(c.both_pos) / c.pred_pos;
  if (c.truth_pos > 0) pr.recall = static_cast<double>(c.both_pos) / c.truth_pos;
  return pr;
}

std::string_view ToString(LossKind kind) {
  switch (kind) {
    case LossKind::kGMitre: return "gmitre";
    case LossKind::kMitre: return "mitre";
    case LossKind::kPairwise: return "pairwise";
  }
  return "unknown";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "gmitre") return LossKind::kGMitre;
  if (name == "mitre") return LossKind::kMitre;
  if (name == "pairwise") return LossKind::kPairwise;
  throw ConfigError("unknown loss '" + std::string(name) +
                    "' (expected gmitre, mitre or pairwise)");
}

double StructuredLoss(LossKind kind, const Partition& truth, const Partition& pred) {
  switch (kind) {
    case LossKind::kGMitre: return GMitreLoss(truth, pred);
    case LossKind::kMitre: return MitreLoss(truth, pred);
    case LossKind::kPairwise: return PairwiseLoss(truth, pred);
  }
  throw ContractError("unhandled loss kind");
}

namespace {

// Relabels to 0..k-1 in order of first appearance.
std::vector<int> Compact(std::span<const int> labels, int* count) {
  std::vector<int> out(labels.size());
  std::vector<std::pair<int, int>> seen;  // (label, compact id)
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](const auto& e) { return e.first == labels[k]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[k], static_cast<int>(seen.size()));
      out[k] = static_cast<int>(seen.size()) - 1;
    } else {
      out[k] = it->second;
    }
  }
  *count = static_cast<int>(seen.size());
  return out;
}

// Spanning-forest recall of `key` against `response`. A key cluster of size
// s contributes s - 1 links, of which (distinct response clusters - 1) are
// missing. With fake counterparts a key singleton contributes one link,
// missing unless the member is also a response singleton.
double LabelRecall(const std::vector<int>& key, int key_count, const std::vector<int>& response,
                   int response_count, bool fakes) {
  std::vector<int> key_size(key_count, 0), response_size(response_count, 0);
  for (std::size_t k = 0; k < key.size(); ++k) {
    ++key_size[key[k]];
    ++response_size[response[k]];
  }
  std::vector<int> stamp(response_count, -1);
  std::vector<std::vector<int>> by_key(key_count);
  for (std::size_t k = 0; k < key.size(); ++k) by_key[key[k]].push_back(response[k]);
  double links = 0.0, missing = 0.0;
  for (int c = 0; c < key_count; ++c) {
    if (key_size[c] == 1) {
      if (fakes) {
        links += 1.0;
        if (response_size[by_key[c][0]] != 1) missing += 1.0;
      }
      continue;
    }
    int distinct = 0;
    for (int r : by_key[c]) {
      if (stamp[r] != c) {
        stamp[r] = c;
        ++distinct;
      }
    }
    links += key_size[c] - 1;
    missing += distinct - 1;
  }
  return links > 0.0 ? 1.0 - missing / links : 1.0;
}

}  // namespace

double StructuredLoss(LossKind kind, std::span<const int> truth_labels,
                      std::span<const int> pred_labels) {
  if (truth_labels.size() != pred_labels.size()) {
    throw ContractError("label arrays differ in length");
  }
  int nt = 0, np = 0;
  const auto t = Compact(truth_labels, &nt);
  const auto p = Compact(pred_labels, &np);
  if (kind == LossKind::kPairwise) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) disagree += (t[i] == t[j]) != (p[i] == p[j]);
    }
    return static_cast<double>(disagree) / static_cast<double>(n * (n - 1) / 2);
  }
  const bool fakes = kind == LossKind::kGMitre;
  const double recall = LabelRecall(t, nt, p, np, fakes);
  const double precision = LabelRecall(p, np, t, nt, fakes);
  return 1.0 - F1Score(precision, recall);
}

WindowScore ScoreWindow(int window, const Partition& truth, const Partition& pred) {
  return {window, GMitreScore(truth, pred), PositivePairwiseMetric(truth, pred)};
}

std::string EvaluationCsv(const std::vector<WindowScore>& scores) {
  std::string out = "window,metric,precision,recall,f1\n";
  char line[160];
  for (const auto& s : scores) {
    std::snprintf(line, sizeof line, "%d,gmitre,%.9g,%.9g,%.9g\n", s.window,
                  s.gmitre.precision, s.gmitre.recall, s.gmitre.f1);
    out += line;
    const auto& pp = s.pairwise_positive;
    std::snprintf(line, sizeof line, "%d,pairwise_positive,%.9g,%.9g,%.9g\n", s.window,
                  pp.precision, pp.recall, F1Score(pp.precision, pp.recall));
    out += line;
  }
  return out;
}

}  // namespace crowdgroups
