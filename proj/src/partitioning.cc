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

#include "crowdgroups/partitioning.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crowdgroups/errors.h"
#include "crowdgroups/features.h"

namespace crowdgroups {

Partition::Partition(std::vector<Cluster> clusters) {
  std::set<PedestrianId> seen;
  for (auto& c : clusters) {
    if (c.empty()) throw ContractError("partition has an empty cluster");
    std::sort(c.begin(), c.end());
    for (PedestrianId id : c) {
      if (!seen.insert(id).second) {
        throw ContractError("pedestrian " + std::to_string(id) +
                            " appears in more than one cluster");
      }
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
  clusters_ = std::move(clusters);
}

Partition Partition::Singletons(std::span<const PedestrianId> members) {
  std::vector<Cluster> clusters;
  clusters.reserve(members.size());
  for (PedestrianId id : members) clusters.push_back({id});
  return Partition(std::move(clusters));
}

std::vector<PedestrianId> Partition::members() const {
  std::vector<PedestrianId> out;
  for (const auto& c : clusters_) out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Partition::num_members() const {
  std::size_t n = 0;
  for (const auto& c : clusters_) n += c.size();
  return n;
}

std::vector<Partition::Cluster> Partition::groups() const {
  std::vector<Cluster> out;
  for (const auto& c : clusters_) {
    if (c.size() >= 2) out.push_back(c);
  }
  return out;
}

std::vector<PedestrianId> Partition::singletons() const {
  std::vector<PedestrianId> out;
  for (const auto& c : clusters_) {
    if (c.size() == 1) out.push_back(c.front());
  }
  return out;
}

std::vector<int> Partition::Labels(std::span<const PedestrianId> members) const {
  std::map<PedestrianId, int> label;
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    for (PedestrianId id : clusters_[k]) label[id] = static_cast<int>(k);
  }
  if (label.size() != members.size()) {
    throw ContractError("partition does not cover the member set");
  }
  std::vector<int> out;
  out.reserve(members.size());
  for (PedestrianId id : members) {
    auto it = label.find(id);
    if (it == label.end()) {
      throw ContractError("pedestrian " + std::to_string(id) + " is not in the partition");
    }
    out.push_back(it->second);
  }
  return out;
}

std::string ToString(const Partition& p) {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < p.clusters().size(); ++k) {
    if (k) out << ',';
    out << '{';
    const auto& c = p.clusters()[k];
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
    out << '}';
  }
  out << '}';
  return out.str();
}

AffinityMatrix::AffinityMatrix(std::vector<PedestrianId> members, Eigen::MatrixXd w)
    : members_(std::move(members)), w_(std::move(w)) {
  const auto n = static_cast<Eigen::Index>(members_.size());
  if (w_.rows() != n || w_.cols() != n) {
    throw ContractError("affinity matrix size does not match the member count");
  }
  if (!std::is_sorted(members_.begin(), members_.end()) ||
      std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw ContractError("affinity members must be sorted and unique");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    w_(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (w_(i, j) != w_(j, i)) throw ContractError("affinity matrix is not symmetric");
    }
  }
}

AffinityMatrix AffinityMatrix::Scaled(double lambda) const {
  return AffinityMatrix(members_, lambda * w_);
}

AffinityMatrix Affinity(const WindowedScene& scene, const JointVector& w) {
  const std::size_t n = scene.num_members();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = Dot(w, scene.augmented(i, j));
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return AffinityMatrix(scene.members(), std::move(m));
}

JointVector WeightsFromAlphaBeta(const FeatureVector& alpha, const FeatureVector& beta) {
  JointVector w{};
  for (int k = 0; k < kNumFeatures; ++k) {
    w[k] = alpha[k];
    w[kNumFeatures + k] = -beta[k];
  }
  return w;
}

double PartitionScore(const Partition& p, const AffinityMatrix& w) {
  const auto labels = p.Labels(w.members());
  double score = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) score += w(i, j);
    }
  }
  return score;
}

GreedyResult GreedyCorrelationClustering(const AffinityMatrix& w) {
  const std::size_t n = w.size();
  // Slot k starts as member k. Merges fold the larger slot into the smaller,
  // so slot order is always the order of cluster minimum ids.
  std::vector<std::vector<std::size_t>> cluster(n);
  for (std::size_t k = 0; k < n; ++k) cluster[k] = {k};
  std::vector<bool> active(n, true);
  Eigen::MatrixXd between = w.entries();

  auto ids = [&](std::size_t slot) {
    Partition::Cluster c;
    for (std::size_t k : cluster[slot]) c.push_back(w.members()[k]);
    std::sort(c.begin(), c.end());
    return c;
  };

  GreedyResult result;
  for (int iteration = 0;; ++iteration) {
    double best = 0.0;
    std::size_t best_i = n, best_j = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double delta = between(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (delta > best) {
          best = delta;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i == n) break;
    result.trace.push_back({iteration, ids(best_i), ids(best_j), best});
    const auto bi = static_cast<Eigen::Index>(best_i);
    const auto bj = static_cast<Eigen::Index>(best_j);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == best_i || k == best_j) continue;
      const auto kk = static_cast<Eigen::Index>(k);
      between(bi, kk) += between(bj, kk);
      between(kk, bi) = between(bi, kk);
    }
    cluster[best_i].insert(cluster[best_i].end(), cluster[best_j].begin(),
                           cluster[best_j].end());
    cluster[best_j].clear();
    active[best_j] = false;
  }

  std::vector<Partition::Cluster> clusters;
  for (std::size_t k = 0; k < n; ++k) {
    if (active[k]) clusters.push_back(ids(k));
  }
  result.partition = Partition(std::move(clusters));
  return result;
}

namespace {

// Depth-first walk over restricted-growth strings. `blocks[b]` holds the
// member indices of block b.
class PartitionSearch {
 public:
  explicit PartitionSearch(const AffinityMatrix& w) : w_(w) {}

  Partition Run() {
    Visit(0, 0.0);
    return best_;
  }

 private:
  void Visit(std::size_t k, double score) {
    if (k == w_.size()) {
      Partition p = ToPartition();
      if (!found_ || score > best_score_ || (score == best_score_ && p < best_)) {
        best_ = std::move(p);
        best_score_ = score;
        found_ = true;
      }
      return;
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      double gain = 0.0;
      for (std::size_t j : blocks_[b]) gain += w_(k, j);
      blocks_[b].push_back(k);
      Visit(k + 1, score + gain);
      blocks_[b].pop_back();
    }
    blocks_.push_back({k});
    Visit(k + 1, score);
    blocks_.pop_back();
  }

  Partition ToPartition() const {
    std::vector<Partition::Cluster> clusters;
    for (const auto& block : blocks_) {
      Partition::Cluster c;
      for (std::size_t k : block) c.push_back(w_.members()[k]);
      clusters.push_back(std::move(c));
    }
    return Partition(std::move(clusters));
  }

  const AffinityMatrix& w_;
  std::vector<std::vector<std::size_t>> blocks_;
  Partition best_;
  double best_score_ = 0.0;
  bool found_ = false;
};

void CheckExhaustiveSize(std::size_t n) {
  if (n > kMaxExhaustiveMembers) {
    throw ContractError("exhaustive enumeration supports at most " +
                        std::to_string(kMaxExhaustiveMembers) + " members, got " +
                        std::to_string(n));
  }
}

}  // namespace

Partition ExhaustiveCorrelationClustering(const AffinityMatrix& w) {
  CheckExhaustiveSize(w.size());
  return PartitionSearch(w).Run();
}

void ForEachPartition(std::span<const PedestrianId> members,
                      const std::function<void(const Partition&)>& visit) {
  const std::size_t n = members.size();
  CheckExhaustiveSize(n);
  if (n == 0) {
    visit(Partition());
    return;
  }
  // rgs[k] <= 1 + max(rgs[0..k-1]); advance like an odometer.
  std::vector<std::size_t> rgs(n, 0), prefix_max(n, 0);
  while (true) {
    std::vector<Partition::Cluster> clusters(prefix_max[n - 1] + 1);
    for (std::size_t k = 0; k < n; ++k) clusters[rgs[k]].push_back(members[k]);
    visit(Partition(std::move(clusters)));

    std::size_t k = n - 1;
    while (k > 0 && rgs[k] == prefix_max[k - 1] + 1) --k;
    if (k == 0) return;
    ++rgs[k];
    prefix_max[k] = std::max(prefix_max[k - 1], rgs[k]);
    for (std::size_t j = k + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[k];
    }
  }
}

unsigned long long BellNumber(int n) {
  if (n < 0 || n > 25) throw ContractError("Bell number index out of range");
  // Bell triangle.
  std::vector<unsigned long long> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<unsigned long long> next{row.back()};
    for (unsigned long long v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

namespace {

nlohmann::json PartitionJson(const Partition& p, int window) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : p.groups()) groups.push_back(g);
  return {{"window", window}, {"groups", groups}, {"singletons", p.singletons()}};
}

}  // namespace

std::string PartitionToJson(const Partition& p, int window) {
  return PartitionJson(p, window).dump();
}

std::string PartitionsToJson(const std::vector<WindowPartition>& partitions) {
  std::string out = "[";
  for (std::size_t k = 0; k < partitions.size(); ++k) {
    out += k ? ",\n " : "\n ";
    out += PartitionJson(partitions[k].partition, partitions[k].window).dump();
  }
  out += partitions.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<WindowPartition> ParsePartitionsJson(const std::string& text,
                                                 const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  auto parse_one = [&](const nlohmann::json& j) {
    try {
      WindowPartition wp;
      wp.window = j.at("window").get<int>();
      std::vector<Partition::Cluster> clusters;
      for (const auto& g : j.at("groups")) {
        clusters.push_back(g.get<Partition::Cluster>());
      }
      for (const auto& s : j.at("singletons")) {
        clusters.push_back({s.get<PedestrianId>()});
      }
      wp.partition = Partition(std::move(clusters));
      return wp;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, 0, e.what());
    } catch (const ContractError& e) {
      throw ParseError(source, 0, e.what());
    }
  };
  std::vector<WindowPartition> out;
  if (doc.is_array()) {
    for (const auto& j : doc) out.push_back(parse_one(j));
  } else {
    out.push_back(parse_one(doc));
  }
  return out;
}

}  // namespace crowdgroups
