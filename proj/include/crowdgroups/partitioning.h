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

// Correlation clustering over a signed pairwise affinity: greedy bottom-up
// merging plus an exhaustive reference solver for small crowds.

#ifndef CROWDGROUPS_PARTITIONING_H_
#define CROWDGROUPS_PARTITIONING_H_

#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crowdgroups/types.h"

namespace crowdgroups {

class WindowedScene;

// A set of disjoint, nonempty clusters. Always kept in canonical form:
// members sorted inside each cluster, clusters sorted by their smallest
// member.
class Partition {
 public:
  using Cluster = std::vector<PedestrianId>;

  Partition() = default;
  // Throws ContractError on empty clusters or repeated members.
  explicit Partition(std::vector<Cluster> clusters);
  Partition(std::initializer_list<Cluster> clusters)
      : Partition(std::vector<Cluster>(clusters)) {}

  static Partition Singletons(std::span<const PedestrianId> members);

  const std::vector<Cluster>& clusters() const { return clusters_; }
  std::size_t num_clusters() const { return clusters_.size(); }
  // Sorted union of all clusters.
  std::vector<PedestrianId> members() const;
  std::size_t num_members() const;

  // Clusters with at least two members, and the members of size-1 clusters.
  std::vector<Cluster> groups() const;
  std::vector<PedestrianId> singletons() const;

  // For each entry of `members`, the index of its cluster. Throws
  // ContractError unless the partition covers exactly `members`.
  std::vector<int> Labels(std::span<const PedestrianId> members) const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) {
    return a.clusters_ <=> b.clusters_;
  }

 private:
  std::vector<Cluster> clusters_;
};

std::string ToString(const Partition& p);

// Symmetric signed affinity between crowd members. The diagonal is zero.
class AffinityMatrix {
 public:
  AffinityMatrix() = default;
  // `members` must be sorted and unique; `w` square, symmetric, same size.
  AffinityMatrix(std::vector<PedestrianId> members, Eigen::MatrixXd w);

  const std::vector<PedestrianId>& members() const { return members_; }
  const Eigen::MatrixXd& entries() const { return w_; }
  std::size_t size() const { return members_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return w_(i, j); }

  AffinityMatrix Scaled(double lambda) const;

 private:
  std::vector<PedestrianId> members_;
  Eigen::MatrixXd w_;
};

// W_ab = w^T [1 - d_ab; d_ab]. In terms of the complement and distance
// weights, W_ab = alpha^T (1 - d_ab) - beta^T d_ab with w = [alpha; -beta].
AffinityMatrix Affinity(const WindowedScene& scene, const JointVector& w);

// [alpha; -beta].
JointVector WeightsFromAlphaBeta(const FeatureVector& alpha,
                                 const FeatureVector& beta);

// Sum over clusters and over unordered intra-cluster pairs of W_ab.
double PartitionScore(const Partition& p, const AffinityMatrix& w);

struct Merge {
  int iteration = 0;
  Partition::Cluster left;   // cluster with the smaller minimum id
  Partition::Cluster right;
  double delta = 0.0;        // score gain, strictly positive
};

using MergeTrace = std::vector<Merge>;

struct GreedyResult {
  Partition partition;
  MergeTrace trace;
};

// Starts from singletons and repeatedly merges the cluster pair with the
// largest positive score gain, until no merge gains. Ties go to the
// lexicographically smallest (min id, min id) pair.
GreedyResult GreedyCorrelationClustering(const AffinityMatrix& w);

inline constexpr std::size_t kMaxExhaustiveMembers = 12;

// Exact maximizer of PartitionScore by enumerating all set partitions.
// Ties resolve to the smallest canonical partition. Throws ContractError
// above kMaxExhaustiveMembers members.
Partition ExhaustiveCorrelationClustering(const AffinityMatrix& w);

// Calls `visit` once per set partition of `members`, enumerated as
// restricted-growth strings. Throws ContractError above
// kMaxExhaustiveMembers members.
void ForEachPartition(std::span<const PedestrianId> members,
                      const std::function<void(const Partition&)>& visit);

// Bell number B(n) for small n.
unsigned long long BellNumber(int n);

struct WindowPartition {
  int window = 0;
  Partition partition;
};

// {"window": k, "groups": [[...]], "singletons": [...]}
std::string PartitionToJson(const Partition& p, int window);
// A JSON array of window objects, one per line.
std::string PartitionsToJson(const std::vector<WindowPartition>& partitions);
// Accepts a single window object or an array of them. Throws ParseError.
std::vector<WindowPartition> ParsePartitionsJson(
    const std::string& text, const std::string& source = "<text>");

}  // namespace crowdgroups

#endif  // CROWDGROUPS_PARTITIONING_H_
