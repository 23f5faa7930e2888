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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "crowdgroups/errors.h"
#include "crowdgroups/features.h"
#include "oracles.h"

namespace crowdgroups {
namespace {

using testing::BlockAffinity;
using testing::Members;
using testing::RandomAffinity;

AffinityMatrix Matrix3(double ab, double bc, double ac) {
  Eigen::MatrixXd w(3, 3);
  w << 0, ab, ac, ab, 0, bc, ac, bc, 0;
  return AffinityMatrix(Members(3), w);
}

TEST(PartitionTest, CanonicalForm) {
  const Partition p({{5, 3}, {1}, {4, 2}});
  EXPECT_EQ(ToString(p), "{{1},{2,4},{3,5}}");
  EXPECT_EQ(p.members(), (std::vector<PedestrianId>{1, 2, 3, 4, 5}));
  EXPECT_EQ(p.groups().size(), 2u);
  EXPECT_EQ(p.singletons(), (std::vector<PedestrianId>{1}));
  EXPECT_EQ(p, Partition({{2, 4}, {1}, {3, 5}}));
}

TEST(PartitionTest, RejectsInvalidClusters) {
  EXPECT_THROW(Partition({{1}, {}}), ContractError);
  EXPECT_THROW(Partition({{1, 2}, {2}}), ContractError);
  const Partition p({{1, 2}});
  const std::vector<PedestrianId> other{1, 3};
  EXPECT_THROW(p.Labels(other), ContractError);
}

TEST(AffinityTest, Examples) {
  const auto scene = WindowedScene::FromFeatures({1, 2}, {{0, 0, 0, 0}});
  EXPECT_EQ(Affinity(scene, JointVector{})(0, 1), 0.0);
  const FeatureVector ones{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(Affinity(scene, WeightsFromAlphaBeta(ones, {7, -2, 3, 0.5}))(0, 1), 4.0);
  const auto half = WindowedScene::FromFeatures({1, 2}, {{0.5, 0.5, 0.5, 0.5}});
  EXPECT_DOUBLE_EQ(Affinity(half, WeightsFromAlphaBeta(ones, ones))(0, 1), 0.0);
}

TEST(AffinityTest, RejectsAsymmetricMatrix) {
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 2, 0;
  EXPECT_THROW(AffinityMatrix(Members(2), w), ContractError);
}

TEST(PartitionScoreTest, Examples) {
  const auto w = Matrix3(1, 1, -0.5);
  EXPECT_EQ(PartitionScore(Partition::Singletons(w.members()), w), 0.0);
  EXPECT_DOUBLE_EQ(PartitionScore(Partition({{1, 2, 3}}), w), 1.5);
  Eigen::MatrixXd two(2, 2);
  two << 0, 2, 2, 0;
  EXPECT_DOUBLE_EQ(PartitionScore(Partition({{1, 2}}), AffinityMatrix(Members(2), two)), 2.0);
}

TEST(GreedyTest, SignExtremes) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(5, 5), pos = neg;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      neg(i, j) = neg(j, i) = -u(rng);
      pos(i, j) = pos(j, i) = u(rng);
    }
  }
  EXPECT_EQ(GreedyCorrelationClustering(AffinityMatrix(Members(5), neg)).partition,
            Partition::Singletons(Members(5)));
  EXPECT_EQ(GreedyCorrelationClustering(AffinityMatrix(Members(5), pos)).partition,
            Partition({Members(5)}));
}

TEST(GreedyTest, TransitivityExample) {
  const auto w = Matrix3(1, 1, -0.5);
  const auto r = GreedyCorrelationClustering(w);
  EXPECT_EQ(r.partition, Partition({{1, 2, 3}}));
  // Exhaustive check over all 5 partitions of three members.
  int count = 0;
  double best = -1e9;
  ForEachPartition(w.members(), [&](const Partition& p) {
    ++count;
    best = std::max(best, PartitionScore(p, w));
  });
  EXPECT_EQ(count, 5);
  EXPECT_DOUBLE_EQ(best, 1.5);
}

TEST(GreedyTest, TieGoesToSmallestIds) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(4, 4, -1.0);
  w(0, 1) = w(1, 0) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  const auto r = GreedyCorrelationClustering(AffinityMatrix(Members(4), w));
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].left, (Partition::Cluster{1}));
  EXPECT_EQ(r.trace[0].right, (Partition::Cluster{2}));
  EXPECT_EQ(r.trace[1].left, (Partition::Cluster{3}));
}

TEST(GreedyTest, TraceDeltasSumToScoreAndArePositive) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = RandomAffinity(2 + trial % 9, rng);
    const auto r = GreedyCorrelationClustering(w);
    double sum = 0.0;
    for (const auto& m : r.trace) {
      EXPECT_GT(m.delta, 0.0);
      sum += m.delta;
    }
    EXPECT_NEAR(sum, PartitionScore(r.partition, w), 1e-9);
  }
}

TEST(GreedyTest, HierarchicalCoherence) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = RandomAffinity(7, rng);
    const auto r = GreedyCorrelationClustering(w);
    // Replay the trace: each merged pair must be two current clusters.
    std::set<Partition::Cluster> clusters;
    for (PedestrianId id : w.members()) clusters.insert({id});
    for (const auto& m : r.trace) {
      ASSERT_TRUE(clusters.count(m.left) && clusters.count(m.right));
      clusters.erase(m.left);
      clusters.erase(m.right);
      Partition::Cluster merged = m.left;
      merged.insert(merged.end(), m.right.begin(), m.right.end());
      std::sort(merged.begin(), merged.end());
      clusters.insert(merged);
    }
    EXPECT_EQ(Partition(std::vector<Partition::Cluster>(clusters.begin(), clusters.end())),
              r.partition);
  }
}

TEST(GreedyTest, ScaleInvariantAndDeterministic) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = RandomAffinity(8, rng);
    const auto base = GreedyCorrelationClustering(w);
    for (double lambda : {0.1, 1.0, 7.3}) {
      EXPECT_EQ(GreedyCorrelationClustering(w.Scaled(lambda)).partition, base.partition);
    }
    const auto again = GreedyCorrelationClustering(w);
    EXPECT_EQ(again.partition, base.partition);
    ASSERT_EQ(again.trace.size(), base.trace.size());
  }
}

TEST(ExhaustiveTest, DominatesGreedyAndMatchesOnBlocks) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto w = RandomAffinity(6, rng);
    const double g = PartitionScore(GreedyCorrelationClustering(w).partition, w);
    const double e = PartitionScore(ExhaustiveCorrelationClustering(w), w);
    EXPECT_LE(g, e + 1e-12);
  }
  for (int trial = 0; trial < 50; ++trial) {
    Partition blocks;
    const auto w = BlockAffinity(7, rng, &blocks);
    EXPECT_EQ(ExhaustiveCorrelationClustering(w), blocks);
    EXPECT_EQ(GreedyCorrelationClustering(w).partition, blocks);
  }
}

TEST(ExhaustiveTest, SizeLimits) {
  std::mt19937_64 rng(6);
  EXPECT_EQ(ExhaustiveCorrelationClustering(RandomAffinity(1, rng)), Partition({{1}}));
  EXPECT_THROW(ExhaustiveCorrelationClustering(RandomAffinity(13, rng)), ContractError);
}

TEST(ForEachPartitionTest, EnumeratesBellManyDistinctPartitions) {
  for (int n = 0; n <= 8; ++n) {
    std::set<Partition> seen;
    ForEachPartition(Members(n), [&](const Partition& p) {
      EXPECT_EQ(p.num_members(), static_cast<std::size_t>(n));
      seen.insert(p);
    });
    EXPECT_EQ(seen.size(), BellNumber(n)) << n;
  }
  EXPECT_EQ(BellNumber(3), 5u);
  EXPECT_EQ(BellNumber(10), 115975u);
}

TEST(PartitionJsonTest, RoundTrip) {
  const std::vector<WindowPartition> in{{3, Partition({{1, 2}, {5}, {3, 4, 6}})},
                                        {4, Partition()}};
  const auto out = ParsePartitionsJson(PartitionsToJson(in));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].window, 3);
  EXPECT_EQ(out[0].partition, in[0].partition);
  EXPECT_EQ(out[1].partition.num_members(), 0u);
  const auto single = ParsePartitionsJson(PartitionToJson(in[0].partition, 3));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].partition, in[0].partition);
}

TEST(PartitionJsonTest, Errors) {
  EXPECT_THROW(ParsePartitionsJson("{"), ParseError);
  EXPECT_THROW(ParsePartitionsJson(R"({"window": 1, "groups": [[1, 2]], "singletons": [2]})"),
               ParseError);
  EXPECT_THROW(ParsePartitionsJson(R"({"window": 1})"), ParseError);
}

}  // namespace
}  // namespace crowdgroups
