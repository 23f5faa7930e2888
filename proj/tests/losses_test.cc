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

#include <random>

#include <gtest/gtest.h>

#include "crowdgroups/errors.h"
#include "oracles.h"

namespace crowdgroups {
namespace {

using testing::BruteForceForestScore;
using testing::BruteForcePairwiseLoss;
using testing::Members;
using testing::RandomPartition;

// a, b, c, d = 1, 2, 3, 4.
const Partition kAbC({{1, 2}, {3}});
const Partition kSingles3({{1}, {2}, {3}});
const Partition kAbc({{1, 2, 3}});

TEST(DisjointSetForestTest, UnionAndFind) {
  DisjointSetForest f(5);
  EXPECT_TRUE(f.Union(0, 1));
  EXPECT_TRUE(f.Union(3, 1));
  EXPECT_FALSE(f.Union(0, 3));
  EXPECT_EQ(f.Find(0), f.Find(3));
  EXPECT_NE(f.Find(0), f.Find(2));
  EXPECT_EQ(f.ComponentSize(f.Find(1)), 3u);
}

TEST(GMitreTest, HandExecutedExamples) {
  const auto s = GMitreScore(kAbC, kSingles3);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.f1, 0.4);
  EXPECT_DOUBLE_EQ(GMitreLoss(kAbC, kSingles3), 0.6);

  const auto t = GMitreScore(kAbc, kAbC);
  EXPECT_DOUBLE_EQ(t.recall, 0.5);
  EXPECT_DOUBLE_EQ(t.precision, 0.5);
  EXPECT_DOUBLE_EQ(GMitreLoss(kAbc, kAbC), 0.5);

  // All singletons against one cluster: every truth link is missing and so
  // is every predicted one.
  EXPECT_DOUBLE_EQ(GMitreLoss(kSingles3, kAbc), 1.0);
  EXPECT_DOUBLE_EQ(GMitreScore(kSingles3, kAbc).recall, 0.0);
}

TEST(GMitreTest, EmptyWindowScoresOne) {
  const auto s = GMitreScore(Partition(), Partition());
  EXPECT_EQ(s.f1, 1.0);
  EXPECT_EQ(GMitreLoss(Partition(), Partition()), 0.0);
}

TEST(GMitreTest, MemberMismatchIsContractError) {
  EXPECT_THROW(GMitreScore(kAbC, Partition({{1, 2}})), ContractError);
}

TEST(MitreTest, Examples) {
  EXPECT_DOUBLE_EQ(MitreLoss(kAbC, kAbC), 0.0);
  // Singleton blindness: d is a singleton on both sides.
  EXPECT_DOUBLE_EQ(MitreLoss(Partition({{1, 2}, {3}, {4}}), Partition({{1, 2}, {3}, {4}})), 0.0);
  const auto s = MitreScore(Partition({{1, 2, 3, 4}}), Partition({{1, 2}, {3, 4}}));
  EXPECT_DOUBLE_EQ(s.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_NEAR(s.f1, 0.8, 1e-15);
  EXPECT_NEAR(MitreLoss(Partition({{1, 2, 3, 4}}), Partition({{1, 2}, {3, 4}})), 0.2, 1e-15);
  EXPECT_EQ(MitreLoss(kSingles3, kSingles3), 0.0);
}

TEST(PairwiseTest, Examples) {
  EXPECT_EQ(PairwiseLoss(kAbC, kAbC), 0.0);
  EXPECT_DOUBLE_EQ(PairwiseLoss(kAbC, kSingles3), 1.0 / 3.0);
  EXPECT_EQ(PairwiseLoss(Partition({{1, 2}}), Partition({{1}, {2}})), 1.0);
  EXPECT_EQ(PairwiseLoss(Partition({{1}}), Partition({{1}})), 0.0);
}

TEST(PositivePairwiseTest, Examples) {
  const auto same = PositivePairwiseMetric(kAbC, kAbC);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  const auto none = PositivePairwiseMetric(kAbC, kSingles3);
  EXPECT_EQ(none.precision, 1.0);
  EXPECT_EQ(none.recall, 0.0);
  const auto part = PositivePairwiseMetric(kAbc, kAbC);
  EXPECT_EQ(part.precision, 1.0);
  EXPECT_DOUBLE_EQ(part.recall, 1.0 / 3.0);
}

TEST(LossPropertiesTest, AgreeWithBruteForceAndStayInRange) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto members = Members(1 + trial % 10);
    const Partition t = RandomPartition(members, rng);
    const Partition p = RandomPartition(members, rng);
    for (bool fakes : {true, false}) {
      const auto got = fakes ? GMitreScore(t, p) : MitreScore(t, p);
      const auto want = BruteForceForestScore(t, p, fakes);
      EXPECT_NEAR(got.recall, want.recall, 1e-12);
      EXPECT_NEAR(got.precision, want.precision, 1e-12);
      EXPECT_NEAR(got.f1, want.f1, 1e-12);
    }
    EXPECT_NEAR(PairwiseLoss(t, p), BruteForcePairwiseLoss(t, p), 1e-12);
    for (LossKind kind : {LossKind::kGMitre, LossKind::kMitre, LossKind::kPairwise}) {
      const double loss = StructuredLoss(kind, t, p);
      EXPECT_GE(loss, 0.0);
      EXPECT_LE(loss, 1.0);
      EXPECT_EQ(StructuredLoss(kind, t, t), 0.0);
      const auto lt = t.Labels(members);
      const auto lp = p.Labels(members);
      EXPECT_NEAR(StructuredLoss(kind, lt, lp), loss, 1e-12);
    }
    EXPECT_NEAR(GMitreScore(t, p).f1, GMitreScore(p, t).f1, 1e-15);
    EXPECT_EQ(GMitreScore(t, p).recall, GMitreScore(p, t).precision);
  }
}

TEST(LossPropertiesTest, IndependentOfUnionOrder) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto members = Members(2 + trial % 9);
    const Partition t = RandomPartition(members, rng);
    const Partition p = RandomPartition(members, rng);
    const auto base = SpanningForestScore(t, p);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ForestOptions opts;
      opts.shuffle_seed = seed + 100 * trial;
      const auto s = SpanningForestScore(t, p, opts);
      EXPECT_EQ(s.recall, base.recall);
      EXPECT_EQ(s.precision, base.precision);
    }
  }
}

TEST(LossPropertiesTest, SingletonSensitivity) {
  // Truth {a,b} plus singletons. The prediction splits the group; demoting
  // a correctly predicted singleton into a wrong pair raises G-MITRE while
  // MITRE, which sees no singleton links, stays at its value.
  for (int singles = 2; singles <= 8; ++singles) {
    std::vector<Partition::Cluster> truth_c{{1, 2}}, before_c{{1}, {2}}, after_c{{1}, {2}};
    for (PedestrianId id = 3; id < 3 + singles; ++id) {
      truth_c.push_back({id});
      before_c.push_back({id});
      if (id > 4) after_c.push_back({id});
    }
    after_c.push_back({3, 4});
    const Partition truth(truth_c), before(before_c), after(after_c);
    EXPECT_GT(GMitreLoss(truth, after), GMitreLoss(truth, before));
    EXPECT_EQ(MitreLoss(truth, after), MitreLoss(truth, before));
  }
}

TEST(LossKindTest, Parse) {
  EXPECT_EQ(ParseLossKind("gmitre"), LossKind::kGMitre);
  EXPECT_EQ(ParseLossKind("pairwise"), LossKind::kPairwise);
  EXPECT_EQ(ToString(LossKind::kMitre), "mitre");
  EXPECT_THROW(ParseLossKind("rand"), ConfigError);
}

TEST(EvaluationCsvTest, Format) {
  const auto csv = EvaluationCsv({ScoreWindow(4, kAbC, kSingles3)});
  EXPECT_EQ(csv,
            "window,metric,precision,recall,f1\n"
            "4,gmitre,0.333333333,0.5,0.4\n"
            "4,pairwise_positive,1,0,0\n");
}

}  // namespace
}  // namespace crowdgroups
