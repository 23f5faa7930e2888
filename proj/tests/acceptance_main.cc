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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. The dataset replication check runs only when
// CROWDGROUPS_BIWI_DIR points at a directory holding `hotel/` and/or `eth/`
// dataset directories.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crowdgroups/features.h"
#include "crowdgroups/harness.h"
#include "crowdgroups/learning.h"
#include "crowdgroups/losses.h"
#include "crowdgroups/partitioning.h"
#include "crowdgroups/stats.h"
#include "oracles.h"

namespace cg = crowdgroups;
namespace oracle = crowdgroups::testing;

namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

Verdict Check(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Verdict GMitreExactness() {
  const cg::Partition ab_c{{1, 2}, {3}}, a_b_c{{1}, {2}, {3}}, abc{{1, 2, 3}};
  const double l1 = cg::GMitreLoss(ab_c, a_b_c);
  const double l2 = cg::GMitreLoss(abc, ab_c);
  bool ok = std::abs(l1 - 0.6) <= 1e-12 && std::abs(l2 - 0.5) <= 1e-12;

  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto members = oracle::Members(n);
    const auto truth = oracle::RandomPartition(members, rng);
    const auto pred = oracle::RandomPartition(members, rng);
    const auto fast = cg::GMitreScore(truth, pred);
    const auto slow = oracle::BruteForceForestScore(truth, pred, true);
    worst = std::max({worst, std::abs(fast.precision - slow.precision),
                      std::abs(fast.recall - slow.recall), std::abs(fast.f1 - slow.f1)});
  }
  ok = ok && worst <= 1e-12;
  return Check(ok, Fmt("losses %.17g / %.17g, max deviation from brute force %.3g over 1000 pairs",
                       l1, l2, worst));
}

// Greedy/exhaustive runs shared by the clustering and greedy-property checks.
struct ClusteringRuns {
  std::vector<cg::AffinityMatrix> matrices;
  std::vector<cg::GreedyResult> greedy;
};

ClusteringRuns& SharedRuns() {
  static ClusteringRuns runs;
  return runs;
}

Verdict ClusteringOracle() {
  std::mt19937_64 rng(102);
  auto& runs = SharedRuns();
  int dominated = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto w = oracle::RandomAffinity(6, rng);
    auto g = cg::GreedyCorrelationClustering(w);
    const double gs = cg::PartitionScore(g.partition, w);
    const double es = cg::PartitionScore(cg::ExhaustiveCorrelationClustering(w), w);
    if (gs <= es + 1e-12) ++dominated;
    worst_gap = std::max(worst_gap, es - gs);
    runs.matrices.push_back(std::move(w));
    runs.greedy.push_back(std::move(g));
  }
  int equal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    cg::Partition planted;
    auto w = oracle::BlockAffinity(6, rng, &planted);
    auto g = cg::GreedyCorrelationClustering(w);
    if (g.partition == cg::ExhaustiveCorrelationClustering(w) && g.partition == planted) ++equal;
    runs.matrices.push_back(std::move(w));
    runs.greedy.push_back(std::move(g));
  }
  return Check(dominated == 1000 && equal == 200,
               Fmt("greedy <= exhaustive on %d/1000 (largest gap %.3g); block instances equal "
                   "on %d/200",
                   dominated, worst_gap, equal));
}

bool TraceIsCoherent(const cg::AffinityMatrix& w, const cg::GreedyResult& g) {
  // cluster_of[id] must only ever grow, and every merge must join two
  // clusters that exist at that point.
  std::map<cg::PedestrianId, std::set<cg::PedestrianId>> cluster_of;
  for (auto id : w.members()) cluster_of[id] = {id};
  for (const auto& m : g.trace) {
    const std::set<cg::PedestrianId> left(m.left.begin(), m.left.end());
    const std::set<cg::PedestrianId> right(m.right.begin(), m.right.end());
    if (cluster_of.at(m.left.front()) != left || cluster_of.at(m.right.front()) != right) {
      return false;
    }
    if (!(m.delta > 0)) return false;
    std::set<cg::PedestrianId> merged = left;
    merged.insert(right.begin(), right.end());
    for (auto id : merged) {
      const auto& before = cluster_of[id];
      if (!std::includes(merged.begin(), merged.end(), before.begin(), before.end())) return false;
      cluster_of[id] = merged;
    }
  }
  for (const auto& c : g.partition.clusters()) {
    if (cluster_of.at(c.front()) != std::set<cg::PedestrianId>(c.begin(), c.end())) return false;
  }
  return true;
}

Verdict GreedyProperties() {
  auto& runs = SharedRuns();
  if (runs.matrices.empty()) ClusteringOracle();
  int coherent = 0;
  for (std::size_t k = 0; k < runs.matrices.size(); ++k) {
    coherent += TraceIsCoherent(runs.matrices[k], runs.greedy[k]);
  }
  std::mt19937_64 rng(103);
  int invariant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = oracle::RandomAffinity(8, rng);
    const auto base = cg::GreedyCorrelationClustering(w).partition;
    bool same = true;
    for (double lambda : {0.1, 1.0, 7.3}) {
      same = same && cg::GreedyCorrelationClustering(w.Scaled(lambda)).partition == base;
    }
    invariant += same;
  }
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, -0.5, 1, 0, 1, -0.5, 1, 0;
  const auto chain = cg::GreedyCorrelationClustering(cg::AffinityMatrix({1, 2, 3}, m)).partition;
  const bool transitive = chain == cg::Partition{{1, 2, 3}};
  const int total = static_cast<int>(runs.matrices.size());
  return Check(coherent == total && invariant == 100 && transitive,
               Fmt("coherent traces %d/%d; scale-invariant %d/100; chain example -> %s", coherent,
                   total, invariant, cg::ToString(chain).c_str()));
}

Verdict FeatureOracles() {
  std::mt19937_64 rng(104);
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_real_distribution<double> u(-3, 3);
  double dtw_worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<cg::Point2> a(len(rng)), b(len(rng));
    for (auto& p : a) p = {u(rng), u(rng)};
    for (auto& p : b) p = {u(rng), u(rng)};
    dtw_worst = std::max(dtw_worst, std::abs(cg::DtwRawCost(a, b) - oracle::ExhaustiveDtw(a, b)));
  }
  const double median = std::abs(cg::FisherSnedecorCdf(1.0, 1.0, 1.0) - 0.5);
  double cdf_worst = 0.0;
  int grid = 0;
  for (double s : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    for (double d1 : {1.0, 2.0, 3.0, 4.0, 6.0}) {
      for (double d2 : {1.0, 5.0}) {
        cdf_worst = std::max(cdf_worst, std::abs(cg::FisherSnedecorCdf(s, d1, d2) -
                                                 oracle::QuadratureFCdf(s, d1, d2)));
        ++grid;
      }
    }
  }
  const double gmm0 = cg::GmmEval({0, 0});
  const cg::ProxemicsConfig prox;
  double closed = 0.0;
  for (double s : prox.sigmas) closed += 1.0 / (s * s);
  closed /= 8.0 * M_PI;

  // Random windows of random walks, including short and non-overlapping
  // tracks, until at least 10 000 pairs have been scored.
  int pairs = 0, out_of_range = 0;
  std::uniform_int_distribution<int> start(0, 20), length(2, 40), n_members(2, 16);
  std::normal_distribution<double> step(0.0, 0.4);
  std::uniform_real_distribution<double> pos(0.0, 20.0);
  while (pairs < 10000) {
    std::vector<cg::Trajectory> crowd;
    const int n = n_members(rng);
    for (int id = 1; id <= n; ++id) {
      const int s = start(rng), l = length(rng);
      cg::Point2 p{pos(rng), pos(rng)};
      std::vector<cg::Sample> samples;
      for (int k = 0; k < l; ++k) {
        samples.push_back({(s + k) * 0.4, p});
        p = p + cg::Point2{step(rng), step(rng)};
      }
      crowd.emplace_back(id, samples);
    }
    cg::TimeWindow w;
    w.start_t = 0.0;
    w.end_t = 25.0;
    for (const auto& t : crowd) {
      w.members.push_back(t.id());
      w.segments.push_back(t);
    }
    for (const auto& pf : cg::BuildScene(w).pairs()) {
      for (double d : pf.d) out_of_range += !(d >= 0.0 && d <= 1.0);
      ++pairs;
    }
  }
  const bool ok = dtw_worst <= 1e-9 && median <= 1e-10 && grid == 50 && cdf_worst <= 1e-8 &&
                  std::abs(gmm0 - 0.190) <= 1e-3 && std::abs(gmm0 - closed) <= 1e-15 &&
                  out_of_range == 0;
  return Check(ok, Fmt("DTW max dev %.2g; |F(1;1,1)-0.5| %.2g; quadrature max dev %.2g on %d "
                       "points; gmm(0) %.6f (closed form %.6f); %d/%d feature values outside "
                       "[0,1]",
                       dtw_worst, median, cdf_worst, grid, gmm0, closed, out_of_range, 4 * pairs));
}

std::vector<cg::Point2> Steps(const std::vector<cg::Point2>& p) {
  std::vector<cg::Point2> out;
  for (std::size_t k = 1; k < p.size(); ++k) out.push_back(p[k] - p[k - 1]);
  return out;
}

cg::Trajectory AsTrajectory(cg::PedestrianId id, const std::vector<cg::Point2>& points) {
  std::vector<cg::Sample> s;
  for (std::size_t k = 0; k < points.size(); ++k) s.push_back({0.4 * k, points[k]});
  return cg::Trajectory(id, s);
}

Verdict GrangerPlanting() {
  std::mt19937_64 rng(105);
  std::normal_distribution<double> step(0.0, 0.3), jitter(0.0, 0.02);
  std::uniform_int_distribution<int> lag_pick(1, cg::GrangerConfig{}.lag);
  std::uniform_int_distribution<int> k_pick(60, 100);
  std::vector<double> planted;
  for (int trial = 0; trial < 200; ++trial) {
    const int lag = lag_pick(rng), K = k_pick(rng);
    std::vector<cg::Point2> lead{{0, 0}};
    for (int k = 1; k < K + lag; ++k) lead.push_back(lead.back() + cg::Point2{step(rng), step(rng)});
    std::vector<cg::Point2> a, b;
    for (int k = lag; k < K + lag; ++k) {
      a.push_back(lead[k]);
      b.push_back(lead[k - lag] + cg::Point2{0.7 + jitter(rng), jitter(rng)});
    }
    planted.push_back(cg::GrangerDistance(AsTrajectory(1, a), AsTrajectory(2, b)).distance);
  }
  std::nth_element(planted.begin(), planted.begin() + planted.size() / 2, planted.end());
  const double median = planted[planted.size() / 2];

  double sum = 0.0;
  int runs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<cg::Point2> a{{0, 0}}, b{{5, 5}};
    for (int k = 1; k < 60; ++k) {
      a.push_back(a.back() + cg::Point2{step(rng), step(rng)});
      b.push_back(b.back() + cg::Point2{step(rng), step(rng)});
    }
    const auto test = cg::GrangerDirectional(Steps(a), Steps(b));
    if (!test) continue;
    sum += test->similarity;
    ++runs;
  }
  const double mean = runs ? sum / runs : 0.0;
  return Check(median < 0.05 && runs == 1000 && std::abs(mean - 0.5) <= 0.05,
               Fmt("leader-follower median d_ca %.4g over 200 pairs; independent-walk mean "
                   "directional similarity %.4f over %d trials",
                   median, mean, runs));
}

Verdict LearningConsistency() {
  std::mt19937_64 rng(106);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_w = [&] {
    cg::JointVector w;
    for (double& v : w) v = g(rng);
    return w;
  };
  double compat_worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto scene = oracle::RandomScene(n, rng);
    const auto p = oracle::RandomPartition(oracle::Members(n), rng);
    const auto w = random_w();
    compat_worst = std::max(compat_worst, std::abs(cg::Compatibility(scene, p, w) -
                                                   cg::PartitionScore(p, cg::Affinity(scene, w))));
  }

  cg::TrainConfig cfg;
  cfg.seed = 106;
  cg::BcfwTrainer trainer(cfg);
  for (int k = 0; k < 8; ++k) {
    const int n = 3 + static_cast<int>(rng() % 6);
    trainer.AddExample(cg::TrainingExample(oracle::RandomScene(n, rng),
                                           oracle::RandomPartition(oracle::Members(n), rng)));
  }
  double block_worst = 0.0;
  int gamma_bad = 0;
  for (int it = 0; it < 1000; ++it) {
    const auto log = trainer.Step();
    gamma_bad += !(log.gamma >= 0.0 && log.gamma <= 1.0);
    const auto& m = trainer.model();
    cg::JointVector sum{};
    for (const auto& b : m.blocks) {
      for (int k = 0; k < cg::kJointDim; ++k) sum[k] += b.w[k];
    }
    for (int k = 0; k < cg::kJointDim; ++k) block_worst = std::max(block_worst, std::abs(sum[k] - m.w[k]));
  }

  int bounded = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const cg::TrainingExample e(oracle::RandomScene(n, rng),
                                oracle::RandomPartition(oracle::Members(n), rng));
    const auto w = random_w();
    const auto loss = trial % 2 ? cg::LossKind::kPairwise : cg::LossKind::kGMitre;
    const double hinge = cg::LossAugmentedOracle(e, w, loss).hinge;
    bounded += hinge <= oracle::ExhaustiveLossAugmentedMax(e.scene, e.truth, w, loss) + 1e-9;
  }
  return Check(compat_worst <= 1e-9 && block_worst <= 1e-9 && gamma_bad == 0 && bounded == 200,
               Fmt("compatibility max dev %.2g; block identity max dev %.2g over 1000 steps; "
                   "%d steps with gamma outside [0,1]; oracle bounded on %d/200 windows",
                   compat_worst, block_worst, gamma_bad, bounded));
}

cg::RunResult SynthRun(const cg::SynthSpec& spec, std::uint64_t seed, cg::LossKind loss) {
  const cg::Dataset data = cg::ToDataset(cg::SynthGenerate(spec, seed));
  cg::RunConfig cfg;
  cfg.loss = loss;
  return cg::RunOnce(cfg, cg::PrepareWindows(data, cfg), seed);
}

Verdict SeparableRecovery() {
  const cg::SynthSpec spec;  // 4 groups of 2-4 at 0.6 m, 6 singletons, 200 s, lag 1
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = SynthRun(spec, seed, cg::LossKind::kGMitre);
    ok = ok && r.gmitre_mean.precision >= 0.90 && r.gmitre_mean.recall >= 0.90;
    detail += Fmt("%sseed %d P %.3f R %.3f", seed == 1 ? "" : "; ", static_cast<int>(seed),
                  r.gmitre_mean.precision, r.gmitre_mean.recall);
  }
  return Check(ok, detail);
}

Verdict LossChoice() {
  cg::SynthSpec spec;
  spec.n_groups = 3;
  spec.n_singletons = 12;
  spec.extent = 8.0;
  spec.noise = 0.3;
  spec.spacing = 1.2;
  spec.turn_noise = 0.8;
  double gm = 0.0, pw = 0.0, singleton_share = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = cg::SynthGenerate(spec, seed);
    int grouped = 0;
    for (const auto& g : data.labels.groups()) grouped += static_cast<int>(g.size());
    singleton_share += static_cast<double>(spec.n_singletons) / (grouped + spec.n_singletons) / 5;
    gm += SynthRun(spec, seed, cg::LossKind::kGMitre).gmitre_mean.f1 / 5;
    pw += SynthRun(spec, seed, cg::LossKind::kPairwise).gmitre_mean.f1 / 5;
  }
  return Check(gm > pw && singleton_share >= 0.5,
               Fmt("mean test G-MITRE f1 %.4f with G-MITRE loss vs %.4f with pairwise loss; "
                   "mean singleton share %.2f",
                   gm, pw, singleton_share));
}

Verdict DatasetReplication() {
  const char* root = std::getenv("CROWDGROUPS_BIWI_DIR");
  if (!root) return {Outcome::kSkip, "CROWDGROUPS_BIWI_DIR not set"};
  // Reference G-MITRE precision/recall (percent) per sequence.
  const std::map<std::string, std::pair<double, double>> reference{{"hotel", {97.3, 97.7}},
                                                                   {"eth", {91.8, 94.2}}};
  bool ok = true, any = false;
  std::string detail;
  for (const auto& [name, pr] : reference) {
    const auto dir = std::filesystem::path(root) / name;
    if (!std::filesystem::exists(dir / cg::kDescriptorFileName)) continue;
    any = true;
    const auto summary = cg::RunExperiment(cg::RunConfig{}, cg::LoadDataset(dir.string()));
    const double p = 100 * summary.gmitre_precision_mean, r = 100 * summary.gmitre_recall_mean;
    ok = ok && std::abs(p - pr.first) <= 10 && std::abs(r - pr.second) <= 10;
    detail += Fmt("%s%s P %.1f (ref %.1f) R %.1f (ref %.1f)", detail.empty() ? "" : "; ",
                  name.c_str(), p, pr.first, r, pr.second);
  }
  if (!any) return {Outcome::kSkip, std::string("no hotel/ or eth/ dataset under ") + root};
  return Check(ok, detail);
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime limit
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "G-MITRE exactness", 10, GMitreExactness},
      {2, "clustering oracle", 60, ClusteringOracle},
      {3, "greedy clustering properties", 0, GreedyProperties},
      {4, "feature oracles", 0, FeatureOracles},
      {5, "Granger planting", 60, GrangerPlanting},
      {6, "learning consistency", 0, LearningConsistency},
      {7, "end-to-end separable recovery", 300, SeparableRecovery},
      {8, "loss-choice effect", 0, LossChoice},
      {9, "dataset replication (optional)", 0, DatasetReplication},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (v.outcome == Outcome::kPass && c.limit_s > 0 && secs > c.limit_s) {
      v.outcome = Outcome::kFail;
      v.detail += Fmt(" [runtime limit %.0f s exceeded]", c.limit_s);
    }
    const char* tag = v.outcome == Outcome::kPass ? "PASS" : v.outcome == Outcome::kFail ? "FAIL" : "SKIP";
    failures += v.outcome == Outcome::kFail;
    std::printf("%s [%d] %s: %s (%.2f s)\n", tag, c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
