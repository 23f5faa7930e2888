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

// Pairwise social features of pedestrians sharing a time window:
//   d_ph  proxemic distance from a Gaussian mixture over Hall's zones,
//   d_sh  trajectory shape distance by dynamic time warping,
//   d_ca  Granger causality between the two motions,
//   d_he  overlap of the two decayed and diffused heat maps.
// Every component is a distance in [0, 1]: 0 means "behaves like a group".

#ifndef CROWDGROUPS_FEATURES_H_
#define CROWDGROUPS_FEATURES_H_

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crowdgroups/trajectories.h"
#include "crowdgroups/types.h"

namespace crowdgroups {

struct ProxemicsConfig {
  // Standard deviations (m) of the four isotropic mixture components:
  // intimate, personal, social and public space.
  std::array<double, 4> sigmas{0.5, 1.2, 3.7, 7.6};

  // Throws ConfigError unless strictly positive and strictly increasing.
  void Validate() const;
};

struct GrangerConfig {
  int lag = 2;

  void Validate() const;
};

enum class HeatEnergy {
  kBinary,      // a visited cell holds unit energy
  kVisitCount,  // energy grows with the number of samples in the cell
};

struct HeatmapConfig {
  double cell_edge = 0.30;  // m
  double k_s = 1e-5;        // diffusion, per cell of distance
  double k_r = 0.5;         // decay, per second of occupancy
  HeatEnergy energy = HeatEnergy::kBinary;

  void Validate() const;
};

struct FeatureConfig {
  ProxemicsConfig proxemics;
  GrangerConfig granger;
  HeatmapConfig heatmap;
  // Scale (m) of the d_sh squash raw / (raw + tau^2).
  double dtw_tau = 1.0;
  // d_ca when the Granger test cannot run (too few samples, constant
  // motion).
  double granger_fallback = 0.5;
  // d_ph and d_ca for pairs never observed at the same time.
  double no_overlap_distance = 1.0;

  void Validate() const;
};

// ---------------------------------------------------------------------------
// Proxemics

// (1/4) * sum_z N(delta | 0, sigma_z^2 I).
double GmmEval(Point2 delta, const ProxemicsConfig& cfg = {});

// Positions of `a` and `b` at their shared timestamps (within 1e-9 s).
std::vector<std::pair<Point2, Point2>> CoTimedPositions(const Trajectory& a,
                                                        const Trajectory& b);

// 1 - mean_t GMM(p_a - p_b) / GMM(0) over shared timestamps; nullopt when
// the two never co-occur.
std::optional<double> ProxemicDistance(const Trajectory& a, const Trajectory& b,
                                       const ProxemicsConfig& cfg = {});

// ---------------------------------------------------------------------------
// Shape

// gamma(A, B) / max(A, B) for the squared-Euclidean DTW recursion. Throws
// ContractError on an empty sequence.
double DtwRawCost(const std::vector<Point2>& a, const std::vector<Point2>& b);

// raw / (raw + tau^2).
double DtwShapeDistance(const Trajectory& a, const Trajectory& b,
                        double tau = 1.0);

// ---------------------------------------------------------------------------
// Causality

// Outcome of one directional Granger test, cause -> effect.
struct GrangerTest {
  double statistic = 0.0;      // S
  double numerator_dof = 0.0;
  double denominator_dof = 0.0;
  double similarity = 0.0;     // F-distribution CDF at S
};

// Tests whether the past displacements of `cause` improve the least-squares
// prediction of the displacements of `effect`. The inputs are displacement
// series on a common time base, x and y fit separately with pooled residual
// sums. Returns nullopt when there are too few samples or the restricted
// model already fits exactly.
std::optional<GrangerTest> GrangerDirectional(
    const std::vector<Point2>& effect, const std::vector<Point2>& cause,
    const GrangerConfig& cfg = {});

struct GrangerDistanceResult {
  double distance = 0.0;
  bool fallback = false;
};

// 1 - max of the two directional similarities, computed on the shared
// timestamps of `a` and `b`.
GrangerDistanceResult GrangerDistance(const Trajectory& a, const Trajectory& b,
                                      const GrangerConfig& cfg = {},
                                      double fallback = 0.5);

// ---------------------------------------------------------------------------
// Heat maps

// Axis-aligned grid. Row index follows y, column index follows x.
struct HeatGrid {
  double x0 = 0.0;
  double y0 = 0.0;
  int rows = 1;
  int cols = 1;
  double cell_edge = 0.30;

  // Cell of `p`, possibly outside [0, rows) x [0, cols).
  std::pair<int, int> CellOf(Point2 p) const;
  bool Contains(std::pair<int, int> cell) const;
};

// Smallest grid covering every segment sample in the window.
HeatGrid FitHeatGrid(const TimeWindow& window, const HeatmapConfig& cfg);

class HeatMap {
 public:
  HeatMap() = default;
  explicit HeatMap(HeatGrid grid)
      : grid_(grid), values_(static_cast<std::size_t>(grid.rows) * grid.cols) {}

  const HeatGrid& grid() const { return grid_; }
  int rows() const { return grid_.rows; }
  int cols() const { return grid_.cols; }
  double& at(int r, int c) { return values_[static_cast<std::size_t>(r) * grid_.cols + c]; }
  double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * grid_.cols + c]; }
  const std::vector<double>& values() const { return values_; }

 private:
  HeatGrid grid_;
  std::vector<double> values_;
};

// Occupancy energy E(p, q) = Ebar(p, q) * exp(-k_r * t_int(p, q)) of `seg`
// before diffusion. Each sample holds its cell until the next sample, the
// last one until `window_end`. The grid grows when the segment leaves it.
HeatMap HeatEnergyMap(const Trajectory& seg, HeatGrid grid,
                      const HeatmapConfig& cfg, double window_end);

// Diffused map H(i, j) = sum_pq E(p, q) exp(-k_s |(p - i, q - j)|), scaled
// so that its maximum is 1 (an all-zero map stays zero).
HeatMap BuildHeatMap(const Trajectory& seg, const HeatGrid& grid,
                     const HeatmapConfig& cfg, double window_end);

// Same as BuildHeatMap, without the final max scaling.
HeatMap DiffuseHeat(const HeatMap& energy, double k_s);

// 1 - cosine similarity of the two maps; 1 if either is all zero. Throws
// ContractError on a dimension mismatch.
double HeatmapDistance(const HeatMap& a, const HeatMap& b);

// ---------------------------------------------------------------------------
// Scene assembly

struct PairFeatures {
  PedestrianId a = 0;  // a < b
  PedestrianId b = 0;
  FeatureVector d{};   // d_ph, d_sh, d_ca, d_he
  bool no_overlap = false;         // d_ph and d_ca replaced
  bool granger_fallback = false;   // d_ca replaced

  JointVector Augmented() const;
};

// The learning input for one window: features of every unordered member
// pair, stored in upper-triangular order.
class WindowedScene {
 public:
  WindowedScene() = default;
  // `pairs` must hold n(n-1)/2 entries in upper-triangular order of
  // `window.members`.
  WindowedScene(TimeWindow window, std::vector<PairFeatures> pairs);

  // Scene without trajectories, for tests and synthetic inputs.
  static WindowedScene FromFeatures(std::vector<PedestrianId> members,
                                    const std::vector<FeatureVector>& pairs,
                                    int window_index = 0);

  const TimeWindow& window() const { return window_; }
  const std::vector<PedestrianId>& members() const { return window_.members; }
  std::size_t num_members() const { return window_.members.size(); }
  const std::vector<PairFeatures>& pairs() const { return pairs_; }

  // Index of member `id`; throws ContractError when absent.
  std::size_t IndexOf(PedestrianId id) const;
  // Pair of member indices i != j.
  const PairFeatures& pair(std::size_t i, std::size_t j) const;
  const JointVector& augmented(std::size_t i, std::size_t j) const;

  int no_overlap_count() const;
  int granger_fallback_count() const;

 private:
  std::size_t PairIndex(std::size_t i, std::size_t j) const;

  TimeWindow window_;
  std::vector<PairFeatures> pairs_;
  std::vector<JointVector> augmented_;
};

WindowedScene BuildScene(const TimeWindow& window, const FeatureConfig& cfg = {});

// `window,a,b,d_ph,d_sh,d_ca,d_he` with 9 significant digits.
std::string FeaturesCsv(const std::vector<WindowedScene>& scenes);

}  // namespace crowdgroups

#endif  // CROWDGROUPS_FEATURES_H_
