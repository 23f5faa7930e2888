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

#include "crowdgroups/features.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "crowdgroups/errors.h"
#include "crowdgroups/stats.h"

namespace crowdgroups {
namespace {

constexpr double kTimeEps = 1e-9;

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<Point2> Positions(const Trajectory& t) {
  std::vector<Point2> out;
  out.reserve(t.size());
  for (const auto& s : t.samples()) out.push_back(s.p);
  return out;
}

std::vector<Point2> Displacements(const std::vector<Point2>& p) {
  std::vector<Point2> out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] - p[i - 1]);
  return out;
}

// Residual sum of squares of the least-squares fit of y on the columns of x.
double ResidualSumOfSquares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  return (y - x * beta).squaredNorm();
}

}  // namespace

void ProxemicsConfig::Validate() const {
  for (std::size_t z = 0; z < sigmas.size(); ++z) {
    if (!(sigmas[z] > 0) || (z > 0 && !(sigmas[z] > sigmas[z - 1]))) {
      throw ConfigError("proxemic sigmas must be positive and increasing");
    }
  }
}

void GrangerConfig::Validate() const {
  if (lag < 1) throw ConfigError("Granger lag must be at least 1");
}

void HeatmapConfig::Validate() const {
  if (!(cell_edge > 0)) throw ConfigError("heat map cell edge must be positive");
  if (!(k_s >= 0) || !(k_r >= 0)) throw ConfigError("heat map k_s and k_r must be non-negative");
}

void FeatureConfig::Validate() const {
  proxemics.Validate();
  granger.Validate();
  heatmap.Validate();
  if (!(dtw_tau > 0)) throw ConfigError("DTW tau must be positive");
  if (!(granger_fallback >= 0 && granger_fallback <= 1) ||
      !(no_overlap_distance >= 0 && no_overlap_distance <= 1)) {
    throw ConfigError("fallback distances must lie in [0, 1]");
  }
}

// ---------------------------------------------------------------------------

double GmmEval(Point2 delta, const ProxemicsConfig& cfg) {
  const double r2 = SquaredNorm(delta);
  double sum = 0.0;
  for (double sigma : cfg.sigmas) {
    const double var = sigma * sigma;
    sum += std::exp(-0.5 * r2 / var) / (2.0 * std::numbers::pi * var);
  }
  return sum / static_cast<double>(cfg.sigmas.size());
}

std::vector<std::pair<Point2, Point2>> CoTimedPositions(const Trajectory& a,
                                                        const Trajectory& b) {
  std::vector<std::pair<Point2, Point2>> out;
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double dt = sa[i].t - sb[j].t;
    if (std::abs(dt) <= kTimeEps) {
      out.emplace_back(sa[i].p, sb[j].p);
      ++i;
      ++j;
    } else if (dt < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

std::optional<double> ProxemicDistance(const Trajectory& a, const Trajectory& b,
                                       const ProxemicsConfig& cfg) {
  const auto common = CoTimedPositions(a, b);
  if (common.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [pa, pb] : common) sum += GmmEval(pa - pb, cfg);
  const double mean = sum / static_cast<double>(common.size());
  return Clamp01(1.0 - mean / GmmEval({0.0, 0.0}, cfg));
}

// ---------------------------------------------------------------------------

double DtwRawCost(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  if (a.empty() || b.empty()) throw ContractError("DTW needs non-empty sequences");
  const std::size_t rows = a.size(), cols = b.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Two rolling rows of the cumulative cost gamma.
  std::vector<double> prev(cols, kInf), cur(cols, kInf);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double cost = SquaredNorm(a[i] - b[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0) best = std::min(best, prev[j]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
        if (j > 0) best = std::min(best, cur[j - 1]);
      }
      cur[j] = cost + best;
    }
    std::swap(prev, cur);
  }
  return prev[cols - 1] / static_cast<double>(std::max(rows, cols));
}

double DtwShapeDistance(const Trajectory& a, const Trajectory& b, double tau) {
  const double raw = DtwRawCost(Positions(a), Positions(b));
  return raw / (raw + tau * tau);
}

// ---------------------------------------------------------------------------

std::optional<GrangerTest> GrangerDirectional(const std::vector<Point2>& effect,
                                              const std::vector<Point2>& cause,
                                              const GrangerConfig& cfg) {
  const int m = cfg.lag;
  if (effect.size() != cause.size()) {
    throw ContractError("Granger test needs series on a common time base");
  }
  const int n = static_cast<int>(effect.size());
  const int rows = n - m;
  const int dof_per_coordinate = rows - 2 * m - 1;
  if (dof_per_coordinate < 1) return std::nullopt;

  double rss_restricted = 0.0, rss_unrestricted = 0.0, target_energy = 0.0;
  for (int c = 0; c < 2; ++c) {
    auto coord = [c](Point2 p) { return c == 0 ? p.x : p.y; };
    Eigen::VectorXd y(rows);
    Eigen::MatrixXd xr(rows, 1 + m);
    Eigen::MatrixXd xu(rows, 1 + 2 * m);
    for (int r = 0; r < rows; ++r) {
      const int t = r + m;
      y(r) = coord(effect[t]);
      xr(r, 0) = 1.0;
      xu(r, 0) = 1.0;
      for (int k = 1; k <= m; ++k) {
        xr(r, k) = coord(effect[t - k]);
        xu(r, k) = coord(effect[t - k]);
        xu(r, m + k) = coord(cause[t - k]);
      }
    }
    target_energy += (y.array() - y.mean()).square().sum();
    rss_restricted += ResidualSumOfSquares(xr, y);
    rss_unrestricted += ResidualSumOfSquares(xu, y);
  }
  // Nothing left to explain: the effect moves at constant velocity or is
  // fully predicted by its own past.
  if (!(target_energy > 0.0) || rss_restricted <= 1e-12 * target_energy) {
    return std::nullopt;
  }

  GrangerTest test;
  test.numerator_dof = 2.0 * m;
  test.denominator_dof = 2.0 * dof_per_coordinate;
  const double gain = std::max(0.0, rss_restricted - rss_unrestricted);
  if (rss_unrestricted <= 1e-15 * rss_restricted) {
    test.statistic = std::numeric_limits<double>::infinity();
  } else {
    test.statistic = (gain / test.numerator_dof) /
                     (rss_unrestricted / test.denominator_dof);
  }
  test.similarity =
      FisherSnedecorCdf(test.statistic, test.numerator_dof, test.denominator_dof);
  return test;
}

GrangerDistanceResult GrangerDistance(const Trajectory& a, const Trajectory& b,
                                      const GrangerConfig& cfg, double fallback) {
  const auto common = CoTimedPositions(a, b);
  std::vector<Point2> pa, pb;
  for (const auto& [x, y] : common) {
    pa.push_back(x);
    pb.push_back(y);
  }
  const auto va = Displacements(pa);
  const auto vb = Displacements(pb);
  const auto b_to_a = GrangerDirectional(va, vb, cfg);
  const auto a_to_b = GrangerDirectional(vb, va, cfg);
  if (!b_to_a || !a_to_b) return {fallback, true};
  return {Clamp01(1.0 - std::max(b_to_a->similarity, a_to_b->similarity)), false};
}

// ---------------------------------------------------------------------------

std::pair<int, int> HeatGrid::CellOf(Point2 p) const {
  return {static_cast<int>(std::floor((p.y - y0) / cell_edge)),
          static_cast<int>(std::floor((p.x - x0) / cell_edge))};
}

bool HeatGrid::Contains(std::pair<int, int> cell) const {
  return cell.first >= 0 && cell.first < rows && cell.second >= 0 &&
         cell.second < cols;
}

HeatGrid FitHeatGrid(const TimeWindow& window, const HeatmapConfig& cfg) {
  HeatGrid grid;
  grid.cell_edge = cfg.cell_edge;
  double x_min = std::numeric_limits<double>::infinity(), y_min = x_min;
  double x_max = -x_min, y_max = -x_min;
  for (const auto& seg : window.segments) {
    for (const auto& s : seg.samples()) {
      x_min = std::min(x_min, s.p.x);
      y_min = std::min(y_min, s.p.y);
      x_max = std::max(x_max, s.p.x);
      y_max = std::max(y_max, s.p.y);
    }
  }
  if (!std::isfinite(x_min)) return grid;
  grid.x0 = x_min;
  grid.y0 = y_min;
  grid.cols = static_cast<int>(std::floor((x_max - x_min) / cfg.cell_edge)) + 1;
  grid.rows = static_cast<int>(std::floor((y_max - y_min) / cfg.cell_edge)) + 1;
  return grid;
}

HeatMap HeatEnergyMap(const Trajectory& seg, HeatGrid grid,
                      const HeatmapConfig& cfg, double window_end) {
  int r_min = 0, c_min = 0, r_max = grid.rows - 1, c_max = grid.cols - 1;
  for (const auto& s : seg.samples()) {
    const auto [r, c] = grid.CellOf(s.p);
    r_min = std::min(r_min, r);
    c_min = std::min(c_min, c);
    r_max = std::max(r_max, r);
    c_max = std::max(c_max, c);
  }
  if (r_min < 0 || c_min < 0 || r_max >= grid.rows || c_max >= grid.cols) {
    std::clog << "heat map grid expanded to cover pedestrian " << seg.id() << "\n";
    grid.y0 += r_min * grid.cell_edge;
    grid.x0 += c_min * grid.cell_edge;
    grid.rows = r_max - r_min + 1;
    grid.cols = c_max - c_min + 1;
  }

  HeatMap occupancy(grid), visits(grid);
  const auto& samples = seg.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double until =
        i + 1 < samples.size() ? std::min(samples[i + 1].t, window_end) : window_end;
    const auto [r, c] = grid.CellOf(samples[i].p);
    occupancy.at(r, c) += std::max(0.0, until - samples[i].t);
    visits.at(r, c) += 1.0;
  }
  HeatMap energy(grid);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (visits.at(r, c) == 0.0) continue;
      const double accumulated =
          cfg.energy == HeatEnergy::kBinary ? 1.0 : visits.at(r, c);
      energy.at(r, c) = accumulated * std::exp(-cfg.k_r * occupancy.at(r, c));
    }
  }
  return energy;
}

HeatMap DiffuseHeat(const HeatMap& energy, double k_s) {
  const HeatGrid& grid = energy.grid();
  // Kernel depends only on |p - i| and |q - j|.
  std::vector<double> kernel(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int dr = 0; dr < grid.rows; ++dr) {
    for (int dc = 0; dc < grid.cols; ++dc) {
      kernel[static_cast<std::size_t>(dr) * grid.cols + dc] =
          std::exp(-k_s * std::hypot(static_cast<double>(dr), static_cast<double>(dc)));
    }
  }
  HeatMap heat(grid);
  for (int p = 0; p < grid.rows; ++p) {
    for (int q = 0; q < grid.cols; ++q) {
      const double e = energy.at(p, q);
      if (e == 0.0) continue;
      for (int i = 0; i < grid.rows; ++i) {
        const double* row = &kernel[static_cast<std::size_t>(std::abs(p - i)) * grid.cols];
        for (int j = 0; j < grid.cols; ++j) heat.at(i, j) += e * row[std::abs(q - j)];
      }
    }
  }
  return heat;
}

HeatMap BuildHeatMap(const Trajectory& seg, const HeatGrid& grid,
                     const HeatmapConfig& cfg, double window_end) {
  HeatMap heat = DiffuseHeat(HeatEnergyMap(seg, grid, cfg, window_end), cfg.k_s);
  const auto& v = heat.values();
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (peak > 0.0) {
    for (int r = 0; r < heat.rows(); ++r) {
      for (int c = 0; c < heat.cols(); ++c) heat.at(r, c) /= peak;
    }
  }
  return heat;
}

double HeatmapDistance(const HeatMap& a, const HeatMap& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError("heat maps have different dimensions");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  const auto& va = a.values();
  const auto& vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) {
    dot += va[k] * vb[k];
    na += va[k] * va[k];
    nb += vb[k] * vb[k];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  return Clamp01(1.0 - dot / std::sqrt(na * nb));
}

// ---------------------------------------------------------------------------

JointVector PairFeatures::Augmented() const {
  JointVector x{};
  for (int k = 0; k < kNumFeatures; ++k) {
    x[k] = 1.0 - d[k];
    x[kNumFeatures + k] = d[k];
  }
  return x;
}

WindowedScene::WindowedScene(TimeWindow window, std::vector<PairFeatures> pairs)
    : window_(std::move(window)), pairs_(std::move(pairs)) {
  const std::size_t n = window_.members.size();
  if (pairs_.size() != n * (n - (n > 0 ? 1 : 0)) / 2) {
    throw ContractError("scene needs one feature vector per member pair");
  }
  if (!std::is_sorted(window_.members.begin(), window_.members.end()) ||
      std::adjacent_find(window_.members.begin(), window_.members.end()) !=
          window_.members.end()) {
    throw ContractError("scene members must be sorted and unique");
  }
  augmented_.reserve(pairs_.size());
  for (const auto& p : pairs_) augmented_.push_back(p.Augmented());
}

WindowedScene WindowedScene::FromFeatures(std::vector<PedestrianId> members,
                                          const std::vector<FeatureVector>& pairs,
                                          int window_index) {
  TimeWindow w;
  w.index = window_index;
  w.members = std::move(members);
  std::vector<PairFeatures> pf;
  pf.reserve(pairs.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < w.members.size(); ++i) {
    for (std::size_t j = i + 1; j < w.members.size(); ++j) {
      if (k >= pairs.size()) throw ContractError("too few pair features");
      PairFeatures p;
      p.a = w.members[i];
      p.b = w.members[j];
      p.d = pairs[k++];
      pf.push_back(p);
    }
  }
  return WindowedScene(std::move(w), std::move(pf));
}

std::size_t WindowedScene::IndexOf(PedestrianId id) const {
  auto it = std::lower_bound(window_.members.begin(), window_.members.end(), id);
  if (it == window_.members.end() || *it != id) {
    throw ContractError("pedestrian " + std::to_string(id) + " is not in the scene");
  }
  return static_cast<std::size_t>(it - window_.members.begin());
}

std::size_t WindowedScene::PairIndex(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const std::size_t n = window_.members.size();
  if (i == j || j >= n) throw ContractError("invalid member pair");
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

const PairFeatures& WindowedScene::pair(std::size_t i, std::size_t j) const {
  return pairs_[PairIndex(i, j)];
}

const JointVector& WindowedScene::augmented(std::size_t i, std::size_t j) const {
  return augmented_[PairIndex(i, j)];
}

int WindowedScene::no_overlap_count() const {
  return static_cast<int>(std::count_if(pairs_.begin(), pairs_.end(),
                                        [](const auto& p) { return p.no_overlap; }));
}

int WindowedScene::granger_fallback_count() const {
  return static_cast<int>(std::count_if(
      pairs_.begin(), pairs_.end(), [](const auto& p) { return p.granger_fallback; }));
}

WindowedScene BuildScene(const TimeWindow& window, const FeatureConfig& cfg) {
  cfg.Validate();
  const std::size_t n = window.members.size();
  if (window.segments.size() != n) {
    throw ContractError("window needs one segment per member");
  }
  const HeatGrid grid = FitHeatGrid(window, cfg.heatmap);
  std::vector<HeatMap> heat;
  heat.reserve(n);
  for (const auto& seg : window.segments) {
    heat.push_back(BuildHeatMap(seg, grid, cfg.heatmap, window.end_t));
  }

  std::vector<PairFeatures> pairs;
  pairs.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Trajectory& a = window.segments[i];
      const Trajectory& b = window.segments[j];
      PairFeatures pf;
      pf.a = window.members[i];
      pf.b = window.members[j];
      const auto d_ph = ProxemicDistance(a, b, cfg.proxemics);
      pf.d[1] = DtwShapeDistance(a, b, cfg.dtw_tau);
      if (d_ph) {
        pf.d[0] = *d_ph;
        const auto ca = GrangerDistance(a, b, cfg.granger, cfg.granger_fallback);
        pf.d[2] = ca.distance;
        pf.granger_fallback = ca.fallback;
      } else {
        pf.d[0] = cfg.no_overlap_distance;
        pf.d[2] = cfg.no_overlap_distance;
        pf.no_overlap = true;
      }
      pf.d[3] = HeatmapDistance(heat[i], heat[j]);
      pairs.push_back(pf);
    }
  }
  return WindowedScene(window, std::move(pairs));
}

std::string FeaturesCsv(const std::vector<WindowedScene>& scenes) {
  std::string out = "window,a,b,d_ph,d_sh,d_ca,d_he\n";
  char buf[256];
  for (const auto& scene : scenes) {
    for (const auto& p : scene.pairs()) {
      std::snprintf(buf, sizeof(buf), "%d,%lld,%lld,%.9g,%.9g,%.9g,%.9g\n",
                    scene.window().index, static_cast<long long>(p.a),
                    static_cast<long long>(p.b), p.d[0], p.d[1], p.d[2], p.d[3]);
      out += buf;
    }
  }
  return out;
}

}  // namespace crowdgroups
