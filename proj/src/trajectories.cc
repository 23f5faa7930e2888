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

#include "crowdgroups/trajectories.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "crowdgroups/errors.h"
#include "crowdgroups/keyvalue.h"
#include "crowdgroups/partitioning.h"

namespace crowdgroups {
namespace {

// Slack for comparing timestamps derived from frame / fps arithmetic.
constexpr double kTimeEps = 1e-9;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool ParseInt(const std::string& token, long long* out) {
  char* end = nullptr;
  *out = std::strtoll(token.c_str(), &end, 10);
  return !token.empty() && *end == '\0';
}

bool ParseDouble(const std::string& token, double* out) {
  char* end = nullptr;
  *out = std::strtod(token.c_str(), &end);
  return !token.empty() && *end == '\0' && std::isfinite(*out);
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool IsBlankOrComment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

Trajectory::Trajectory(PedestrianId id, std::vector<Sample> samples)
    : id_(id), samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw DataError("trajectory " + std::to_string(id) + " has no samples");
  }
  std::stable_sort(samples_.begin(), samples_.end(),
                   [](const Sample& a, const Sample& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t)) {
      throw DataError("trajectory " + std::to_string(id) +
                      " has duplicate timestamp " +
                      std::to_string(samples_[i].t));
    }
  }
}

Homography::Homography(const std::array<double, 9>& h, double epsilon) : h_(h) {
  const double det = h[0] * (h[4] * h[8] - h[5] * h[7]) -
                     h[1] * (h[3] * h[8] - h[5] * h[6]) +
                     h[2] * (h[3] * h[7] - h[4] * h[6]);
  if (!(std::abs(det) > epsilon)) {
    throw ConfigError("singular homography (|det| = " +
                      std::to_string(std::abs(det)) + ")");
  }
}

Homography Homography::Identity() {
  return Homography({1, 0, 0, 0, 1, 0, 0, 0, 1});
}

Point2 ApplyHomography(const Homography& h, Point2 pixel, double epsilon) {
  const auto& m = h.matrix();
  const double x = m[0] * pixel.x + m[1] * pixel.y + m[2];
  const double y = m[3] * pixel.x + m[4] * pixel.y + m[5];
  const double w = m[6] * pixel.x + m[7] * pixel.y + m[8];
  if (!(std::abs(w) >= epsilon)) {
    throw DataError("degenerate projection: homogeneous coordinate " +
                    std::to_string(w));
  }
  return {x / w, y / w};
}

std::vector<Trajectory> ParseTrajectories(const std::string& text,
                                          const LoadOptions& options,
                                          const std::string& source) {
  if (!(options.fps > 0)) throw ConfigError("fps must be positive");
  if (options.units == Units::kPixels && !options.homography) {
    throw ConfigError(source + ": pixel coordinates need a homography");
  }
  std::map<PedestrianId, std::vector<Sample>> by_id;
  std::set<std::pair<PedestrianId, long long>> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlankOrComment(line)) continue;
    const auto tok = Tokens(line);
    long long frame = 0, id = 0;
    double x = 0, y = 0;
    if (tok.size() != 4 || !ParseInt(tok[0], &frame) || !ParseInt(tok[1], &id) ||
        !ParseDouble(tok[2], &x) || !ParseDouble(tok[3], &y)) {
      throw ParseError(source, lineno,
                       "expected '<frame:int> <ped_id:int> <x> <y>'");
    }
    if (!seen.insert({id, frame}).second) {
      throw DataError(source + ":" + std::to_string(lineno) +
                      ": duplicate sample for pedestrian " +
                      std::to_string(id) + " at frame " + std::to_string(frame));
    }
    Point2 p{x, y};
    if (options.units == Units::kPixels) p = ApplyHomography(*options.homography, p);
    by_id[id].push_back({static_cast<double>(frame) / options.fps, p});
  }
  std::vector<Trajectory> out;
  out.reserve(by_id.size());
  for (auto& [id, samples] : by_id) out.emplace_back(id, std::move(samples));
  return out;
}

std::vector<Trajectory> LoadTrajectories(const std::string& path,
                                         const LoadOptions& options) {
  return ParseTrajectories(ReadFile(path), options, path);
}

std::string FormatTrajectories(const std::vector<Trajectory>& trajectories,
                               double fps) {
  struct Row {
    long long frame;
    PedestrianId id;
    Point2 p;
  };
  std::vector<Row> rows;
  for (const auto& tr : trajectories) {
    for (const auto& s : tr.samples()) {
      rows.push_back({std::llround(s.t * fps), tr.id(), s.p});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });
  std::string out;
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld %lld %.9g %.9g\n", r.frame,
                  static_cast<long long>(r.id), r.p.x, r.p.y);
    out += buf;
  }
  return out;
}

Homography LoadHomography(const std::string& path) {
  const auto tok = Tokens(ReadFile(path));
  if (tok.size() != 9) throw ParseError(path, 0, "expected 9 numbers");
  std::array<double, 9> h{};
  for (int i = 0; i < 9; ++i) {
    if (!ParseDouble(tok[i], &h[i])) throw ParseError(path, 0, "bad number '" + tok[i] + "'");
  }
  return Homography(h);
}

GroundTruthLabels::GroundTruthLabels(
    std::vector<std::vector<PedestrianId>> groups) {
  std::set<PedestrianId> seen;
  for (auto& g : groups) {
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    if (g.size() < 2) continue;
    for (PedestrianId id : g) {
      if (!seen.insert(id).second) {
        throw DataError("pedestrian " + std::to_string(id) +
                        " listed in more than one group");
      }
    }
    groups_.push_back(std::move(g));
  }
  std::sort(groups_.begin(), groups_.end());
}

std::optional<std::size_t> GroundTruthLabels::GroupOf(PedestrianId id) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (std::binary_search(groups_[i].begin(), groups_[i].end(), id)) return i;
  }
  return std::nullopt;
}

GroundTruthLabels ParseGroundTruth(const std::string& text,
                                   const std::string& source) {
  std::vector<std::vector<PedestrianId>> groups;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlankOrComment(line)) continue;
    std::vector<PedestrianId> g;
    for (const auto& tok : Tokens(line)) {
      long long id = 0;
      if (!ParseInt(tok, &id)) throw ParseError(source, lineno, "bad pedestrian id '" + tok + "'");
      g.push_back(id);
    }
    groups.push_back(std::move(g));
  }
  return GroundTruthLabels(std::move(groups));
}

GroundTruthLabels LoadGroundTruth(const std::string& path) {
  return ParseGroundTruth(ReadFile(path), path);
}

std::string FormatGroundTruth(const GroundTruthLabels& labels) {
  std::string out;
  for (const auto& g : labels.groups()) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(g[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<TimeWindow> SliceWindows(const std::vector<Trajectory>& trajectories,
                                     const SliceOptions& options) {
  if (!(options.window_len > 0) || !(options.stride > 0)) {
    throw ConfigError("window length and stride must be positive");
  }
  if (trajectories.empty()) return {};

  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -std::numeric_limits<double>::infinity();
  double period = options.sample_period;
  const bool infer_period = !(period > 0);
  if (infer_period) period = std::numeric_limits<double>::infinity();
  for (const auto& tr : trajectories) {
    t_min = std::min(t_min, tr.start_time());
    t_max = std::max(t_max, tr.end_time());
    if (infer_period) {
      for (std::size_t i = 1; i < tr.size(); ++i) {
        period = std::min(period, tr.samples()[i].t - tr.samples()[i - 1].t);
      }
    }
  }
  if (!std::isfinite(period)) period = 0.0;
  const double span_end = t_max + period;

  std::vector<const Trajectory*> by_id;
  for (const auto& tr : trajectories) by_id.push_back(&tr);
  std::sort(by_id.begin(), by_id.end(),
            [](const Trajectory* a, const Trajectory* b) { return a->id() < b->id(); });

  std::vector<TimeWindow> windows;
  for (int k = 0;; ++k) {
    const double start = t_min + k * options.stride;
    const double end = start + options.window_len;
    if (end > span_end + kTimeEps) break;
    TimeWindow w;
    w.index = k;
    w.start_t = start;
    w.end_t = end;
    for (const Trajectory* tr : by_id) {
      std::vector<Sample> inside;
      for (const auto& s : tr->samples()) {
        if (s.t >= start - kTimeEps && s.t < end - kTimeEps) inside.push_back(s);
      }
      if (inside.size() >= 2) {
        w.members.push_back(tr->id());
        w.segments.emplace_back(tr->id(), std::move(inside));
      } else if (inside.size() == 1) {
        w.dropped.push_back(tr->id());
      }
    }
    if (!w.dropped.empty()) {
      std::clog << "window " << k << ": dropped " << w.dropped.size()
                << " pedestrian(s) with a single sample\n";
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

Partition WindowGroundTruth(const TimeWindow& window,
                            const GroundTruthLabels& labels) {
  std::vector<Partition::Cluster> clusters;
  std::set<PedestrianId> assigned;
  for (const auto& g : labels.groups()) {
    Partition::Cluster c;
    for (PedestrianId id : g) {
      if (std::binary_search(window.members.begin(), window.members.end(), id)) {
        c.push_back(id);
      }
    }
    if (c.size() >= 2) {
      assigned.insert(c.begin(), c.end());
      clusters.push_back(std::move(c));
    }
  }
  for (PedestrianId id : window.members) {
    if (!assigned.count(id)) clusters.push_back({id});
  }
  return Partition(std::move(clusters));
}

SceneStats ComputeSceneStats(const std::vector<TimeWindow>& windows,
                             const GroundTruthLabels& labels) {
  double in_sum = 0.0, out_sum = 0.0;
  long long in_count = 0, out_count = 0;
  for (const auto& w : windows) {
    struct Present {
      PedestrianId id;
      std::optional<std::size_t> group;
      Point2 p;
    };
    std::map<long long, std::vector<Present>> frames;
    for (const auto& seg : w.segments) {
      const auto group = labels.GroupOf(seg.id());
      for (const auto& s : seg.samples()) {
        frames[std::llround(s.t * 1e6)].push_back({seg.id(), group, s.p});
      }
    }
    for (const auto& [key, present] : frames) {
      for (std::size_t i = 0; i < present.size(); ++i) {
        if (!present[i].group) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < present.size(); ++j) {
          if (i == j) continue;
          const double dist = Norm(present[i].p - present[j].p);
          if (present[j].group == present[i].group) {
            if (j > i) {
              in_sum += dist;
              ++in_count;
            }
          } else {
            nearest = std::min(nearest, dist);
          }
        }
        if (std::isfinite(nearest)) {
          out_sum += nearest;
          ++out_count;
        }
      }
    }
  }
  SceneStats stats;
  if (in_count > 0) stats.d_in = in_sum / in_count;
  if (out_count > 0) stats.d_out = out_sum / out_count;
  if (stats.d_in && stats.d_out && *stats.d_out > 0) {
    stats.d_io = *stats.d_in / *stats.d_out;
  }
  return stats;
}

DatasetDescriptor ParseDatasetDescriptor(const std::string& text,
                                         const std::string& source) {
  const auto kv = KeyValues::Parse(text, source);
  DatasetDescriptor d;
  for (const auto& [key, value] : kv.entries()) {
    if (key == "fps") {
      d.fps = *kv.GetDouble(key);
      if (!(d.fps > 0)) throw ConfigError(source + ": fps must be positive");
    } else if (key == "units") {
      if (value == "meters") {
        d.units = Units::kMeters;
      } else if (value == "pixels") {
        d.units = Units::kPixels;
      } else {
        throw ConfigError(source + ": units must be 'meters' or 'pixels'");
      }
    } else if (key == "homography") {
      d.homography = value;
    } else if (key == "trajectories") {
      d.trajectories = value;
    } else if (key == "groups") {
      d.groups = value;
    } else {
      throw ConfigError(source + ": unknown key '" + key + "'");
    }
  }
  if (d.units == Units::kPixels && d.homography.empty()) {
    throw ConfigError(source + ": pixel units need a homography");
  }
  return d;
}

std::string FormatDatasetDescriptor(const DatasetDescriptor& d) {
  char fps[64];
  std::snprintf(fps, sizeof(fps), "%.17g", d.fps);
  std::string out = std::string("fps = ") + fps + "\n";
  out += std::string("units = ") +
         (d.units == Units::kPixels ? "pixels" : "meters") + "\n";
  if (!d.homography.empty()) out += "homography = \"" + d.homography + "\"\n";
  out += "trajectories = \"" + d.trajectories + "\"\n";
  out += "groups = \"" + d.groups + "\"\n";
  return out;
}

Dataset LoadDataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw DataError("not a dataset directory: " + dir);
  Dataset ds;
  const fs::path descriptor = root / kDescriptorFileName;
  if (fs::exists(descriptor)) {
    ds.descriptor = ParseDatasetDescriptor(ReadFile(descriptor.string()),
                                           descriptor.string());
  }
  LoadOptions options;
  options.fps = ds.descriptor.fps;
  options.units = ds.descriptor.units;
  if (!ds.descriptor.homography.empty()) {
    options.homography = LoadHomography((root / ds.descriptor.homography).string());
  }
  ds.trajectories =
      LoadTrajectories((root / ds.descriptor.trajectories).string(), options);
  const fs::path groups = root / ds.descriptor.groups;
  if (fs::exists(groups)) ds.labels = LoadGroundTruth(groups.string());
  return ds;
}

}  // namespace crowdgroups
