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

// Trajectory ingestion, ground-plane projection, time windowing and scene
// density statistics.

#ifndef CROWDGROUPS_TRAJECTORIES_H_
#define CROWDGROUPS_TRAJECTORIES_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "crowdgroups/types.h"

namespace crowdgroups {

class Partition;

struct Sample {
  double t = 0.0;  // seconds
  Point2 p;        // meters on the ground plane
};

// Time-stamped positions of one pedestrian. Samples are strictly increasing
// in time and there is at least one of them.
class Trajectory {
 public:
  // Sorts `samples` by time. Throws DataError on an empty list or on
  // duplicate timestamps.
  Trajectory(PedestrianId id, std::vector<Sample> samples);

  PedestrianId id() const { return id_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double start_time() const { return samples_.front().t; }
  double end_time() const { return samples_.back().t; }

 private:
  PedestrianId id_;
  std::vector<Sample> samples_;
};

// 3x3 projective map from image pixels to ground-plane meters, row-major.
class Homography {
 public:
  static constexpr double kDefaultEpsilon = 1e-12;

  // Throws ConfigError when |det(h)| <= epsilon.
  explicit Homography(const std::array<double, 9>& h,
                      double epsilon = kDefaultEpsilon);

  static Homography Identity();

  const std::array<double, 9>& matrix() const { return h_; }

 private:
  std::array<double, 9> h_;
};

// Returns (x'/w', y'/w') with (x', y', w') = h * (x, y, 1). Throws DataError
// when |w'| is below `epsilon`.
Point2 ApplyHomography(const Homography& h, Point2 pixel,
                       double epsilon = Homography::kDefaultEpsilon);

enum class Units { kMeters, kPixels };

struct LoadOptions {
  // Frames per second; time = frame / fps.
  double fps = 1.0;
  Units units = Units::kMeters;
  // Required when units are pixels.
  std::optional<Homography> homography;
};

// Parses `<frame> <ped_id> <x> <y>` lines ('#' comments allowed). Returns one
// trajectory per pedestrian id, ordered by id.
std::vector<Trajectory> LoadTrajectories(const std::string& path,
                                         const LoadOptions& options = {});
// Same as LoadTrajectories but reads from a string; `source` names it in
// error messages.
std::vector<Trajectory> ParseTrajectories(const std::string& text,
                                          const LoadOptions& options,
                                          const std::string& source = "<text>");

// Writes trajectories in the format read by LoadTrajectories, converting time
// back to frames with `fps`.
std::string FormatTrajectories(const std::vector<Trajectory>& trajectories,
                               double fps);

// Reads 9 whitespace-separated floats (row-major).
Homography LoadHomography(const std::string& path);

// Sequence-global group annotation. Pedestrians not listed are singletons.
class GroundTruthLabels {
 public:
  GroundTruthLabels() = default;
  // Groups of size < 2 are dropped. Throws DataError if a pedestrian appears
  // in more than one group.
  explicit GroundTruthLabels(std::vector<std::vector<PedestrianId>> groups);

  const std::vector<std::vector<PedestrianId>>& groups() const {
    return groups_;
  }
  // Index of the group containing `id`, if any.
  std::optional<std::size_t> GroupOf(PedestrianId id) const;

 private:
  std::vector<std::vector<PedestrianId>> groups_;
};

GroundTruthLabels ParseGroundTruth(const std::string& text,
                                   const std::string& source = "<text>");
GroundTruthLabels LoadGroundTruth(const std::string& path);
std::string FormatGroundTruth(const GroundTruthLabels& labels);

struct TimeWindow {
  int index = 0;
  double start_t = 0.0;
  double end_t = 0.0;
  // Sorted ids of pedestrians with at least two samples inside the window.
  std::vector<PedestrianId> members;
  // segments[i] holds the in-window samples of members[i].
  std::vector<Trajectory> segments;
  // Pedestrians with exactly one in-window sample.
  std::vector<PedestrianId> dropped;

  double length() const { return end_t - start_t; }
};

struct SliceOptions {
  double window_len = 10.0;
  double stride = 10.0;
  // Duration covered by the last sample of the sequence. Zero means infer it
  // as the smallest positive step between consecutive samples.
  double sample_period = 0.0;
};

// Tiles the sequence span [t_min, t_max + sample_period) with windows that
// start every `stride` seconds. Only windows fully inside the span are kept.
std::vector<TimeWindow> SliceWindows(const std::vector<Trajectory>& trajectories,
                                     const SliceOptions& options);

// Restricts the sequence-global groups to the window members.
Partition WindowGroundTruth(const TimeWindow& window,
                            const GroundTruthLabels& labels);

struct SceneStats {
  std::optional<double> d_in;   // group compactness (m)
  std::optional<double> d_out;  // group isolation (m)
  std::optional<double> d_io;   // d_in / d_out
};

// d_in averages intra-group member distances over co-present pairs and
// frames. d_out averages, over group members and frames, the distance to the
// nearest pedestrian outside the member's group.
SceneStats ComputeSceneStats(const std::vector<TimeWindow>& windows,
                             const GroundTruthLabels& labels);

// Key-value dataset descriptor (`fps`, `units`, `homography`, ...).
struct DatasetDescriptor {
  double fps = 1.0;
  Units units = Units::kMeters;
  std::string homography;            // path relative to the descriptor
  std::string trajectories = "trajectories.txt";
  std::string groups = "groups.txt";
};

struct Dataset {
  DatasetDescriptor descriptor;
  std::vector<Trajectory> trajectories;
  std::optional<GroundTruthLabels> labels;
};

inline constexpr const char* kDescriptorFileName = "dataset.txt";

DatasetDescriptor ParseDatasetDescriptor(const std::string& text,
                                         const std::string& source = "<text>");
std::string FormatDatasetDescriptor(const DatasetDescriptor& descriptor);

// Loads `<dir>/dataset.txt` and the files it names. A missing descriptor
// means meters at 1 fps; a missing groups file leaves `labels` empty.
Dataset LoadDataset(const std::string& dir);

}  // namespace crowdgroups

#endif  // CROWDGROUPS_TRAJECTORIES_H_
