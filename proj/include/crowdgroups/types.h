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

#ifndef CROWDGROUPS_TYPES_H_
#define CROWDGROUPS_TYPES_H_

#include <array>
#include <cmath>
#include <cstdint>

namespace crowdgroups {

using PedestrianId = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double SquaredNorm(Point2 p) { return p.x * p.x + p.y * p.y; }
inline double Norm(Point2 p) { return std::sqrt(SquaredNorm(p)); }

// Number of pairwise social features: proxemics, shape, causality, heat.
inline constexpr int kNumFeatures = 4;
// Length of the augmented pair vector [1 - d; d] and of the weight vector
// [alpha; beta].
inline constexpr int kJointDim = 2 * kNumFeatures;

using FeatureVector = std::array<double, kNumFeatures>;
using JointVector = std::array<double, kJointDim>;

inline double Dot(const JointVector& a, const JointVector& b) {
  double s = 0.0;
  for (int k = 0; k < kJointDim; ++k) s += a[k] * b[k];
  return s;
}

inline double SquaredNorm(const JointVector& v) { return Dot(v, v); }

}  // namespace crowdgroups

#endif  // CROWDGROUPS_TYPES_H_
