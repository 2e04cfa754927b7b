// Copyright 2026 The occgrid Authors
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

#ifndef OCCGRID__GEOMETRY_HPP_
#define OCCGRID__GEOMETRY_HPP_

#include <span>
#include <vector>

#include "occgrid/common.hpp"

namespace occgrid
{

/// Wrap an angle into (-pi, pi].
double normalize_angle(double a);

/// Rigid motion in the plane. Applying a pose rotates by `yaw`, then
/// translates by (x, y).
struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  static Pose2 identity() { return {}; }
  friend bool operator==(const Pose2 &, const Pose2 &) = default;
};

/// a * b: apply b first, then a.
Pose2 compose(const Pose2 & a, const Pose2 & b);
Pose2 invert(const Pose2 & a);

Point2 apply(const Pose2 & pose, Point2 p);
/// 3-D point under a planar pose; z passes through.
Point3 apply(const Pose2 & pose, const Point3 & p);

std::vector<Point2> transform_points(const Pose2 & pose, std::span<const Point2> pts);

}  // namespace occgrid

#endif  // OCCGRID__GEOMETRY_HPP_
