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

#ifndef OCCGRID__AUTOLABEL_HPP_
#define OCCGRID__AUTOLABEL_HPP_

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "occgrid/concave_hull.hpp"
#include "occgrid/grid.hpp"
#include "occgrid/scene.hpp"

namespace occgrid
{

struct LabelConfig
{
  int min_count = 2;
  double z_min = 0.3;
  double z_max = 2.5;
  int morph_kernel = 3;
  double alpha = 4.0;                        // hull circumradius bound, m
  double fov_half_angle = deg2rad(60.0);
  double max_range = 86.0;
  double hull_thinning = 0.2;                // voxel size for hull input, m

  void validate() const;
};

/// All lidar sweeps of the scene in global coordinates, sweep order.
std::vector<Point3> aggregate_lidar(const SceneBundle & scene);

/// Points with z in [z_min, z_max] binned into the grid of a radar whose
/// pose in the global frame is `radar_pose`.
CountGrid project_count_grid(
  std::span<const Point3> points, const Pose2 & radar_pose, const GridSpec & spec, double z_min,
  double z_max);

MaskGrid threshold_counts(const CountGrid & counts, int min_count);

/// Dilation, border-seeded hole filling (4-connected), erosion. The square
/// structuring element has side `kernel`.
MaskGrid morph_clean(const MaskGrid & mask, int kernel);

/// Visibility labels seen from a sensor at the grid frame origin.
LabelGrid make_label_grid(
  const MaskGrid & mask, const GridSpec & spec, double fov_half_angle, double max_range);

/// Cells whose centres, mapped to the global frame, fall outside the hull
/// become Ignore.
LabelGrid apply_ignore_mask(const LabelGrid & grid, const HullIndex & hull, const Pose2 & radar_pose);
LabelGrid apply_ignore_mask(const LabelGrid & grid, const HullPolygon & hull, const Pose2 & radar_pose);

/// One point per `voxel` square (first occurrence), in input order.
std::vector<Point2> thin_points(std::span<const Point3> points, double voxel);

/// Scene-level labeling state: the aggregated lidar cloud and its concave
/// hull are computed once and reused for every radar frame.
class SceneLabeler
{
public:
  SceneLabeler(const SceneBundle & scene, const LabelConfig & cfg);

  /// Ground truth for the radar `sensor_id` at step `t`, in its grid.
  LabelGrid label(const std::string & sensor_id, std::size_t t, const GridSpec & spec) const;
  /// Same without the hull mask.
  LabelGrid label_unmasked(const std::string & sensor_id, std::size_t t, const GridSpec & spec) const;

  /// Built on first use; throws kDegenerate when the cloud has no area.
  const HullPolygon & hull() const;
  const std::vector<Point3> & cloud() const { return cloud_; }

private:
  const SceneBundle & scene_;
  LabelConfig cfg_;
  std::vector<Point3> cloud_;
  mutable std::once_flag hull_once_;
  mutable HullPolygon hull_;
  mutable std::unique_ptr<HullIndex> index_;
};

}  // namespace occgrid

#endif  // OCCGRID__AUTOLABEL_HPP_
