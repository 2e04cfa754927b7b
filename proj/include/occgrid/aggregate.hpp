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

#ifndef OCCGRID__AGGREGATE_HPP_
#define OCCGRID__AGGREGATE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "occgrid/grid.hpp"
#include "occgrid/scene.hpp"

namespace occgrid
{

struct AggregationConfig
{
  int frames = 1;                    // k, number of aggregated frames
  double velocity_threshold = 0.5;   // m/s
};

/// Keep the points whose speed does not exceed `v_thresh`.
RadarFrame filter_dynamic(const RadarFrame & frame, double v_thresh);

/// Pose taking points from the sensor frame at `ego_from` into the sensor
/// frame at `ego_to`.
Pose2 relative_sensor_pose(const Pose2 & ego_from, const Pose2 & ego_to, const Pose2 & mount);

/// Ego-motion compensated aggregation of k frames of one sensor into the
/// sensor frame of the last one. Each frame is velocity-filtered first.
std::vector<Point2> aggregate_frames(
  std::span<const RadarFrame> frames, std::span<const Pose2> ego_poses, const SensorMount & mount,
  const AggregationConfig & cfg);

/// Binary bird's-eye-view occupancy of the points; out-of-grid points are
/// dropped.
MaskGrid rasterize_bev(std::span<const Point2> points, const GridSpec & spec);

/// Half-open step range [begin, end).
struct Window
{
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t last() const { return end - 1; }
  friend bool operator==(const Window &, const Window &) = default;
};

/// Non-overlapping windows of `k` frames over `steps` timesteps. Window i
/// ends at step (i + 1) * stride - 1; `stride` defaults to k. A stride
/// larger than k keeps window ends fixed while k varies.
std::vector<Window> make_windows(std::size_t steps, std::size_t k, std::size_t stride = 0);

/// Frames and poses of one radar over a window, ready for aggregation.
struct WindowData
{
  std::vector<RadarFrame> frames;
  std::vector<Pose2> ego_poses;
};

WindowData window_data(const SceneBundle & scene, const std::string & sensor_id, Window w);

/// Aggregate + rasterize a window of one radar: the network and ray-trace
/// input.
MaskGrid window_input(
  const SceneBundle & scene, const std::string & sensor_id, Window w, const GridSpec & spec,
  double velocity_threshold);

}  // namespace occgrid

#endif  // OCCGRID__AGGREGATE_HPP_
