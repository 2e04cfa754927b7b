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


#ifndef OCCGRID__SIMWORLD_HPP_
#define OCCGRID__SIMWORLD_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "occgrid/geometry.hpp"
#include "occgrid/scene.hpp"

namespace occgrid
{

struct Rect
{
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  friend bool operator==(const Rect &, const Rect &) = default;
};

struct Circle
{
  Point2 c;
  double r = 0.0;
  friend bool operator==(const Circle &, const Circle &) = default;
};

/// Static planar world: axis-aligned rectangles and circles.
struct WorldMap
{
  std::vector<Rect> rects;
  std::vector<Circle> circles;
  Point2 lo;
  Point2 hi;

  bool empty() const { return rects.empty() && circles.empty(); }
  /// Distance along the unit direction `dir` from `p` to the first obstacle
  /// surface, if any lies within `max_t`.
  std::optional<double> raycast(Point2 p, Point2 dir, double max_t) const;
  /// True when the open segment a -> b passes through an obstacle interior.
  bool segment_blocked(Point2 a, Point2 b) const;
  /// Boundary samples of every obstacle, `spacing` apart along the outline.
  std::vector<Point2> surface_samples(double spacing) const;

  friend bool operator==(const WorldMap &, const WorldMap &) = default;
};

/// Street-like world along +x. The band |y| <= corridor_half_width is kept
/// free for the trajectory; obstacles are building blocks, parked cars and
/// poles beside it.
struct WorldParams
{
  int n_obstacles = 60;
  double x_min = -110.0;
  double x_max = 230.0;
  double y_half = 45.0;
  double corridor_half_width = 4.0;
  double building_prob = 0.3;
  double car_prob = 0.4;    // remainder are poles
  int max_retries = 200;

  void validate() const;
};

WorldMap gen_world(std::uint64_t seed, const WorldParams & params);

struct TrajectoryParams
{
  double dt = 0.1;               // s
  double max_yaw_rate = 0.15;    // rad/s
  double lateral_gain = 0.02;    // yaw-rate response to lateral offset
  double heading_gain = 0.5;     // yaw-rate response to heading error
  double yaw_noise = 0.05;       // rad/s
  Point2 start{0.0, 0.0};
};

/// Unicycle path starting at params.start heading +x. The yaw rate never
/// exceeds max_yaw_rate, so heading changes by at most max_yaw_rate * dt
/// per step.
std::vector<Pose2> gen_trajectory(
  const WorldMap & world, std::uint64_t seed, std::size_t steps, double speed,
  const TrajectoryParams & params);

struct LidarSensorParams
{
  double angular_resolution = deg2rad(0.5);
  double max_range = 70.0;
  double sigma_range = 0.03;
  double z_height = 1.0;
};

struct RadarSensorParams
{
  double fov_half_angle = deg2rad(60.0);
  double max_range = 90.0;
  double detection_prob = 0.15;
  double sigma_range = 0.5;
  double sigma_azimuth = deg2rad(1.0);
  double clutter_rate = 2.0;
  double dynamic_clutter_rate = 1.0;
  std::size_t max_clusters = kMaxRadarClusters;
  double surface_spacing = 0.8;   // m between surface samples

  void validate() const;
};

/// Points in the sensor frame.
LidarSweep sense_lidar(
  const WorldMap & world, const Pose2 & ego_pose, const SensorMount & mount,
  const LidarSensorParams & params, Rng & rng);

/// Detections in the sensor frame. `surface` are the world's surface
/// samples at params.surface_spacing; pass them to avoid recomputing per
/// frame.
RadarFrame sense_radar(
  const WorldMap & world, const std::vector<Point2> & surface, const Pose2 & ego_pose,
  const SensorMount & mount, const RadarSensorParams & params, Rng & rng);
RadarFrame sense_radar(
  const WorldMap & world, const Pose2 & ego_pose, const SensorMount & mount,
  const RadarSensorParams & params, Rng & rng);

/// Front radar, two rear-corner radars and one roof lidar.
std::vector<SensorMount> default_mounts();

struct SceneParams
{
  std::size_t steps = 120;
  double speed = 8.0;          // m/s
  WorldParams world;
  TrajectoryParams trajectory;
  LidarSensorParams lidar;
  RadarSensorParams radar;
  std::vector<SensorMount> mounts = default_mounts();
  GridSpec grid = GridSpec::standard();
};

SceneBundle gen_scene(std::uint64_t seed, const SceneParams & params);
/// The world a scene was generated in.
WorldMap scene_world(std::uint64_t seed, const SceneParams & params);

}  // namespace occgrid

#endif  // OCCGRID__SIMWORLD_HPP_
