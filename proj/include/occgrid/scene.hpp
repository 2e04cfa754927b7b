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

#ifndef OCCGRID__SCENE_HPP_
#define OCCGRID__SCENE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "occgrid/geometry.hpp"
#include "occgrid/grid.hpp"

namespace occgrid
{

/// One clustered radar return: planar position in the sensor frame and
/// ground-relative velocity. No elevation.
struct RadarPoint
{
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  friend bool operator==(const RadarPoint &, const RadarPoint &) = default;
};

inline constexpr std::size_t kMaxRadarClusters = 128;

struct RadarFrame
{
  double timestamp = 0.0;
  std::string sensor_id;
  std::vector<RadarPoint> points;
  friend bool operator==(const RadarFrame &, const RadarFrame &) = default;
};

struct LidarSweep
{
  double timestamp = 0.0;
  std::string sensor_id;
  std::vector<Point3> points;
  friend bool operator==(const LidarSweep &, const LidarSweep &) = default;
};

enum class SensorKind : std::uint8_t { kRadar = 0, kLidar = 1 };

struct SensorMount
{
  std::string sensor_id;
  Pose2 mount_pose;  // sensor in ego frame
  SensorKind kind = SensorKind::kRadar;
  friend bool operator==(const SensorMount &, const SensorMount &) = default;
};

/// Everything recorded at one timestep.
struct SceneStep
{
  double timestamp = 0.0;
  Pose2 ego_pose;                  // ego in global frame
  std::vector<RadarFrame> radar;   // one per radar mount, mount order
  std::vector<LidarSweep> lidar;   // one per lidar mount, mount order
  friend bool operator==(const SceneStep &, const SceneStep &) = default;
};

/// One recording: mounts, grid definition and per-timestep data.
struct SceneBundle
{
  std::uint64_t seed = 0;
  GridSpec grid;
  std::vector<SensorMount> mounts;
  std::vector<SceneStep> steps;

  std::vector<SensorMount> radar_mounts() const;
  std::vector<SensorMount> lidar_mounts() const;
  /// Mount by id; throws kConfig when absent.
  const SensorMount & mount(const std::string & sensor_id) const;
  /// Radar frame of `sensor_id` at step `t`; throws kConfig when absent.
  const RadarFrame & radar_frame(std::size_t t, const std::string & sensor_id) const;
  std::size_t radar_frame_count() const;

  friend bool operator==(const SceneBundle &, const SceneBundle &) = default;
};

}  // namespace occgrid

#endif  // OCCGRID__SCENE_HPP_
