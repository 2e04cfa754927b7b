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

#include "occgrid/aggregate.hpp"

#include <cmath>

namespace occgrid
{

std::vector<SensorMount> SceneBundle::radar_mounts() const
{
  std::vector<SensorMount> out;
  for (const auto & m : mounts) {
    if (m.kind == SensorKind::kRadar) {
      out.push_back(m);
    }
  }
  return out;
}

std::vector<SensorMount> SceneBundle::lidar_mounts() const
{
  std::vector<SensorMount> out;
  for (const auto & m : mounts) {
    if (m.kind == SensorKind::kLidar) {
      out.push_back(m);
    }
  }
  return out;
}

const SensorMount & SceneBundle::mount(const std::string & sensor_id) const
{
  for (const auto & m : mounts) {
    if (m.sensor_id == sensor_id) {
      return m;
    }
  }
  throw Error(ErrorCategory::kConfig, "scene has no sensor '" + sensor_id + "'");
}

const RadarFrame & SceneBundle::radar_frame(std::size_t t, const std::string & sensor_id) const
{
  if (t >= steps.size()) {
    throw Error(ErrorCategory::kConfig, "radar_frame: step out of range");
  }
  for (const auto & f : steps[t].radar) {
    if (f.sensor_id == sensor_id) {
      return f;
    }
  }
  throw Error(ErrorCategory::kConfig, "step has no radar frame for '" + sensor_id + "'");
}

std::size_t SceneBundle::radar_frame_count() const
{
  std::size_t n = 0;
  for (const auto & s : steps) {
    n += s.radar.size();
  }
  return n;
}

RadarFrame filter_dynamic(const RadarFrame & frame, double v_thresh)
{
  RadarFrame out;
  out.timestamp = frame.timestamp;
  out.sensor_id = frame.sensor_id;
  for (const RadarPoint & p : frame.points) {
    if (std::sqrt(p.vx * p.vx + p.vy * p.vy) <= v_thresh) {
      out.points.push_back(p);
    }
  }
  return out;
}

Pose2 relative_sensor_pose(const Pose2 & ego_from, const Pose2 & ego_to, const Pose2 & mount)
{
  // sensor_t <- ego_t <- world <- ego_j <- sensor_j
  return compose(invert(compose(ego_to, mount)), compose(ego_from, mount));
}

std::vector<Point2> aggregate_frames(
  std::span<const RadarFrame> frames, std::span<const Pose2> ego_poses, const SensorMount & mount,
  const AggregationConfig & cfg)
{
  if (frames.size() != ego_poses.size()) {
    throw Error(ErrorCategory::kConfig, "aggregate_frames: frame and pose counts differ");
  }
  if (cfg.frames < 1 || frames.size() != static_cast<std::size_t>(cfg.frames)) {
    throw Error(ErrorCategory::kConfig, "aggregate_frames: frame count does not match k");
  }
  std::vector<Point2> out;
  const Pose2 & last = ego_poses.back();
  for (std::size_t j = 0; j < frames.size(); ++j) {
    const RadarFrame kept = filter_dynamic(frames[j], cfg.velocity_threshold);
    const Pose2 rel = j + 1 == frames.size() ? Pose2::identity()
                                             : relative_sensor_pose(ego_poses[j], last, mount.mount_pose);
    for (const RadarPoint & p : kept.points) {
      out.push_back(apply(rel, Point2{p.x, p.y}));
    }
  }
  return out;
}

MaskGrid rasterize_bev(std::span<const Point2> points, const GridSpec & spec)
{
  MaskGrid grid(spec, 0);
  for (const Point2 & p : points) {
    if (auto c = world_to_cell(p, spec)) {
      grid.at(*c) = 1;
    }
  }
  return grid;
}

std::vector<Window> make_windows(std::size_t steps, std::size_t k, std::size_t stride)
{
  if (k == 0) {
    throw Error(ErrorCategory::kConfig, "make_windows: k must be >= 1");
  }
  if (stride == 0) {
    stride = k;
  }
  if (stride < k) {
    throw Error(ErrorCategory::kConfig, "make_windows: stride below k would overlap windows");
  }
  std::vector<Window> out;
  for (std::size_t end = stride; end <= steps; end += stride) {
    out.push_back({end - k, end});
  }
  return out;
}

WindowData window_data(const SceneBundle & scene, const std::string & sensor_id, Window w)
{
  if (w.end > scene.steps.size() || w.begin >= w.end) {
    throw Error(ErrorCategory::kConfig, "window outside the scene");
  }
  WindowData d;
  for (std::size_t t = w.begin; t < w.end; ++t) {
    d.frames.push_back(scene.radar_frame(t, sensor_id));
    d.ego_poses.push_back(scene.steps[t].ego_pose);
  }
  return d;
}

MaskGrid window_input(
  const SceneBundle & scene, const std::string & sensor_id, Window w, const GridSpec & spec,
  double velocity_threshold)
{
  const WindowData d = window_data(scene, sensor_id, w);
  AggregationConfig cfg;
  cfg.frames = static_cast<int>(d.frames.size());
  cfg.velocity_threshold = velocity_threshold;
  const std::vector<Point2> pts = aggregate_frames(d.frames, d.ego_poses, scene.mount(sensor_id), cfg);
  return rasterize_bev(pts, spec);
}

}  // namespace occgrid
