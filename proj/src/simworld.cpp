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


#include "occgrid/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occgrid
{
namespace
{

constexpr double kTol = 1e-9;

std::optional<double> ray_rect(const Rect & r, Point2 p, Point2 d)
{
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const double lo[2] = {r.x0, r.y0};
  const double hi[2] = {r.x1, r.y1};
  const double o[2] = {p.x, p.y};
  const double dir[2] = {d.x, d.y};
  for (int a = 0; a < 2; ++a) {
    if (dir[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) {
        return std::nullopt;
      }
      continue;
    }
    double ta = (lo[a] - o[a]) / dir[a];
    double tb = (hi[a] - o[a]) / dir[a];
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1 || t1 < 0.0) {
    return std::nullopt;
  }
  return std::max(t0, 0.0);
}

std::optional<double> ray_circle(const Circle & c, Point2 p, Point2 d)
{
  const double ox = p.x - c.c.x;
  const double oy = p.y - c.c.y;
  const double b = ox * d.x + oy * d.y;
  const double cc = ox * ox + oy * oy - c.r * c.r;
  const double disc = b * b - cc;
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double s = std::sqrt(disc);
  if (-b + s < 0.0) {
    return std::nullopt;
  }
  return std::max(-b - s, 0.0);
}

// Open segment a -> b against the open rectangle interior.
bool segment_hits_rect(const Rect & r, Point2 a, Point2 b)
{
  double t0 = 0.0;
  double t1 = 1.0;
  const double lo[2] = {r.x0, r.y0};
  const double hi[2] = {r.x1, r.y1};
  const double o[2] = {a.x, a.y};
  const double d[2] = {b.x - a.x, b.y - a.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] <= lo[k] + kTol || o[k] >= hi[k] - kTol) {
        return false;
      }
      continue;
    }
    double ta = (lo[k] - o[k]) / d[k];
    double tb = (hi[k] - o[k]) / d[k];
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  const double len = std::hypot(d[0], d[1]);
  return (t1 - t0) * len > kTol;
}

bool segment_hits_circle(const Circle & c, Point2 a, Point2 b)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double l2 = dx * dx + dy * dy;
  double t = l2 > 0.0 ? ((c.c.x - a.x) * dx + (c.c.y - a.y) * dy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double px = a.x + t * dx - c.c.x;
  const double py = a.y + t * dy - c.c.y;
  return std::hypot(px, py) < c.r - kTol;
}

bool boxes_overlap(const Rect & a, const Rect & b, double gap)
{
  return a.x0 < b.x1 + gap && b.x0 < a.x1 + gap && a.y0 < b.y1 + gap && b.y0 < a.y1 + gap;
}

Rect bounding_box(const Circle & c) { return {c.c.x - c.r, c.c.y - c.r, c.c.x + c.r, c.c.y + c.r}; }

}  // namespace

std::optional<double> WorldMap::raycast(Point2 p, Point2 dir, double max_t) const
{
  std::optional<double> best;
  auto take = [&](std::optional<double> t) {
    if (t && *t <= max_t && (!best || *t < *best)) {
      best = t;
    }
  };
  for (const Rect & r : rects) {
    take(ray_rect(r, p, dir));
  }
  for (const Circle & c : circles) {
    take(ray_circle(c, p, dir));
  }
  return best;
}

bool WorldMap::segment_blocked(Point2 a, Point2 b) const
{
  for (const Rect & r : rects) {
    if (segment_hits_rect(r, a, b)) {
      return true;
    }
  }
  for (const Circle & c : circles) {
    if (segment_hits_circle(c, a, b)) {
      return true;
    }
  }
  return false;
}

std::vector<Point2> WorldMap::surface_samples(double spacing) const
{
  if (!(spacing > 0.0)) {
    throw Error(ErrorCategory::kConfig, "surface_samples: spacing must be positive");
  }
  std::vector<Point2> out;
  for (const Rect & r : rects) {
    const Point2 corners[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    for (int e = 0; e < 4; ++e) {
      const Point2 a = corners[e];
      const Point2 b = corners[(e + 1) % 4];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      }
    }
  }
  for (const Circle & c : circles) {
    const int n = std::max(4, static_cast<int>(std::ceil(2.0 * kPi * c.r / spacing)));
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * kPi * i / n;
      out.push_back({c.c.x + c.r * std::cos(a), c.c.y + c.r * std::sin(a)});
    }
  }
  return out;
}

void WorldParams::validate() const
{
  if (n_obstacles < 0 || !(x_max > x_min) || !(y_half > 0.0) || !(corridor_half_width >= 0.0) ||
      max_retries < 1) {
    throw Error(ErrorCategory::kConfig, "WorldParams: invalid bounds or counts");
  }
  if (building_prob < 0.0 || car_prob < 0.0 || building_prob + car_prob > 1.0) {
    throw Error(ErrorCategory::kConfig, "WorldParams: obstacle mix probabilities out of range");
  }
}

WorldMap gen_world(std::uint64_t seed, const WorldParams & p)
{
  p.validate();
  WorldMap w;
  w.lo = {p.x_min, -p.y_half};
  w.hi = {p.x_max, p.y_half};
  Rng rng = Rng::derive(seed, 0x3017);
  std::vector<Rect> boxes;
  auto fits = [&](const Rect & b) {
    if (b.x0 < p.x_min || b.x1 > p.x_max || b.y0 < -p.y_half || b.y1 > p.y_half) {
      return false;
    }
    if (b.y0 < p.corridor_half_width && b.y1 > -p.corridor_half_width) {
      return false;
    }
    return std::none_of(boxes.begin(), boxes.end(), [&](const Rect & o) {
      return boxes_overlap(o, b, 0.3);
    });
  };
  for (int i = 0; i < p.n_obstacles; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < p.max_retries && !placed; ++attempt) {
      const double kind = rng.uniform();
      const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double cx = rng.uniform(p.x_min, p.x_max);
      if (kind < p.building_prob) {
        const double len = rng.uniform(8.0, 30.0);
        const double depth = rng.uniform(6.0, 20.0);
        const double near = p.corridor_half_width + rng.uniform(3.0, 10.0);
        const double far = near + depth;
        const Rect r = side > 0 ? Rect{cx - len / 2, near, cx + len / 2, far}
                                : Rect{cx - len / 2, -far, cx + len / 2, -near};
        if (fits(r)) {
          w.rects.push_back(r);
          boxes.push_back(r);
          placed = true;
        }
      } else if (kind < p.building_prob + p.car_prob) {
        const double near = p.corridor_half_width + rng.uniform(0.3, 1.5);
        const double far = near + 1.9;
        const Rect r = side > 0 ? Rect{cx - 2.25, near, cx + 2.25, far}
                                : Rect{cx - 2.25, -far, cx + 2.25, -near};
        if (fits(r)) {
          w.rects.push_back(r);
          boxes.push_back(r);
          placed = true;
        }
      } else {
        const double rad = rng.uniform(0.15, 0.35);
        const double off = p.corridor_half_width + rad + rng.uniform(0.3, 3.0);
        const Circle c{{cx, side * off}, rad};
        if (fits(bounding_box(c))) {
          w.circles.push_back(c);
          boxes.push_back(bounding_box(c));
          placed = true;
        }
      }
    }
    if (!placed) {
      throw Error(ErrorCategory::kConfig,
        "gen_world: could not place obstacle " + std::to_string(i) + " clear of the corridor");
    }
  }
  return w;
}

std::vector<Pose2> gen_trajectory(
  const WorldMap & world, std::uint64_t seed, std::size_t steps, double speed,
  const TrajectoryParams & params)
{
  (void)world;
  if (steps < 1) {
    throw Error(ErrorCategory::kConfig, "gen_trajectory: need at least one step");
  }
  if (speed < 0.0 || !(params.dt > 0.0) || params.max_yaw_rate < 0.0) {
    throw Error(ErrorCategory::kConfig, "gen_trajectory: invalid speed or rates");
  }
  std::vector<Pose2> out;
  out.reserve(steps);
  Pose2 pose{params.start.x, params.start.y, 0.0};
  out.push_back(pose);
  Rng rng = Rng::derive(seed, 0x7a7);
  for (std::size_t t = 1; t < steps; ++t) {
    if (speed == 0.0) {
      out.push_back(pose);
      continue;
    }
    double rate = -params.lateral_gain * pose.y - params.heading_gain * pose.yaw +
                  params.yaw_noise * rng.normal();
    rate = std::clamp(rate, -params.max_yaw_rate, params.max_yaw_rate);
    pose.yaw = normalize_angle(pose.yaw + rate * params.dt);
    pose.x += speed * params.dt * std::cos(pose.yaw);
    pose.y += speed * params.dt * std::sin(pose.yaw);
    out.push_back(pose);
  }
  return out;
}

LidarSweep sense_lidar(
  const WorldMap & world, const Pose2 & ego_pose, const SensorMount & mount,
  const LidarSensorParams & params, Rng & rng)
{
  if (!(params.angular_resolution > 0.0)) {
    throw Error(ErrorCategory::kConfig, "sense_lidar: angular resolution must be positive");
  }
  LidarSweep sweep;
  sweep.sensor_id = mount.sensor_id;
  const Pose2 sensor = compose(ego_pose, mount.mount_pose);
  const auto n = static_cast<int>(std::llround(2.0 * kPi / params.angular_resolution));
  for (int i = 0; i < n; ++i) {
    const double a = i * params.angular_resolution;
    const double g = sensor.yaw + a;
    const auto hit = world.raycast({sensor.x, sensor.y}, {std::cos(g), std::sin(g)}, params.max_range);
    if (!hit) {
      continue;
    }
    const double r = *hit + (params.sigma_range > 0.0 ? params.sigma_range * rng.normal() : 0.0);
    if (r <= 0.0) {
      continue;
    }
    sweep.points.push_back({r * std::cos(a), r * std::sin(a), params.z_height});
  }
  return sweep;
}

void RadarSensorParams::validate() const
{
  if (!(detection_prob >= 0.0 && detection_prob <= 1.0)) {
    throw Error(ErrorCategory::kConfig, "RadarSensorParams: detection_prob must lie in [0, 1]");
  }
  if (!(fov_half_angle > 0.0) || !(max_range > 0.0) || sigma_range < 0.0 || sigma_azimuth < 0.0 ||
      clutter_rate < 0.0 || dynamic_clutter_rate < 0.0 || !(surface_spacing > 0.0)) {
    throw Error(ErrorCategory::kConfig, "RadarSensorParams: invalid value");
  }
  if (max_clusters > kMaxRadarClusters) {
    throw Error(ErrorCategory::kConfig, "RadarSensorParams: max_clusters above 128");
  }
}

RadarFrame sense_radar(
  const WorldMap & world, const std::vector<Point2> & surface, const Pose2 & ego_pose,
  const SensorMount & mount, const RadarSensorParams & params, Rng & rng)
{
  params.validate();
  RadarFrame frame;
  frame.sensor_id = mount.sensor_id;
  const Pose2 sensor = compose(ego_pose, mount.mount_pose);
  const Pose2 to_sensor = invert(sensor);
  const Point2 origin{sensor.x, sensor.y};
  std::vector<RadarPoint> pts;
  for (const Point2 & s : surface) {
    const Point2 local = apply(to_sensor, s);
    const double r = std::hypot(local.x, local.y);
    if (r > params.max_range || r == 0.0) {
      continue;
    }
    const double az = std::atan2(local.y, local.x);
    if (std::abs(az) > params.fov_half_angle) {
      continue;
    }
    if (!rng.bernoulli(params.detection_prob) || world.segment_blocked(origin, s)) {
      continue;
    }
    double rn = r;
    double an = az;
    if (params.sigma_range > 0.0) {
      rn += params.sigma_range * rng.normal();
    }
    if (params.sigma_azimuth > 0.0) {
      an += params.sigma_azimuth * rng.normal();
    }
    if (params.sigma_range == 0.0 && params.sigma_azimuth == 0.0) {
      pts.push_back({local.x, local.y, 0.0, 0.0});
    } else {
      pts.push_back({rn * std::cos(an), rn * std::sin(an), 0.0, 0.0});
    }
  }
  auto wedge_point = [&]() {
    const double r = params.max_range * std::sqrt(rng.uniform());
    const double a = rng.uniform(-params.fov_half_angle, params.fov_half_angle);
    return Point2{r * std::cos(a), r * std::sin(a)};
  };
  const int n_static = rng.poisson(params.clutter_rate);
  for (int i = 0; i < n_static; ++i) {
    const Point2 p = wedge_point();
    pts.push_back({p.x, p.y, 0.0, 0.0});
  }
  const int n_dynamic = rng.poisson(params.dynamic_clutter_rate);
  for (int i = 0; i < n_dynamic; ++i) {
    const Point2 p = wedge_point();
    const double v = rng.uniform(1.5, 10.0);
    const double h = rng.uniform(-kPi, kPi);
    pts.push_back({p.x, p.y, v * std::cos(h), v * std::sin(h)});
  }
  std::vector<std::pair<double, std::size_t>> by_range(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    by_range[i] = {std::hypot(pts[i].x, pts[i].y), i};
  }
  std::sort(by_range.begin(), by_range.end());
  const std::size_t keep = std::min(pts.size(), params.max_clusters);
  frame.points.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    frame.points.push_back(pts[by_range[i].second]);
  }
  return frame;
}

RadarFrame sense_radar(
  const WorldMap & world, const Pose2 & ego_pose, const SensorMount & mount,
  const RadarSensorParams & params, Rng & rng)
{
  return sense_radar(world, world.surface_samples(params.surface_spacing), ego_pose, mount, params, rng);
}

std::vector<SensorMount> default_mounts()
{
  return {
    {"radar_front", {3.6, 0.0, 0.0}, SensorKind::kRadar},
    {"radar_rear_left", {-0.9, 0.85, deg2rad(120.0)}, SensorKind::kRadar},
    {"radar_rear_right", {-0.9, -0.85, deg2rad(-120.0)}, SensorKind::kRadar},
    {"lidar_top", {0.9, 0.0, 0.0}, SensorKind::kLidar},
  };
}

WorldMap scene_world(std::uint64_t seed, const SceneParams & params)
{
  return gen_world(mix_seed(seed, 1), params.world);
}

SceneBundle gen_scene(std::uint64_t seed, const SceneParams & params)
{
  params.grid.validate();
  params.radar.validate();
  const WorldMap world = scene_world(seed, params);
  const std::vector<Pose2> poses =
    gen_trajectory(world, mix_seed(seed, 2), params.steps, params.speed, params.trajectory);
  const std::vector<Point2> surface = world.surface_samples(params.radar.surface_spacing);
  SceneBundle scene;
  scene.seed = seed;
  scene.grid = params.grid;
  scene.mounts = params.mounts;
  scene.steps.reserve(params.steps);
  for (std::size_t t = 0; t < params.steps; ++t) {
    SceneStep step;
    step.timestamp = static_cast<double>(t) * params.trajectory.dt;
    step.ego_pose = poses[t];
    for (std::size_t m = 0; m < params.mounts.size(); ++m) {
      const SensorMount & mount = params.mounts[m];
      Rng rng(mix_seed(mix_seed(seed, 0x5e50 + t), m));
      if (mount.kind == SensorKind::kRadar) {
        RadarFrame f = sense_radar(world, surface, step.ego_pose, mount, params.radar, rng);
        f.timestamp = step.timestamp;
        step.radar.push_back(std::move(f));
      } else {
        LidarSweep s = sense_lidar(world, step.ego_pose, mount, params.lidar, rng);
        s.timestamp = step.timestamp;
        step.lidar.push_back(std::move(s));
      }
    }
    scene.steps.push_back(std::move(step));
  }
  return scene;
}

}  // namespace occgrid
