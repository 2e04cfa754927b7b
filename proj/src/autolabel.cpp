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

#include "occgrid/autolabel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "occgrid/raytrace.hpp"

namespace occgrid
{

void LabelConfig::validate() const
{
  if (min_count < 1) {
    throw Error(ErrorCategory::kConfig, "LabelConfig: min_count must be >= 1");
  }
  if (!(z_min < z_max)) {
    throw Error(ErrorCategory::kConfig, "LabelConfig: need z_min < z_max");
  }
  if (morph_kernel < 1 || morph_kernel % 2 == 0) {
    throw Error(ErrorCategory::kConfig, "LabelConfig: morph_kernel must be a positive odd integer");
  }
  if (!(alpha > 0.0) || !(max_range > 0.0) || !(hull_thinning > 0.0)) {
    throw Error(ErrorCategory::kConfig, "LabelConfig: alpha, max_range, hull_thinning must be positive");
  }
}

std::vector<Point3> aggregate_lidar(const SceneBundle & scene)
{
  const auto lidars = scene.lidar_mounts();
  std::vector<Point3> out;
  bool any = false;
  for (const SceneStep & step : scene.steps) {
    for (const LidarSweep & sweep : step.lidar) {
      const Pose2 to_global = compose(step.ego_pose, scene.mount(sweep.sensor_id).mount_pose);
      any = true;
      for (const Point3 & p : sweep.points) {
        out.push_back(apply(to_global, p));
      }
    }
  }
  if (lidars.empty() || !any) {
    throw Error(ErrorCategory::kConfig, "aggregate_lidar: scene has no lidar sweeps");
  }
  return out;
}

CountGrid project_count_grid(
  std::span<const Point3> points, const Pose2 & radar_pose, const GridSpec & spec, double z_min,
  double z_max)
{
  CountGrid counts(spec, 0);
  const Pose2 to_radar = invert(radar_pose);
  for (const Point3 & p : points) {
    if (p.z < z_min || p.z > z_max) {
      continue;
    }
    if (auto c = world_to_cell(apply(to_radar, Point2{p.x, p.y}), spec)) {
      ++counts.at(*c);
    }
  }
  return counts;
}

MaskGrid threshold_counts(const CountGrid & counts, int min_count)
{
  if (min_count < 1) {
    throw Error(ErrorCategory::kConfig, "threshold_counts: min_count must be >= 1");
  }
  MaskGrid mask(counts.spec(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    mask[i] = counts[i] >= min_count ? 1 : 0;
  }
  return mask;
}

namespace
{

// Separable square max (dilate) or min (erode) filter. Cells outside the
// grid count as background for dilation and foreground for erosion, so
// closing never removes input cells at the border.
MaskGrid square_filter(const MaskGrid & in, int radius, bool dilate)
{
  const int h = in.height();
  const int w = in.width();
  const std::uint8_t outside = dilate ? 0 : 1;
  MaskGrid tmp(in.spec(), 0);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      std::uint8_t acc = dilate ? 0 : 1;
      for (int d = -radius; d <= radius; ++d) {
        const int vv = v + d;
        const std::uint8_t x = (vv < 0 || vv >= w) ? outside : in.at(u, vv);
        acc = dilate ? std::max(acc, x) : std::min(acc, x);
      }
      tmp.at(u, v) = acc;
    }
  }
  MaskGrid out(in.spec(), 0);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      std::uint8_t acc = dilate ? 0 : 1;
      for (int d = -radius; d <= radius; ++d) {
        const int uu = u + d;
        const std::uint8_t x = (uu < 0 || uu >= h) ? outside : tmp.at(uu, v);
        acc = dilate ? std::max(acc, x) : std::min(acc, x);
      }
      out.at(u, v) = acc;
    }
  }
  return out;
}

MaskGrid fill_holes(const MaskGrid & in)
{
  const int h = in.height();
  const int w = in.width();
  std::vector<std::uint8_t> reached(in.size(), 0);
  std::deque<Cell> queue;
  auto seed = [&](int u, int v) {
    const std::size_t i = in.index(u, v);
    if (in[i] == 0 && reached[i] == 0) {
      reached[i] = 1;
      queue.push_back({u, v});
    }
  };
  for (int v = 0; v < w; ++v) {
    seed(0, v);
    seed(h - 1, v);
  }
  for (int u = 0; u < h; ++u) {
    seed(u, 0);
    seed(u, w - 1);
  }
  constexpr int du[4] = {1, -1, 0, 0};
  constexpr int dv[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int u = c.u + du[k];
      const int v = c.v + dv[k];
      if (u >= 0 && v >= 0 && u < h && v < w) {
        seed(u, v);
      }
    }
  }
  MaskGrid out(in.spec(), 0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = (in[i] != 0 || reached[i] == 0) ? 1 : 0;
  }
  return out;
}

}  // namespace

MaskGrid morph_clean(const MaskGrid & mask, int kernel)
{
  if (kernel < 1 || kernel % 2 == 0) {
    throw Error(ErrorCategory::kConfig, "morph_clean: kernel must be a positive odd integer");
  }
  const int r = kernel / 2;
  return square_filter(fill_holes(square_filter(mask, r, true)), r, false);
}

LabelGrid make_label_grid(
  const MaskGrid & mask, const GridSpec & spec, double fov_half_angle, double max_range)
{
  return visibility_label(spec, Point2{0.0, 0.0}, mask, fov_half_angle, max_range);
}

LabelGrid apply_ignore_mask(const LabelGrid & grid, const HullIndex & hull, const Pose2 & radar_pose)
{
  LabelGrid out = grid;
  const GridSpec & spec = grid.spec();
  for (int u = 0; u < spec.height; ++u) {
    for (int v = 0; v < spec.width; ++v) {
      Label & l = out.at(u, v);
      if (l == Label::kIgnore) {
        continue;
      }
      if (!hull.contains(apply(radar_pose, cell_center({u, v}, spec)))) {
        l = Label::kIgnore;
      }
    }
  }
  return out;
}

LabelGrid apply_ignore_mask(
  const LabelGrid & grid, const HullPolygon & hull, const Pose2 & radar_pose)
{
  return apply_ignore_mask(grid, HullIndex(hull), radar_pose);
}

std::vector<Point2> thin_points(std::span<const Point3> points, double voxel)
{
  std::set<std::pair<long long, long long>> seen;
  std::vector<Point2> out;
  for (const Point3 & p : points) {
    const auto key = std::make_pair(
      static_cast<long long>(std::floor(p.x / voxel)), static_cast<long long>(std::floor(p.y / voxel)));
    if (seen.insert(key).second) {
      out.push_back({p.x, p.y});
    }
  }
  return out;
}

SceneLabeler::SceneLabeler(const SceneBundle & scene, const LabelConfig & cfg)
: scene_(scene), cfg_(cfg)
{
  cfg_.validate();
  cloud_ = aggregate_lidar(scene_);
}

const HullPolygon & SceneLabeler::hull() const
{
  std::call_once(hull_once_, [this] {
    hull_ = concave_hull(thin_points(cloud_, cfg_.hull_thinning), cfg_.alpha);
    index_ = std::make_unique<HullIndex>(hull_);
  });
  return hull_;
}

LabelGrid SceneLabeler::label_unmasked(
  const std::string & sensor_id, std::size_t t, const GridSpec & spec) const
{
  if (t >= scene_.steps.size()) {
    throw Error(ErrorCategory::kConfig, "SceneLabeler: step out of range");
  }
  const Pose2 radar_pose = compose(scene_.steps[t].ego_pose, scene_.mount(sensor_id).mount_pose);
  const CountGrid counts = project_count_grid(cloud_, radar_pose, spec, cfg_.z_min, cfg_.z_max);
  const MaskGrid mask = morph_clean(threshold_counts(counts, cfg_.min_count), cfg_.morph_kernel);
  return make_label_grid(mask, spec, cfg_.fov_half_angle, cfg_.max_range);
}

LabelGrid SceneLabeler::label(const std::string & sensor_id, std::size_t t, const GridSpec & spec) const
{
  const Pose2 radar_pose = compose(scene_.steps.at(t).ego_pose, scene_.mount(sensor_id).mount_pose);
  hull();
  return apply_ignore_mask(label_unmasked(sensor_id, t, spec), *index_, radar_pose);
}

}  // namespace occgrid
