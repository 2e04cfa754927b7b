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

#include "occgrid/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occgrid
{
namespace
{

constexpr double kBoundaryTol = 1e-9;

// Index of the cell containing coordinate g along an axis of n cells,
// admitting points that sit on (or numerically just past) either boundary.
int start_index(double g, int n)
{
  if (g < 0.0 && g >= -kBoundaryTol) {
    return 0;
  }
  if (g >= n && g <= n + kBoundaryTol) {
    return n - 1;
  }
  return static_cast<int>(std::floor(g));
}

}  // namespace

std::vector<Cell> traverse_ray(const GridSpec & spec, Point2 origin, Point2 target)
{
  std::vector<Cell> cells;
  const Point2 g0 = to_grid_units(origin, spec);
  const Point2 g1 = to_grid_units(target, spec);
  if (!std::isfinite(g0.x) || !std::isfinite(g0.y) || !std::isfinite(g1.x) ||
      !std::isfinite(g1.y)) {
    return cells;
  }
  int u = start_index(g0.x, spec.height);
  int v = start_index(g0.y, spec.width);
  if (u < 0 || v < 0 || u >= spec.height || v >= spec.width) {
    return cells;
  }
  const double fu_end = std::floor(g1.x);
  const double fv_end = std::floor(g1.y);
  const double dx = g1.x - g0.x;
  const double dy = g1.y - g0.y;
  const int su = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int sv = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const std::size_t max_steps = static_cast<std::size_t>(spec.height) + spec.width + 2;
  cells.reserve(std::min<std::size_t>(max_steps, 512));
  for (std::size_t step = 0; step <= max_steps; ++step) {
    cells.push_back({u, v});
    if (u == fu_end && v == fv_end) {
      break;
    }
    // Crossing parameters are recomputed from the origin each step so exact
    // corner hits compare equal.
    const double tx = su > 0 ? (u + 1 - g0.x) / dx : su < 0 ? (u - g0.x) / dx : kInf;
    const double ty = sv > 0 ? (v + 1 - g0.y) / dy : sv < 0 ? (v - g0.y) / dy : kInf;
    if (std::min(tx, ty) >= 1.0) {
      break;
    }
    if (tx <= ty) {
      u += su;
    } else {
      v += sv;
    }
    if (u < 0 || v < 0 || u >= spec.height || v >= spec.width) {
      break;
    }
  }
  return cells;
}

std::optional<std::pair<Point2, Point2>> clip_segment(const GridSpec & spec, Point2 a, Point2 b)
{
  const double xmin = spec.origin.x;
  const double xmax = spec.origin.x + spec.extent_x();
  const double ymin = spec.origin.y;
  const double ymax = spec.origin.y + spec.extent_y();
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  // Liang-Barsky
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - xmin, xmax - a.x, a.y - ymin, ymax - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) {
        return std::nullopt;
      }
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1) {
    return std::nullopt;
  }
  return std::make_pair(Point2{a.x + t0 * dx, a.y + t0 * dy}, Point2{a.x + t1 * dx, a.y + t1 * dy});
}

int label_priority(Label l)
{
  switch (l) {
    case Label::kOccupied: return 3;
    case Label::kFree: return 2;
    case Label::kUnobserved: return 1;
    case Label::kIgnore: return 0;
  }
  return 0;
}

bool in_field_of_view(
  const GridSpec & spec, Point2 sensor_origin, Cell c, double fov_half_angle, double max_range)
{
  const Point2 p = cell_center(c, spec);
  const double dx = p.x - sensor_origin.x;
  const double dy = p.y - sensor_origin.y;
  if (std::hypot(dx, dy) > max_range) {
    return false;
  }
  return std::abs(std::atan2(dy, dx)) <= fov_half_angle;
}

namespace
{

struct RayCaster
{
  const GridSpec & spec;
  Point2 origin;
  const MaskGrid * occupied;
  LabelGrid best;
  std::vector<std::uint8_t> touched;

  RayCaster(const GridSpec & s, Point2 o, const MaskGrid * occ)
  : spec(s), origin(o), occupied(occ), best(s, Label::kIgnore), touched(s.cell_count(), 0)
  {
  }

  void cast(Point2 target)
  {
    const std::vector<Cell> cells = traverse_ray(spec, origin, target);
    if (occupied == nullptr) {
      for (const Cell & c : cells) {
        touched[best.index(c.u, c.v)] = 1;
      }
      return;
    }
    const std::vector<Label> labels =
      label_along_ray(cells, [this](Cell c) { return occupied->at(c) != 0; });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t idx = best.index(cells[i].u, cells[i].v);
      touched[idx] = 1;
      if (label_priority(labels[i]) > label_priority(best[idx])) {
        best[idx] = labels[i];
      }
    }
  }
};

std::vector<Cell> boundary_cells(const GridSpec & spec)
{
  std::vector<Cell> out;
  const int h = spec.height;
  const int w = spec.width;
  for (int v = 0; v < w; ++v) {
    out.push_back({0, v});
  }
  if (h > 1) {
    for (int v = 0; v < w; ++v) {
      out.push_back({h - 1, v});
    }
  }
  for (int u = 1; u + 1 < h; ++u) {
    out.push_back({u, 0});
    if (w > 1) {
      out.push_back({u, w - 1});
    }
  }
  return out;
}

template <typename Caster>
std::vector<Point2> cast_all(
  Caster & caster, const GridSpec & spec, Point2 sensor_origin, double fov_half_angle,
  double max_range)
{
  std::vector<Point2> targets;
  for (const Cell & c : boundary_cells(spec)) {
    if (in_field_of_view(spec, sensor_origin, c, fov_half_angle, max_range)) {
      targets.push_back(cell_center(c, spec));
      caster.cast(targets.back());
    }
  }
  for (int u = 0; u < spec.height; ++u) {
    for (int v = 0; v < spec.width; ++v) {
      const Cell c{u, v};
      if (caster.touched[caster.best.index(u, v)] == 0 &&
          in_field_of_view(spec, sensor_origin, c, fov_half_angle, max_range)) {
        targets.push_back(cell_center(c, spec));
        caster.cast(targets.back());
      }
    }
  }
  return targets;
}

}  // namespace

std::vector<Point2> visibility_ray_targets(
  const GridSpec & spec, Point2 sensor_origin, double fov_half_angle, double max_range)
{
  spec.validate();
  RayCaster caster(spec, sensor_origin, nullptr);
  return cast_all(caster, spec, sensor_origin, fov_half_angle, max_range);
}

LabelGrid visibility_label(
  const GridSpec & spec, Point2 sensor_origin, const MaskGrid & occupied, double fov_half_angle,
  double max_range)
{
  spec.validate();
  if (!(occupied.spec() == spec)) {
    throw Error(ErrorCategory::kShape, "visibility_label: mask spec does not match grid spec");
  }
  RayCaster caster(spec, sensor_origin, &occupied);
  cast_all(caster, spec, sensor_origin, fov_half_angle, max_range);

  LabelGrid out(spec, Label::kIgnore);
  for (int u = 0; u < spec.height; ++u) {
    for (int v = 0; v < spec.width; ++v) {
      const Cell c{u, v};
      if (!in_field_of_view(spec, sensor_origin, c, fov_half_angle, max_range)) {
        continue;
      }
      const std::size_t idx = out.index(u, v);
      // only reachable when the sensor sits outside the grid
      out[idx] = caster.touched[idx] ? caster.best[idx] : Label::kUnobserved;
    }
  }
  return out;
}

}  // namespace occgrid
