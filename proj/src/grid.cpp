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

#include "occgrid/grid.hpp"

#include <cmath>

#include "occgrid/geometry.hpp"

namespace occgrid
{

GridSpec GridSpec::standard() { return forward(215, 50, 0.4); }

GridSpec GridSpec::forward(int height, int width, double cell)
{
  GridSpec s;
  s.height = height;
  s.width = width;
  s.cell_x = cell;
  s.cell_y = cell;
  s.origin = {0.0, -0.5 * width * cell};
  return s;
}

void GridSpec::validate() const
{
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCategory::kConfig, "GridSpec: dimensions must be positive");
  }
  if (!(cell_x > 0.0) || !(cell_y > 0.0)) {
    throw Error(ErrorCategory::kConfig, "GridSpec: cell sizes must be positive");
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    throw Error(ErrorCategory::kConfig, "GridSpec: origin must be finite");
  }
}

const char * label_name(Label l)
{
  switch (l) {
    case Label::kFree: return "free";
    case Label::kOccupied: return "occupied";
    case Label::kUnobserved: return "unobserved";
    case Label::kIgnore: return "ignore";
  }
  return "?";
}

std::optional<Cell> world_to_cell(Point2 p, const GridSpec & spec)
{
  const Point2 g = to_grid_units(p, spec);
  if (!(g.x >= 0.0) || !(g.y >= 0.0)) {
    return std::nullopt;
  }
  const double fu = std::floor(g.x);
  const double fv = std::floor(g.y);
  if (fu >= spec.height || fv >= spec.width) {
    return std::nullopt;
  }
  return Cell{static_cast<int>(fu), static_cast<int>(fv)};
}

Point2 cell_center(Cell c, const GridSpec & spec)
{
  return {spec.origin.x + (c.u + 0.5) * spec.cell_x, spec.origin.y + (c.v + 0.5) * spec.cell_y};
}

double normalize_angle(double a)
{
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

Pose2 compose(const Pose2 & a, const Pose2 & b)
{
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, normalize_angle(a.yaw + b.yaw)};
}

Pose2 invert(const Pose2 & a)
{
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  return {-(c * a.x + s * a.y), s * a.x - c * a.y, normalize_angle(-a.yaw)};
}

Point2 apply(const Pose2 & pose, Point2 p)
{
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return {pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y};
}

Point3 apply(const Pose2 & pose, const Point3 & p)
{
  const Point2 q = apply(pose, Point2{p.x, p.y});
  return {q.x, q.y, p.z};
}

std::vector<Point2> transform_points(const Pose2 & pose, std::span<const Point2> pts)
{
  std::vector<Point2> out;
  out.reserve(pts.size());
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  for (const Point2 & p : pts) {
    out.push_back({pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y});
  }
  return out;
}

}  // namespace occgrid
