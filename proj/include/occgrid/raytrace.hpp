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

#ifndef OCCGRID__RAYTRACE_HPP_
#define OCCGRID__RAYTRACE_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "occgrid/grid.hpp"

namespace occgrid
{

/// Supercover traversal of the segment origin -> target.
///
/// Returns every cell whose interior the segment crosses, ordered by ray
/// parameter and starting with the cell that contains `origin`. Where the
/// segment passes exactly through a cell corner the walk steps along x
/// first, so consecutive cells always share an edge. The walk stops at the
/// target cell or where the segment leaves the grid. An origin outside the
/// grid yields an empty list; an origin lying on the far boundary is
/// assigned to the adjacent boundary cell.
std::vector<Cell> traverse_ray(const GridSpec & spec, Point2 origin, Point2 target);

/// Portion of the segment a -> b inside the grid rectangle, or nullopt if
/// the segment misses the grid.
std::optional<std::pair<Point2, Point2>> clip_segment(const GridSpec & spec, Point2 a, Point2 b);

/// Labels for the cells of one ray under the single-obstacle rule: cells
/// before the first occupied run are free, the run itself is occupied and
/// everything after it is unobserved.
template <typename IsOccupied>
std::vector<Label> label_along_ray(const std::vector<Cell> & cells, IsOccupied && is_occupied)
{
  std::vector<Label> out(cells.size(), Label::kFree);
  enum { kBefore, kInRun, kAfter } state = kBefore;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const bool occ = is_occupied(cells[i]);
    if (state == kBefore && occ) {
      state = kInRun;
    } else if (state == kInRun && !occ) {
      state = kAfter;
    }
    out[i] = state == kBefore ? Label::kFree
           : state == kInRun  ? Label::kOccupied
                              : Label::kUnobserved;
  }
  return out;
}

/// Occupied > Free > Unobserved > Ignore.
int label_priority(Label l);

/// True when cell centre lies inside the sensor cone (bearing measured from
/// +x of the grid frame) and within `max_range` of `sensor_origin`.
bool in_field_of_view(
  const GridSpec & spec, Point2 sensor_origin, Cell c, double fov_half_angle, double max_range);

/// Ray-cast visibility labels from an occupancy mask.
///
/// One ray goes from `sensor_origin` to the centre of every boundary cell
/// inside the field of view; cells in view that no such ray touches get a
/// ray of their own. Conflicts between rays resolve by label_priority.
/// Cells outside the cone or beyond `max_range` are Ignore. A ray without
/// any occupied cell is free throughout.
LabelGrid visibility_label(
  const GridSpec & spec, Point2 sensor_origin, const MaskGrid & occupied, double fov_half_angle,
  double max_range);

/// The rays visibility_label casts, as target points in the grid frame.
std::vector<Point2> visibility_ray_targets(
  const GridSpec & spec, Point2 sensor_origin, double fov_half_angle, double max_range);

}  // namespace occgrid

#endif  // OCCGRID__RAYTRACE_HPP_
