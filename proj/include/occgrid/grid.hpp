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

#ifndef OCCGRID__GRID_HPP_
#define OCCGRID__GRID_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "occgrid/common.hpp"

namespace occgrid
{

/// Planar grid geometry. Rows (u) run along +x (forward from the sensor),
/// columns (v) along +y (left). `origin` is the world coordinate of the
/// outer corner of cell (0, 0).
struct GridSpec
{
  int height = 0;
  int width = 0;
  double cell_x = 0.0;
  double cell_y = 0.0;
  Point2 origin{};

  /// 215 x 50 cells of 0.4 m covering x in [0, 86), y in [-10, 10).
  static GridSpec standard();
  /// Grid starting at x = 0 and laterally centred on y = 0.
  static GridSpec forward(int height, int width, double cell);

  double extent_x() const { return height * cell_x; }
  double extent_y() const { return width * cell_y; }
  std::size_t cell_count() const
  {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  /// Throws kConfig when dimensions or cell sizes are not positive.
  void validate() const;

  friend bool operator==(const GridSpec &, const GridSpec &) = default;
};

struct Cell
{
  int u = 0;
  int v = 0;
  friend bool operator==(const Cell &, const Cell &) = default;
  friend auto operator<=>(const Cell &, const Cell &) = default;
};

/// Per-cell occupancy category. The first three values double as class
/// indices for segmentation.
enum class Label : std::uint8_t { kFree = 0, kOccupied = 1, kUnobserved = 2, kIgnore = 3 };

inline constexpr int kNumClasses = 3;

const char * label_name(Label l);

template <typename T>
class Grid
{
public:
  Grid() = default;
  explicit Grid(const GridSpec & spec, T fill = T{})
  : spec_(spec), data_(spec.cell_count(), fill)
  {
  }
  Grid(const GridSpec & spec, std::vector<T> data) : spec_(spec), data_(std::move(data))
  {
    if (data_.size() != spec_.cell_count()) {
      throw Error(ErrorCategory::kShape, "Grid: data size does not match spec");
    }
  }

  const GridSpec & spec() const { return spec_; }
  int height() const { return spec_.height; }
  int width() const { return spec_.width; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int u, int v) const
  {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(spec_.width) +
           static_cast<std::size_t>(v);
  }
  bool contains(int u, int v) const
  {
    return u >= 0 && v >= 0 && u < spec_.height && v < spec_.width;
  }

  T & at(int u, int v) { return data_[index(u, v)]; }
  const T & at(int u, int v) const { return data_[index(u, v)]; }
  T & at(Cell c) { return at(c.u, c.v); }
  const T & at(Cell c) const { return at(c.u, c.v); }
  T & operator[](std::size_t i) { return data_[i]; }
  const T & operator[](std::size_t i) const { return data_[i]; }

  std::vector<T> & data() { return data_; }
  const std::vector<T> & data() const { return data_; }

  friend bool operator==(const Grid &, const Grid &) = default;

private:
  GridSpec spec_{};
  std::vector<T> data_;
};

using LabelGrid = Grid<Label>;
using MaskGrid = Grid<std::uint8_t>;
using CountGrid = Grid<std::int32_t>;
using RealGrid = Grid<double>;

/// Cell containing `p`, or nullopt when `p` lies outside [0,H) x [0,W).
std::optional<Cell> world_to_cell(Point2 p, const GridSpec & spec);

Point2 cell_center(Cell c, const GridSpec & spec);

/// Point expressed in fractional cell units: (x, y) -> (u, v) as reals.
inline Point2 to_grid_units(Point2 p, const GridSpec & spec)
{
  return {(p.x - spec.origin.x) / spec.cell_x, (p.y - spec.origin.y) / spec.cell_y};
}

/// Mirror a grid across its lateral (column) axis.
template <typename T>
Grid<T> flip_lateral(const Grid<T> & g)
{
  Grid<T> out(g.spec());
  for (int u = 0; u < g.height(); ++u) {
    for (int v = 0; v < g.width(); ++v) {
      out.at(u, g.width() - 1 - v) = g.at(u, v);
    }
  }
  return out;
}

}  // namespace occgrid

#endif  // OCCGRID__GRID_HPP_
