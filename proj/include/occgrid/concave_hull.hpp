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

#ifndef OCCGRID__CONCAVE_HULL_HPP_
#define OCCGRID__CONCAVE_HULL_HPP_

#include <array>
#include <span>
#include <vector>

#include "occgrid/common.hpp"

namespace occgrid
{

/// Delaunay triangles as index triples into the input, counter-clockwise.
/// Input is snapped to a 0.1 mm lattice for exact predicates; coincident
/// points after snapping are merged (first occurrence kept).
std::vector<std::array<std::size_t, 3>> delaunay_triangles(std::span<const Point2> points);

/// Boundary of an alpha shape. Outer rings run counter-clockwise, holes
/// clockwise; membership uses the even-odd rule over all rings.
struct HullPolygon
{
  std::vector<std::vector<Point2>> rings;

  /// Signed ring areas summed: the covered area.
  double area() const;
  /// Inside or on the boundary.
  bool contains(Point2 p) const;
};

/// Union of the Delaunay triangles whose circumradius is at most `alpha`.
/// Throws kDegenerate for fewer than three points or collinear input.
HullPolygon concave_hull(std::span<const Point2> points, double alpha);

/// Band-bucketed edge index for fast repeated containment queries.
class HullIndex
{
public:
  explicit HullIndex(const HullPolygon & hull, double band = 1.0);
  bool contains(Point2 p) const;

private:
  struct Edge
  {
    Point2 a;
    Point2 b;
  };
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> bands_;
  double y0_ = 0.0;
  double band_ = 1.0;
};

}  // namespace occgrid

#endif  // OCCGRID__CONCAVE_HULL_HPP_
