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

#include "occgrid/concave_hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include <boost/polygon/voronoi.hpp>

namespace occgrid
{
namespace
{

constexpr double kSnap = 1e4;  // lattice units per metre

using SitePoint = boost::polygon::point_data<std::int32_t>;

double cross(Point2 o, Point2 a, Point2 b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point2 p, Point2 a, Point2 b)
{
  constexpr double kTol = 1e-9;
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross(a, b, p)) > kTol * std::max(1.0, len)) {
    return false;
  }
  return p.x >= std::min(a.x, b.x) - kTol && p.x <= std::max(a.x, b.x) + kTol &&
         p.y >= std::min(a.y, b.y) - kTol && p.y <= std::max(a.y, b.y) + kTol;
}

// Half-open crossing test for a horizontal ray towards +x.
bool crosses(Point2 p, Point2 a, Point2 b)
{
  if ((a.y <= p.y) == (b.y <= p.y)) {
    return false;
  }
  const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
  return p.x < x;
}

double circumradius(Point2 a, Point2 b, Point2 c)
{
  const double ab = std::hypot(b.x - a.x, b.y - a.y);
  const double bc = std::hypot(c.x - b.x, c.y - b.y);
  const double ca = std::hypot(a.x - c.x, a.y - c.y);
  const double twice_area = std::abs(cross(a, b, c));
  if (twice_area == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return ab * bc * ca / (2.0 * twice_area);
}

}  // namespace

std::vector<std::array<std::size_t, 3>> delaunay_triangles(std::span<const Point2> points)
{
  std::vector<std::array<std::size_t, 3>> tris;
  if (points.size() < 3) {
    return tris;
  }
  double min_x = points[0].x;
  double min_y = points[0].y;
  for (const Point2 & p : points) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
  }
  std::vector<SitePoint> sites;
  std::vector<std::size_t> site_to_input;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double qx = std::round((points[i].x - min_x) * kSnap);
    const double qy = std::round((points[i].y - min_y) * kSnap);
    if (qx > 2.0e9 || qy > 2.0e9) {
      throw Error(ErrorCategory::kConfig, "delaunay_triangles: point set extent too large");
    }
    const auto key = std::make_pair(static_cast<std::int32_t>(qx), static_cast<std::int32_t>(qy));
    if (seen.emplace(key, i).second) {
      sites.emplace_back(key.first, key.second);
      site_to_input.push_back(i);
    }
  }

  boost::polygon::voronoi_diagram<double> vd;
  boost::polygon::construct_voronoi(sites.begin(), sites.end(), &vd);

  auto snapped = [&](std::size_t site) {
    return Point2{static_cast<double>(sites[site].x()), static_cast<double>(sites[site].y())};
  };
  for (const auto & vertex : vd.vertices()) {
    // Sites around a Voronoi vertex form one Delaunay face (a triangle, or a
    // convex cocircular polygon that gets fanned).
    std::vector<std::size_t> ring;
    const auto * edge = vertex.incident_edge();
    do {
      ring.push_back(edge->cell()->source_index());
      edge = edge->rot_next();
    } while (edge != vertex.incident_edge());
    if (ring.size() < 3) {
      continue;
    }
    // order counter-clockwise around the face centroid
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t s : ring) {
      cx += snapped(s).x;
      cy += snapped(s).y;
    }
    cx /= static_cast<double>(ring.size());
    cy /= static_cast<double>(ring.size());
    std::sort(ring.begin(), ring.end(), [&](std::size_t a, std::size_t b) {
      const Point2 pa = snapped(a);
      const Point2 pb = snapped(b);
      return std::atan2(pa.y - cy, pa.x - cx) < std::atan2(pb.y - cy, pb.x - cx);
    });
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
      tris.push_back({site_to_input[ring[0]], site_to_input[ring[k]], site_to_input[ring[k + 1]]});
    }
  }
  return tris;
}

double HullPolygon::area() const
{
  double total = 0.0;
  for (const auto & ring : rings) {
    double a = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point2 & p = ring[i];
      const Point2 & q = ring[(i + 1) % ring.size()];
      a += p.x * q.y - q.x * p.y;
    }
    total += 0.5 * a;
  }
  return total;
}

bool HullPolygon::contains(Point2 p) const
{
  bool inside = false;
  for (const auto & ring : rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point2 & a = ring[i];
      const Point2 & b = ring[(i + 1) % ring.size()];
      if (on_segment(p, a, b)) {
        return true;
      }
      if (crosses(p, a, b)) {
        inside = !inside;
      }
    }
  }
  return inside;
}

HullPolygon concave_hull(std::span<const Point2> points, double alpha)
{
  if (points.size() < 3) {
    throw Error(ErrorCategory::kDegenerate, "concave_hull: need at least three points");
  }
  if (!(alpha > 0.0)) {
    throw Error(ErrorCategory::kConfig, "concave_hull: alpha must be positive");
  }
  const auto tris = delaunay_triangles(points);
  if (tris.empty()) {
    throw Error(ErrorCategory::kDegenerate, "concave_hull: input points are collinear");
  }

  // Directed edges of kept triangles; an edge is on the boundary when its
  // reverse is absent.
  struct PairHash
  {
    std::size_t operator()(const std::pair<std::size_t, std::size_t> & e) const
    {
      return std::hash<std::size_t>()(e.first * 0x9e3779b97f4a7c15ULL ^ e.second);
    }
  };
  std::unordered_map<std::pair<std::size_t, std::size_t>, int, PairHash> directed;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (const auto & t : tris) {
    const Point2 a = points[t[0]];
    const Point2 b = points[t[1]];
    const Point2 c = points[t[2]];
    if (circumradius(a, b, c) > alpha) {
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      const auto e = std::make_pair(t[k], t[(k + 1) % 3]);
      if (directed.emplace(e, 1).second) {
        order.push_back(e);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> outgoing;
  std::size_t n_boundary = 0;
  for (const auto & e : order) {
    if (directed.count({e.second, e.first}) == 0) {
      outgoing[e.first].push_back(e.second);
      ++n_boundary;
    }
  }

  HullPolygon hull;
  while (n_boundary > 0) {
    // start from the smallest vertex with an unused outgoing edge
    auto it = std::find_if(outgoing.begin(), outgoing.end(), [](const auto & kv) {
      return !kv.second.empty();
    });
    const std::size_t start = it->first;
    std::vector<Point2> ring;
    std::size_t prev = start;
    std::size_t cur = it->second.front();
    it->second.erase(it->second.begin());
    --n_boundary;
    ring.push_back(points[start]);
    while (cur != start) {
      ring.push_back(points[cur]);
      auto & outs = outgoing[cur];
      if (outs.empty()) {
        throw Error(ErrorCategory::kDegenerate, "concave_hull: open boundary chain");
      }
      // At pinch vertices take the first outgoing edge clockwise from the
      // reversed incoming edge; this keeps every ring simple.
      std::size_t pick = 0;
      if (outs.size() > 1) {
        const Point2 c = points[cur];
        const double back = std::atan2(points[prev].y - c.y, points[prev].x - c.x);
        double best = 1e9;
        for (std::size_t k = 0; k < outs.size(); ++k) {
          const double ang = std::atan2(points[outs[k]].y - c.y, points[outs[k]].x - c.x);
          double cw = back - ang;
          while (cw <= 0.0) {
            cw += 2.0 * kPi;
          }
          if (cw < best) {
            best = cw;
            pick = k;
          }
        }
      }
      prev = cur;
      cur = outs[pick];
      outs.erase(outs.begin() + static_cast<std::ptrdiff_t>(pick));
      --n_boundary;
    }
    hull.rings.push_back(std::move(ring));
  }
  return hull;
}

HullIndex::HullIndex(const HullPolygon & hull, double band) : band_(band)
{
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const auto & ring : hull.rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      edges_.push_back({ring[i], ring[(i + 1) % ring.size()]});
      y_min = std::min(y_min, ring[i].y);
      y_max = std::max(y_max, ring[i].y);
    }
  }
  if (edges_.empty()) {
    return;
  }
  y0_ = y_min;
  const auto n_bands = static_cast<std::size_t>(std::floor((y_max - y_min) / band_)) + 1;
  bands_.resize(n_bands);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const double lo = std::min(edges_[e].a.y, edges_[e].b.y);
    const double hi = std::max(edges_[e].a.y, edges_[e].b.y);
    const auto b0 = static_cast<std::size_t>(std::floor((lo - y0_) / band_));
    const auto b1 = std::min(n_bands - 1, static_cast<std::size_t>(std::floor((hi - y0_) / band_)));
    for (std::size_t b = b0; b <= b1; ++b) {
      bands_[b].push_back(e);
    }
  }
}

bool HullIndex::contains(Point2 p) const
{
  if (bands_.empty()) {
    return false;
  }
  const double f = std::floor((p.y - y0_) / band_);
  if (f < 0.0 || f >= static_cast<double>(bands_.size())) {
    return false;
  }
  bool inside = false;
  for (std::size_t e : bands_[static_cast<std::size_t>(f)]) {
    if (on_segment(p, edges_[e].a, edges_[e].b)) {
      return true;
    }
    if (crosses(p, edges_[e].a, edges_[e].b)) {
      inside = !inside;
    }
  }
  return inside;
}

}  // namespace occgrid
