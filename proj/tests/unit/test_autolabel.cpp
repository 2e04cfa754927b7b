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

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "occgrid/autolabel.hpp"
#include "occgrid/raytrace.hpp"
#include "oracles.hpp"

namespace occgrid
{
namespace
{

SceneBundle lidar_scene(std::vector<Point3> pts, std::vector<Pose2> ego)
{
  SceneBundle s;
  s.mounts = {{"lidar", Pose2::identity(), SensorKind::kLidar}};
  for (const Pose2 & p : ego) {
    SceneStep step;
    step.ego_pose = p;
    step.lidar.push_back({0.0, "lidar", pts});
    s.steps.push_back(step);
  }
  return s;
}

TEST(AggregateLidarTest, IdentityPosesKeepPoints)
{
  const std::vector<Point3> pts{{1.0, 2.0, 0.5}, {-3.0, 0.25, 1.5}};
  EXPECT_EQ(aggregate_lidar(lidar_scene(pts, {Pose2::identity()})), pts);
}

TEST(AggregateLidarTest, TwoIdenticalSweepsDoubleMultiplicity)
{
  const std::vector<Point3> pts{{1.0, 2.0, 0.5}};
  const auto out = aggregate_lidar(lidar_scene(pts, {Pose2::identity(), Pose2::identity()}));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], out[1]);
}

TEST(AggregateLidarTest, EgoYawRotatesPoints)
{
  // (2, 1) rotated by +90 degrees is (-1, 2); then shifted by (10, 0)
  const auto out = aggregate_lidar(lidar_scene({{2.0, 1.0, 0.7}}, {{10.0, 0.0, kPi / 2.0}}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0].x, 9.0, 1e-12);
  EXPECT_NEAR(out[0].y, 2.0, 1e-12);
  EXPECT_EQ(out[0].z, 0.7);
}

TEST(AggregateLidarTest, MountPoseApplied)
{
  SceneBundle s = lidar_scene({{1.0, 0.0, 0.0}}, {{0.0, 0.0, kPi / 2.0}});
  s.mounts[0].mount_pose = {2.0, 0.0, 0.0};
  const auto out = aggregate_lidar(s);
  EXPECT_NEAR(out[0].x, 0.0, 1e-12);
  EXPECT_NEAR(out[0].y, 3.0, 1e-12);
}

TEST(AggregateLidarTest, NoLidarThrows)
{
  SceneBundle s;
  s.steps.resize(2);
  try {
    aggregate_lidar(s);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.category(), ErrorCategory::kConfig);
  }
}

TEST(ProjectCountsTest, Examples)
{
  const GridSpec spec = GridSpec::forward(10, 10, 1.0);
  EXPECT_EQ(project_count_grid({}, Pose2::identity(), spec, 0.3, 2.5), CountGrid(spec, 0));

  const std::vector<Point3> five(5, Point3{3.5, 0.5, 1.0});
  const CountGrid c = project_count_grid(five, Pose2::identity(), spec, 0.3, 2.5);
  EXPECT_EQ(c.at(3, 5), 5);
  EXPECT_EQ(std::accumulate(c.data().begin(), c.data().end(), 0), 5);

  const std::vector<Point3> low{{3.5, 0.5, 0.1}, {3.5, 0.5, 2.6}};
  EXPECT_EQ(project_count_grid(low, Pose2::identity(), spec, 0.3, 2.5), CountGrid(spec, 0));
}

TEST(ProjectCountsTest, RadarPoseAndBounds)
{
  const GridSpec spec = GridSpec::forward(10, 10, 1.0);
  // radar at (5, 5) facing +y: global (5.5, 8.5) is 3.5 ahead and 0.5 to the right
  const std::vector<Point3> pts{{5.5, 8.5, 1.0}, {5.0, -20.0, 1.0}};
  const CountGrid c = project_count_grid(pts, {5.0, 5.0, kPi / 2.0}, spec, 0.3, 2.5);
  EXPECT_EQ(c.at(3, 4), 1);
  EXPECT_EQ(std::accumulate(c.data().begin(), c.data().end(), 0), 1);
}

TEST(ThresholdTest, Examples)
{
  const GridSpec spec = GridSpec::forward(1, 4, 1.0);
  const CountGrid c(spec, std::vector<std::int32_t>{0, 1, 2, 3});
  EXPECT_EQ(threshold_counts(c, 1).data(), (std::vector<std::uint8_t>{0, 1, 1, 1}));
  EXPECT_EQ(threshold_counts(c, 3).data(), (std::vector<std::uint8_t>{0, 0, 0, 1}));
  EXPECT_THROW(threshold_counts(c, 0), Error);
}

MaskGrid mask_from(const std::vector<std::string> & rows)
{
  const GridSpec spec = GridSpec::forward(
    static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), 1.0);
  MaskGrid m(spec, 0);
  for (int u = 0; u < spec.height; ++u) {
    for (int v = 0; v < spec.width; ++v) {
      m.at(u, v) = rows[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] == '#' ? 1 : 0;
    }
  }
  return m;
}

TEST(MorphTest, Examples)
{
  const MaskGrid zero(GridSpec::forward(6, 6, 1.0), 0);
  EXPECT_EQ(morph_clean(zero, 3), zero);

  const MaskGrid ring = mask_from({".......", ".#####.", ".#...#.", ".#...#.", ".#...#.", ".#####.", "......."});
  const MaskGrid filled = mask_from({".......", ".#####.", ".#####.", ".#####.", ".#####.", ".#####.", "......."});
  EXPECT_EQ(morph_clean(ring, 1), filled);

  const MaskGrid dot = mask_from({".....", ".....", "..#..", ".....", "....."});
  EXPECT_EQ(morph_clean(dot, 3), dot);
  EXPECT_THROW(morph_clean(dot, 2), Error);
}

TEST(MorphTest, ClosingBridgesGap)
{
  // dilation closes the one-cell gap, making the pocket a hole
  const MaskGrid in = mask_from(
    {".........", ".........", "..##.##..", "..#...#..", "..#####..", ".........", "........."});
  const MaskGrid out = morph_clean(in, 3);
  EXPECT_EQ(out.at(2, 4), 1);
  EXPECT_EQ(out.at(3, 4), 1);
  EXPECT_EQ(out.at(1, 1), 0);
  EXPECT_EQ(out.at(5, 4), 0);
}

// Hole filling by repeated relaxation from the border.
MaskGrid oracle_fill(const MaskGrid & m)
{
  std::vector<std::uint8_t> outside(m.size(), 0);
  for (int u = 0; u < m.height(); ++u) {
    for (int v = 0; v < m.width(); ++v) {
      const bool border = u == 0 || v == 0 || u == m.height() - 1 || v == m.width() - 1;
      outside[m.index(u, v)] = border && m.at(u, v) == 0;
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int u = 0; u < m.height(); ++u) {
      for (int v = 0; v < m.width(); ++v) {
        const std::size_t i = m.index(u, v);
        if (m[i] != 0 || outside[i] != 0) {
          continue;
        }
        const int du[4] = {1, -1, 0, 0};
        const int dv[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          if (m.contains(u + du[k], v + dv[k]) && outside[m.index(u + du[k], v + dv[k])] != 0) {
            outside[i] = 1;
            changed = true;
            break;
          }
        }
      }
    }
  }
  MaskGrid out(m.spec(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i] = outside[i] == 0 ? 1 : 0;
  }
  return out;
}

TEST(MorphTest, RandomMasksKeepFilledInputAndStayLocal)
{
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const MaskGrid in = [&] {
      MaskGrid m(GridSpec::forward(14, 12, 1.0), 0);
      for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = rng.bernoulli(0.15) ? 1 : 0;
      }
      return m;
    }();
    const int kernel = trial % 2 == 0 ? 3 : 5;
    const MaskGrid out = morph_clean(in, kernel);
    const MaskGrid filled = oracle_fill(in);
    for (int u = 0; u < in.height(); ++u) {
      for (int v = 0; v < in.width(); ++v) {
        if (filled.at(u, v) != 0) {
          ASSERT_EQ(out.at(u, v), 1) << trial << " " << u << "," << v;
        }
        if (out.at(u, v) == in.at(u, v)) {
          continue;
        }
        bool near = false;
        for (int a = u - kernel; a <= u + kernel && !near; ++a) {
          for (int b = v - kernel; b <= v + kernel && !near; ++b) {
            near = in.contains(a, b) && in.at(a, b) != 0;
          }
        }
        ASSERT_TRUE(near) << trial << " " << u << "," << v;
      }
    }
  }
}

TEST(ConcaveHullTest, SquareWithLargeAlphaIsTheSquare)
{
  const std::vector<Point2> sq{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};
  const HullPolygon h = concave_hull(sq, 1e6);
  ASSERT_EQ(h.rings.size(), 1u);
  EXPECT_EQ(h.rings[0].size(), 4u);
  EXPECT_NEAR(h.area(), 4.0, 1e-12);
  for (const Point2 & p : sq) {
    EXPECT_TRUE(h.contains(p));
  }
  EXPECT_TRUE(h.contains({1.0, 1.0}));
  EXPECT_FALSE(h.contains({2.5, 1.0}));
}

TEST(ConcaveHullTest, LShapeExcludesNotch)
{
  // L occupying [0,10]x[0,4] and [0,4]x[0,10], spacing 0.5
  std::vector<Point2> pts;
  const double s = 0.5;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double x = i * s;
      const double y = j * s;
      if (x <= 4.0 || y <= 4.0) {
        pts.push_back({x, y});
      }
    }
  }
  const HullPolygon h = concave_hull(pts, 2.0 * s);
  for (const Point2 & p : {Point2{7.0, 7.0}, Point2{5.0, 9.0}, Point2{9.0, 5.0}}) {
    EXPECT_FALSE(h.contains(p));
  }
  for (const Point2 & p : {Point2{2.0, 2.0}, Point2{9.0, 2.0}, Point2{2.0, 9.0}}) {
    EXPECT_TRUE(h.contains(p));
  }
  for (const Point2 & p : pts) {
    ASSERT_TRUE(h.contains(p));
  }
  // the staircase at the inner corner keeps a few small triangles
  EXPECT_GE(h.area(), 100.0 - 36.0);
  EXPECT_LT(h.area(), 100.0 - 35.0);
  EXPECT_NEAR(testing::convex_hull_area(pts), 100.0 - 18.0, 1e-9);
  // a large alpha gives back the convex hull
  EXPECT_NEAR(concave_hull(pts, 1e6).area(), 100.0 - 18.0, 1e-9);
}

TEST(ConcaveHullTest, AreaBoundedByConvexHull)
{
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point2> pts(40);
    for (Point2 & p : pts) {
      p = {rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    }
    const double alpha = rng.uniform(0.8, 6.0);
    const double convex = testing::convex_hull_area(pts);
    EXPECT_LE(concave_hull(pts, alpha).area(), convex + 1e-9) << trial;
    const HullPolygon full = concave_hull(pts, 1e9);
    EXPECT_NEAR(full.area(), convex, 1e-9) << trial;
    for (const Point2 & p : pts) {
      ASSERT_TRUE(full.contains(p)) << trial;
    }
  }
}

TEST(ConcaveHullTest, DegenerateInput)
{
  const std::vector<Point2> two{{0.0, 0.0}, {1.0, 0.0}};
  const std::vector<Point2> line{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
  for (const auto * pts : {&two, &line}) {
    try {
      concave_hull(*pts, 1.0);
      FAIL();
    } catch (const Error & e) {
      EXPECT_EQ(e.category(), ErrorCategory::kDegenerate);
    }
  }
}

HullPolygon rect_hull(double x0, double y0, double x1, double y1)
{
  return HullPolygon{{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}};
}

TEST(IgnoreMaskTest, CoverAllAndNothing)
{
  const GridSpec spec = GridSpec::forward(20, 10, 0.5);
  Rng rng(5);
  MaskGrid m(spec, 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = rng.bernoulli(0.05) ? 1 : 0;
  }
  const LabelGrid g = make_label_grid(m, spec, deg2rad(60.0), 90.0);
  const Pose2 pose{3.0, -1.0, 0.4};
  EXPECT_EQ(apply_ignore_mask(g, rect_hull(-100.0, -100.0, 100.0, 100.0), pose), g);
  EXPECT_EQ(apply_ignore_mask(g, rect_hull(500.0, 500.0, 501.0, 501.0), pose), LabelGrid(spec, Label::kIgnore));
}

TEST(IgnoreMaskTest, HalfPlaneMatchesPointInPolygon)
{
  const GridSpec spec = GridSpec::forward(40, 30, 0.5);
  const LabelGrid g = make_label_grid(MaskGrid(spec, 0), spec, deg2rad(60.0), 90.0);
  const Pose2 pose{3.0, -2.0, 0.3};
  // global half-plane x >= 10.1, bounded far away
  const HullPolygon h = rect_hull(10.1, -1000.0, 1000.0, 1000.0);
  const LabelGrid out = apply_ignore_mask(g, h, pose);
  std::size_t kept = 0;
  std::size_t masked = 0;
  for (int u = 0; u < spec.height; ++u) {
    for (int v = 0; v < spec.width; ++v) {
      const Point2 c = cell_center({u, v}, spec);
      const Point2 w{
        pose.x + std::cos(pose.yaw) * c.x - std::sin(pose.yaw) * c.y,
        pose.y + std::sin(pose.yaw) * c.x + std::cos(pose.yaw) * c.y};
      const bool inside = testing::point_in_polygon(h.rings[0], w);
      if (g.at(u, v) == Label::kIgnore || !inside) {
        ASSERT_EQ(out.at(u, v), Label::kIgnore) << u << "," << v;
        ++masked;
      } else {
        ASSERT_EQ(out.at(u, v), g.at(u, v)) << u << "," << v;
        ++kept;
      }
    }
  }
  EXPECT_GT(kept, 100u);
  EXPECT_GT(masked, 100u);
}

TEST(IgnoreMaskTest, IndexAgreesWithPolygonOnRandomHulls)
{
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> pts(60);
    for (Point2 & p : pts) {
      p = {rng.uniform(0.0, 20.0), rng.uniform(-8.0, 8.0)};
    }
    const HullPolygon h = concave_hull(pts, rng.uniform(2.0, 6.0));
    const HullIndex idx(h, 0.7);
    for (int k = 0; k < 500; ++k) {
      const Point2 q{rng.uniform(-2.0, 22.0), rng.uniform(-10.0, 10.0)};
      ASSERT_EQ(idx.contains(q), h.contains(q)) << trial;
    }
  }
}

}  // namespace
}  // namespace occgrid
