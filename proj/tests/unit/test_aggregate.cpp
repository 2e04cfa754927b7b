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

#include <algorithm>

#include "occgrid/aggregate.hpp"

namespace occgrid
{
namespace
{

RadarFrame frame_with(std::vector<RadarPoint> pts)
{
  RadarFrame f;
  f.sensor_id = "r";
  f.points = std::move(pts);
  return f;
}

SensorMount radar_mount(Pose2 pose = {})
{
  return {"r", pose, SensorKind::kRadar};
}

TEST(FilterDynamicTest, Examples)
{
  const RadarFrame still = frame_with({{1, 2, 0, 0}, {3, 4, 0, 0}});
  EXPECT_EQ(filter_dynamic(still, 0.5), still);
  const RadarFrame mixed = frame_with({{1, 2, 3, 4}, {3, 4, 0.3, 0.4}});
  const RadarFrame kept = filter_dynamic(mixed, 0.5);
  ASSERT_EQ(kept.points.size(), 1u);
  EXPECT_EQ(kept.points[0], (RadarPoint{3, 4, 0.3, 0.4}));
  EXPECT_TRUE(filter_dynamic(frame_with({}), 0.5).points.empty());
}

TEST(AggregateFramesTest, SingleFrameIsIdentity)
{
  const std::vector<RadarFrame> frames{frame_with({{5, 1, 0, 0}, {7, -2, 0, 0}})};
  const std::vector<Pose2> poses{{10, 3, 0.4}};
  const auto pts = aggregate_frames(frames, poses, radar_mount({3.6, 0, 0}), {1, 0.5});
  EXPECT_EQ(pts, (std::vector<Point2>{{5, 1}, {7, -2}}));
}

TEST(AggregateFramesTest, StationaryEgoKeepsCoordinates)
{
  const std::vector<RadarFrame> frames{
    frame_with({{1, 1, 0, 0}}), frame_with({{2, 2, 0, 0}}), frame_with({{3, 3, 0, 0}})};
  const std::vector<Pose2> poses(3, Pose2{4, 5, 0.7});
  auto pts = aggregate_frames(frames, poses, radar_mount({1, 0, 0.2}), {3, 0.5});
  ASSERT_EQ(pts.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(pts[i].x, i + 1.0, 1e-12);
    EXPECT_NEAR(pts[i].y, i + 1.0, 1e-12);
  }
}

TEST(AggregateFramesTest, ForwardMotionShiftsOlderPoints)
{
  const std::vector<RadarFrame> frames{frame_with({{5, 0, 0, 0}}), frame_with({})};
  const std::vector<Pose2> poses{{0, 0, 0}, {1, 0, 0}};
  const auto pts = aggregate_frames(frames, poses, radar_mount({3.6, 0, 0}), {2, 0.5});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].x, 4.0, 1e-12);
  EXPECT_NEAR(pts[0].y, 0.0, 1e-12);
}

TEST(AggregateFramesTest, MismatchedListsThrow)
{
  const std::vector<RadarFrame> frames(2, frame_with({}));
  const std::vector<Pose2> poses(3);
  EXPECT_THROW(aggregate_frames(frames, poses, radar_mount(), {2, 0.5}), Error);
  const std::vector<Pose2> two(2);
  EXPECT_THROW(aggregate_frames(frames, two, radar_mount(), {3, 0.5}), Error);
}

TEST(AggregateFramesTest, RasterIsFrameOrderInvariant)
{
  Rng rng(9);
  const GridSpec spec = GridSpec::forward(40, 20, 0.5);
  std::vector<RadarFrame> frames;
  std::vector<Pose2> poses;
  for (int j = 0; j < 5; ++j) {
    std::vector<RadarPoint> pts;
    for (int i = 0; i < 6; ++i) {
      pts.push_back({rng.uniform(0, 20), rng.uniform(-5, 5), 0, 0});
    }
    frames.push_back(frame_with(pts));
    poses.push_back({0.8 * j, 0.1 * j, 0.01 * j});
  }
  const AggregationConfig cfg{5, 0.5};
  const SensorMount m = radar_mount({3.6, 0, 0});
  const MaskGrid ref = rasterize_bev(aggregate_frames(frames, poses, m, cfg), spec);
  // swap two older frames together with their poses; the reference frame stays last
  std::swap(frames[0], frames[2]);
  std::swap(poses[0], poses[2]);
  EXPECT_EQ(rasterize_bev(aggregate_frames(frames, poses, m, cfg), spec), ref);
}

TEST(RasterizeTest, Examples)
{
  const GridSpec spec = GridSpec::standard();
  EXPECT_EQ(rasterize_bev({}, spec), MaskGrid(spec, 0));
  const std::vector<Point2> same{{0.1, 0.1}, {0.15, 0.12}};
  const MaskGrid g = rasterize_bev(same, spec);
  EXPECT_EQ(g.at(0, 25), 1);
  EXPECT_EQ(std::count(g.data().begin(), g.data().end(), 1), 1);
  const std::vector<Point2> outside{{-1.0, 0.0}, {100.0, 0.0}};
  EXPECT_EQ(rasterize_bev(outside, spec), MaskGrid(spec, 0));
}

TEST(RasterizeTest, BitsNeverExceedPoints)
{
  Rng rng(2);
  const GridSpec spec = GridSpec::forward(30, 30, 0.5);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point2> pts;
    const int n = static_cast<int>(rng.index(50));
    for (int i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(-2, 17), rng.uniform(-9, 9)});
    }
    const MaskGrid g = rasterize_bev(pts, spec);
    EXPECT_LE(std::count(g.data().begin(), g.data().end(), 1), n);
  }
}

TEST(WindowsTest, NonOverlappingStrided)
{
  EXPECT_EQ(make_windows(10, 3), (std::vector<Window>{{0, 3}, {3, 6}, {6, 9}}));
  EXPECT_EQ(make_windows(120, 20, 20).size(), 6u);
  EXPECT_EQ(make_windows(120, 1, 20).front(), (Window{19, 20}));
  EXPECT_EQ(make_windows(120, 10, 20).back(), (Window{110, 120}));
  EXPECT_THROW(make_windows(10, 0), Error);
  EXPECT_THROW(make_windows(10, 5, 3), Error);
}

}  // namespace
}  // namespace occgrid
