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
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "occgrid/io.hpp"

namespace occgrid
{
namespace
{

namespace fs = std::filesystem;

class TempDir
{
public:
  TempDir()
  {
    path_ = fs::temp_directory_path() /
            ("occgrid_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path & path() const { return path_; }

private:
  fs::path path_;
};

// Doubles spread over many magnitudes and signs.
double wild(Rng & rng)
{
  const double m = rng.uniform(-1.0, 1.0);
  return std::ldexp(m, static_cast<int>(rng.index(80)) - 40);
}

SceneBundle random_scene(Rng & rng)
{
  SceneBundle s;
  s.seed = rng.next();
  s.grid = {
    static_cast<int>(1 + rng.index(300)), static_cast<int>(1 + rng.index(300)), 0.1 + rng.uniform(),
    0.1 + rng.uniform(), {wild(rng), wild(rng)}};
  const std::size_t n_radar = 1 + rng.index(3);
  const std::size_t n_lidar = rng.index(2);
  for (std::size_t m = 0; m < n_radar + n_lidar; ++m) {
    s.mounts.push_back(
      {(m < n_radar ? "radar_" : "lidar_") + std::to_string(m), {wild(rng), wild(rng), wild(rng)},
       m < n_radar ? SensorKind::kRadar : SensorKind::kLidar});
  }
  const std::size_t steps = rng.index(6);
  for (std::size_t t = 0; t < steps; ++t) {
    SceneStep step;
    step.timestamp = wild(rng);
    step.ego_pose = {wild(rng), wild(rng), wild(rng)};
    for (std::size_t m = 0; m < n_radar; ++m) {
      RadarFrame f{wild(rng), s.mounts[m].sensor_id, {}};
      f.points.resize(rng.index(kMaxRadarClusters + 1));
      for (RadarPoint & p : f.points) {
        p = {wild(rng), wild(rng), wild(rng), wild(rng)};
      }
      step.radar.push_back(f);
    }
    for (std::size_t m = n_radar; m < n_radar + n_lidar; ++m) {
      LidarSweep l{wild(rng), s.mounts[m].sensor_id, {}};
      l.points.resize(rng.index(500));
      for (Point3 & p : l.points) {
        p = {wild(rng), wild(rng), wild(rng)};
      }
      step.lidar.push_back(l);
    }
    s.steps.push_back(step);
  }
  return s;
}

LabelGrid random_grid(Rng & rng)
{
  const GridSpec spec{
    static_cast<int>(1 + rng.index(60)), static_cast<int>(1 + rng.index(60)), 0.05 + rng.uniform(),
    0.05 + rng.uniform(), {wild(rng), wild(rng)}};
  LabelGrid g(spec);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = static_cast<Label>(rng.index(4));
  }
  return g;
}

OccNetModel random_model(Rng & rng)
{
  std::vector<int> widths(1 + rng.index(3));
  for (int & w : widths) {
    w = static_cast<int>(1 + rng.index(6));
  }
  OccNetModel m = make_model(widths, rng.next());
  for (double & p : m.params) {
    p = static_cast<float>(wild(rng));
  }
  return m;
}

MetricsReport random_report(Rng & rng)
{
  ConfusionCounts c;
  for (auto & row : c.counts) {
    for (auto & x : row) {
      x = rng.index(1u << 20);
    }
  }
  return make_report(c, rng.index(1000));
}

void expect_category(const std::function<void()> & f, ErrorCategory want)
{
  try {
    f();
    ADD_FAILURE() << "no error thrown";
  } catch (const Error & e) {
    EXPECT_EQ(e.category(), want) << e.what();
  }
}

TEST(SceneIoTest, RoundTripIsExact)
{
  Rng rng(61);
  TempDir dir;
  for (int i = 0; i < 20; ++i) {
    const SceneBundle s = random_scene(rng);
    const auto bytes = encode_scene(s);
    EXPECT_EQ(decode_scene(bytes), s) << i;
    const fs::path p = dir.path() / ("s" + std::to_string(i) + ".ogsb");
    write_scene(p, s);
    EXPECT_EQ(read_file(p), bytes);
    EXPECT_EQ(read_scene(p), s);
  }
}

TEST(SceneIoTest, RejectsCorruption)
{
  Rng rng(62);
  SceneBundle s = random_scene(rng);
  while (s.steps.empty()) {
    s = random_scene(rng);
  }
  const auto bytes = encode_scene(s);

  auto bad = bytes;
  bad[0] = 'X';
  expect_category([&] { decode_scene(bad); }, ErrorCategory::kMagic);
  bad = bytes;
  bad[4] = 99;
  expect_category([&] { decode_scene(bad); }, ErrorCategory::kVersion);
  bad = bytes;
  bad[bytes.size() / 2] ^= 0x01;
  expect_category([&] { decode_scene(bad); }, ErrorCategory::kChecksum);
  for (std::size_t keep : {std::size_t{2}, std::size_t{10}, bytes.size() - 1}) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(keep));
    expect_category([&] { decode_scene(cut); }, ErrorCategory::kLength);
  }
  expect_category([] { read_scene("/nonexistent/occgrid/scene.ogsb"); }, ErrorCategory::kIo);
}

TEST(SceneIoTest, TextDumpIsJson)
{
  Rng rng(63);
  const std::string text = scene_to_text(random_scene(rng));
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(text.front(), '{');
}

TEST(GridIoTest, RoundTripIsExact)
{
  Rng rng(64);
  TempDir dir;
  for (int i = 0; i < 20; ++i) {
    const LabelGrid g = random_grid(rng);
    EXPECT_EQ(decode_pgm(encode_pgm(g), g.spec()), g);
    const fs::path p = dir.path() / ("g" + std::to_string(i) + ".pgm");
    write_grid(p, g);
    const LabelGrid back = read_grid(p);
    EXPECT_EQ(back.spec(), g.spec()) << i;
    EXPECT_EQ(back, g) << i;
  }
}

TEST(GridIoTest, FourCategoriesRenderToFourBytes)
{
  const GridSpec spec = GridSpec::forward(2, 2, 1.0);
  const LabelGrid g(spec, {Label::kFree, Label::kOccupied, Label::kUnobserved, Label::kIgnore});
  const auto bytes = encode_pgm(g);
  const std::vector<std::uint8_t> raster(bytes.end() - 4, bytes.end());
  EXPECT_EQ(raster, (std::vector<std::uint8_t>{0, 255, 192, 96}));
  const std::set<std::uint8_t> values(raster.begin(), raster.end());
  EXPECT_EQ(values.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 2), "P5");
}

TEST(GridIoTest, RejectsMalformedPgm)
{
  const GridSpec spec = GridSpec::forward(2, 2, 1.0);
  const auto bytes = encode_pgm(LabelGrid(spec, Label::kFree));
  auto bad = bytes;
  bad[1] = '2';
  expect_category([&] { decode_pgm(bad, spec); }, ErrorCategory::kMagic);
  bad = bytes;
  bad.back() = 7;
  expect_category([&] { decode_pgm(bad, spec); }, ErrorCategory::kFormat);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
  expect_category([&] { decode_pgm(cut, spec); }, ErrorCategory::kLength);
  expect_category([&] { decode_pgm(bytes, GridSpec::forward(3, 2, 1.0)); }, ErrorCategory::kShape);
}

TEST(ModelIoTest, RoundTripIsExact)
{
  Rng rng(65);
  TempDir dir;
  for (int i = 0; i < 20; ++i) {
    const OccNetModel m = random_model(rng);
    EXPECT_EQ(decode_model(encode_model(m)), m) << i;
    const fs::path p = dir.path() / ("m" + std::to_string(i) + ".ognm");
    write_model(p, m);
    EXPECT_EQ(read_model(p), m) << i;
  }
}

TEST(ModelIoTest, RejectsCorruption)
{
  Rng rng(66);
  const auto bytes = encode_model(random_model(rng));
  // every single payload byte flip is caught
  for (std::size_t i = 12; i + 4 < bytes.size(); ++i) {
    auto bad = bytes;
    bad[i] ^= 0x10;
    expect_category([&] { decode_model(bad); }, ErrorCategory::kChecksum);
  }
  auto bad = bytes;
  bad[2] = 'X';
  expect_category([&] { decode_model(bad); }, ErrorCategory::kMagic);
  bad = bytes;
  bad[4] = 2;
  expect_category([&] { decode_model(bad); }, ErrorCategory::kVersion);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 5);
  expect_category([&] { decode_model(cut); }, ErrorCategory::kLength);
  // a scene file is not a model
  expect_category([&] { decode_model(encode_scene(SceneBundle{})); }, ErrorCategory::kMagic);
}

TEST(ReportIoTest, RoundTripIsExact)
{
  Rng rng(67);
  TempDir dir;
  for (int i = 0; i < 20; ++i) {
    const MetricsReport r = random_report(rng);
    const std::map<std::string, std::string> meta{{"method", "m" + std::to_string(i)}};
    const std::string text = report_to_json(r, meta);
    const MetricsReport back = report_from_json(text);
    EXPECT_EQ(back.iou_free, r.iou_free);
    EXPECT_EQ(back.iou_occupied, r.iou_occupied);
    EXPECT_EQ(back.iou_unobserved, r.iou_unobserved);
    EXPECT_EQ(back.miou, r.miou);
    EXPECT_EQ(back.counts, r.counts);
    EXPECT_EQ(back.n_grids, r.n_grids);
    EXPECT_EQ(report_to_json(back, meta), text);
    const fs::path p = dir.path() / ("r" + std::to_string(i) + ".json");
    write_report(p, r, meta);
    EXPECT_EQ(read_report(p).counts, r.counts);
  }
  expect_category([] { report_from_json("{\"miou\": 1.0}"); }, ErrorCategory::kFormat);
  expect_category([] { report_from_json("not json"); }, ErrorCategory::kFormat);
}

TEST(AtomicWriteTest, ReplacesWholeFileAndLeavesNoTemporary)
{
  TempDir dir;
  const fs::path p = dir.path() / "out.txt";
  write_file_atomic(p, std::string("first version, longer"));
  write_file_atomic(p, std::string("second"));
  const auto bytes = read_file(p);
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "second");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}), 1);
  expect_category([&] { write_file_atomic(dir.path() / "missing" / "x", std::string("x")); }, ErrorCategory::kIo);
}

TEST(Crc32Test, KnownValue)
{
  const std::string s = "123456789";
  EXPECT_EQ(crc32_of({reinterpret_cast<const std::uint8_t *>(s.data()), s.size()}), 0xCBF43926u);
}

}  // namespace
}  // namespace occgrid
