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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cli.hpp"
#include "occgrid/io.hpp"

namespace occgrid
{
namespace
{

namespace fs = std::filesystem;

int run(std::vector<std::string> args)
{
  args.insert(args.begin(), "occgrid");
  std::vector<char *> argv;
  for (std::string & a : args) {
    argv.push_back(a.data());
  }
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::uint8_t> bytes_of(const fs::path & p) { return read_file(p); }

// Every regular file under `dir` with its contents, by relative path.
std::map<std::string, std::vector<std::uint8_t>> snapshot(const fs::path & dir)
{
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto & e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), dir).string()] = read_file(e.path());
    }
  }
  return out;
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    root_ = fs::temp_directory_path() /
            (std::string("occgrid_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string at(const std::string & rel) const { return (root_ / rel).string(); }

  void simulate(const std::string & dir, int scenes)
  {
    ASSERT_EQ(
      run({"simulate", "--seed", "7", "--scenes", std::to_string(scenes), "--steps", "40", "--height", "64",
           "--width", "24", "--out", at(dir)}),
      kExitOk);
  }

  fs::path root_;
};

TEST_F(CliTest, FullPipelineEmitsThreeReports)
{
  simulate("data", 4);
  const std::string test_scene = at("data/scene_003.ogsb");
  ASSERT_EQ(run({"label", "--scene", test_scene, "--out", at("gt")}), kExitOk);
  ASSERT_EQ(run({"tune", "--ism", "delta", "--val", at("data"), "--frames", "5", "--out", at("thr.json")}), kExitOk);
  ASSERT_EQ(
    run({"classic", "--scene", test_scene, "--ism", "delta", "--frames", "5", "--thresholds", at("thr.json"),
         "--out", at("classic")}),
    kExitOk);
  ASSERT_EQ(run({"raytrace", "--scene", test_scene, "--frames", "5", "--out", at("raytrace")}), kExitOk);
  ASSERT_EQ(
    run({"train", "--data", at("data"), "--split", "50/25/25", "--epochs", "2", "--frames", "5", "--widths",
         "4,8", "--out", at("model.ognm")}),
    kExitOk);
  ASSERT_EQ(
    run({"infer", "--model", at("model.ognm"), "--scene", test_scene, "--frames", "5", "--out", at("net")}),
    kExitOk);
  for (const std::string m : {"classic", "raytrace", "net"}) {
    ASSERT_EQ(run({"eval", "--pred", at(m), "--gt", at("gt"), "--out", at(m + ".json")}), kExitOk);
    const MetricsReport r = read_report(at(m + ".json"));
    EXPECT_EQ(r.n_grids, 2u * 3u) << m;
    EXPECT_GE(r.miou, 0.0);
    EXPECT_LE(r.miou, 1.0);
  }
  // the training log names the held-out scene
  const auto log = bytes_of(at("model.ognm.log.json"));
  EXPECT_NE(std::string(log.begin(), log.end()).find("scene_003.ogsb"), std::string::npos);

  const fs::path grid = fs::directory_iterator(at("gt"))->path();
  ASSERT_EQ(run({"render", "--grid", grid.string(), "--out", at("view.png")}), kExitOk);
  ASSERT_EQ(run({"render", "--grid", at("gt") + "/scene_003_radar_front_t0019.pgm", "--out", at("view.pgm")}), kExitOk);
  const auto png = bytes_of(at("view.png"));
  ASSERT_GT(png.size(), 8u);
  EXPECT_EQ(png[1], 'P');
  EXPECT_EQ(png[2], 'N');
  EXPECT_EQ(png[3], 'G');
}

TEST_F(CliTest, EvalAgainstItselfIsPerfect)
{
  simulate("data", 1);
  ASSERT_EQ(run({"label", "--scene", at("data/scene_000.ogsb"), "--out", at("gt")}), kExitOk);
  ASSERT_EQ(run({"eval", "--pred", at("gt"), "--gt", at("gt"), "--out", at("r.json")}), kExitOk);
  EXPECT_EQ(read_report(at("r.json")).miou, 1.0);
}

TEST_F(CliTest, RerunsAreByteIdentical)
{
  simulate("a", 3);
  simulate("b", 3);
  EXPECT_EQ(snapshot(at("a")), snapshot(at("b")));
  for (const std::string d : {"m1", "m2"}) {
    ASSERT_EQ(
      run({"train", "--data", at("a"), "--split", "67/33/0", "--epochs", "2", "--frames", "3", "--widths", "4,8",
           "--out", at(d + ".ognm")}),
      kExitOk);
    ASSERT_EQ(run({"label", "--scene", at("a/scene_002.ogsb"), "--out", at(d + "_gt")}), kExitOk);
    ASSERT_EQ(
      run({"classic", "--scene", at("a/scene_002.ogsb"), "--ism", "gaussian", "--frames", "3", "--out",
           at(d + "_cl")}),
      kExitOk);
    ASSERT_EQ(run({"eval", "--pred", at(d + "_cl"), "--gt", at(d + "_gt"), "--out", at(d + "_r/r.json")}), kExitOk);
  }
  EXPECT_EQ(bytes_of(at("m1.ognm")), bytes_of(at("m2.ognm")));
  EXPECT_EQ(bytes_of(at("m1.ognm.log.json")), bytes_of(at("m2.ognm.log.json")));
  EXPECT_EQ(snapshot(at("m1_gt")), snapshot(at("m2_gt")));
  EXPECT_EQ(snapshot(at("m1_cl")), snapshot(at("m2_cl")));
  const auto r1 = bytes_of(at("m1_r/r.json"));
  const auto r2 = bytes_of(at("m2_r/r.json"));
  // reports carry the directories in their metadata; compare the metrics
  EXPECT_EQ(read_report(at("m1_r/r.json")).counts, read_report(at("m2_r/r.json")).counts);
  EXPECT_EQ(r1.size(), r2.size());
}

TEST_F(CliTest, InputsAreNotModified)
{
  simulate("data", 1);
  const auto before = snapshot(at("data"));
  ASSERT_EQ(run({"label", "--scene", at("data/scene_000.ogsb"), "--out", at("gt")}), kExitOk);
  ASSERT_EQ(run({"raytrace", "--scene", at("data/scene_000.ogsb"), "--frames", "3", "--out", at("rt")}), kExitOk);
  EXPECT_EQ(snapshot(at("data")), before);
}

TEST_F(CliTest, ExitStatusPerFailureKind)
{
  EXPECT_EQ(run({}), kExitUsage);
  EXPECT_EQ(run({"bogus"}), kExitUsage);
  EXPECT_EQ(run({"simulate", "--out", at("x"), "--no-such-flag"}), kExitUsage);
  EXPECT_EQ(run({"eval", "--pred", at("p")}), kExitUsage);
  EXPECT_EQ(
    run({"raytrace", "--scene", at("missing.ogsb"), "--out", at("o")}), exit_code_for(ErrorCategory::kIo));
  EXPECT_EQ(exit_code_for(ErrorCategory::kIo), 13);

  simulate("data", 1);
  EXPECT_EQ(
    run({"classic", "--scene", at("data/scene_000.ogsb"), "--ism", "bogus", "--out", at("o")}),
    exit_code_for(ErrorCategory::kConfig));
  EXPECT_EQ(
    run({"raytrace", "--scene", at("data/scene_000.ogsb"), "--frames", "21", "--out", at("o")}),
    exit_code_for(ErrorCategory::kConfig));

  OccNetModel m = make_model({2, 4}, 1);
  for (double & p : m.params) {
    p = static_cast<float>(p);
  }
  auto bytes = encode_model(m);
  bytes[20] ^= 0x01;
  write_file_atomic(at("bad.ognm"), bytes);
  EXPECT_EQ(
    run({"infer", "--model", at("bad.ognm"), "--scene", at("data/scene_000.ogsb"), "--out", at("o")}),
    exit_code_for(ErrorCategory::kChecksum));
  write_file_atomic(at("scene.ognm"), bytes_of(at("data/scene_000.ogsb")));
  EXPECT_EQ(
    run({"infer", "--model", at("scene.ognm"), "--scene", at("data/scene_000.ogsb"), "--out", at("o")}),
    exit_code_for(ErrorCategory::kMagic));
  EXPECT_EQ(run({"render", "--grid", at("missing.pgm"), "--out", at("x.png")}), exit_code_for(ErrorCategory::kIo));
}

}  // namespace
}  // namespace occgrid
