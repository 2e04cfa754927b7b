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


#ifndef OCCGRID__PIPELINE_HPP_
#define OCCGRID__PIPELINE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "occgrid/aggregate.hpp"
#include "occgrid/autolabel.hpp"
#include "occgrid/classic_ism.hpp"
#include "occgrid/occnet.hpp"
#include "occgrid/simworld.hpp"

namespace occgrid
{

/// One radar frame to predict: the last step of a window in some scene.
struct FrameRef
{
  std::size_t scene = 0;
  std::string sensor_id;
  std::size_t step = 0;
  friend bool operator==(const FrameRef &, const FrameRef &) = default;
};

struct LabeledSet
{
  std::vector<FrameRef> refs;
  std::vector<LabelGrid> labels;
};

/// Window of k frames whose last frame is `last`.
Window window_ending_at(std::size_t last, std::size_t k);

/// Ground truth for every radar at every window end (steps stride-1,
/// 2*stride-1, ...) of every scene.
LabeledSet label_scenes(
  std::span<const SceneBundle> scenes, const LabelConfig & cfg, const GridSpec & spec,
  std::size_t stride);

/// Aggregated and rasterized radar input of each referenced frame.
std::vector<MaskGrid> build_inputs(
  std::span<const SceneBundle> scenes, std::span<const FrameRef> refs, std::size_t k,
  const GridSpec & spec, double velocity_threshold);

/// The ray-trace baseline: visibility labels of the rasterized input seen
/// from the sensor at the grid frame origin.
LabelGrid raytrace_predict(const MaskGrid & input, double fov_half_angle, double max_range);
std::vector<LabelGrid> raytrace_predict(
  std::span<const MaskGrid> inputs, double fov_half_angle, double max_range);

/// Posterior occupancy probability of each referenced frame under a
/// classic ISM filtered over k frames.
std::vector<RealGrid> classic_predict(
  std::span<const SceneBundle> scenes, std::span<const FrameRef> refs, std::size_t k,
  const GridSpec & spec, const IsmConfig & cfg, double velocity_threshold);

std::vector<Sample> make_samples(std::span<const MaskGrid> inputs, std::span<const LabelGrid> labels);

/// The seeded synthetic benchmark: scenes split train / val / test.
struct BenchmarkConfig
{
  std::uint64_t seed = 7;
  std::size_t n_train = 10;
  std::size_t n_val = 2;
  std::size_t n_test = 3;
  std::size_t stride = 20;
  double velocity_threshold = 0.5;
  SceneParams scene;
  LabelConfig label;

  BenchmarkConfig();
};

struct BenchmarkData
{
  std::vector<SceneBundle> train;
  std::vector<SceneBundle> val;
  std::vector<SceneBundle> test;
  LabeledSet train_labels;
  LabeledSet val_labels;
  LabeledSet test_labels;
};

/// Scene i (over the concatenated split order) uses seed mix_seed(seed, i).
BenchmarkData make_benchmark(const BenchmarkConfig & cfg);

}  // namespace occgrid

#endif  // OCCGRID__PIPELINE_HPP_
