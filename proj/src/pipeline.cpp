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


#include "occgrid/pipeline.hpp"

#include "occgrid/raytrace.hpp"

namespace occgrid
{

Window window_ending_at(std::size_t last, std::size_t k)
{
  if (k == 0 || k > last + 1) {
    throw Error(ErrorCategory::kConfig, "window_ending_at: window starts before the scene");
  }
  return {last + 1 - k, last + 1};
}

LabeledSet label_scenes(
  std::span<const SceneBundle> scenes, const LabelConfig & cfg, const GridSpec & spec,
  std::size_t stride)
{
  LabeledSet out;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const SceneLabeler labeler(scenes[s], cfg);
    for (const Window & w : make_windows(scenes[s].steps.size(), 1, stride)) {
      for (const SensorMount & m : scenes[s].radar_mounts()) {
        out.refs.push_back({s, m.sensor_id, w.last()});
        out.labels.push_back(labeler.label(m.sensor_id, w.last(), spec));
      }
    }
  }
  return out;
}

std::vector<MaskGrid> build_inputs(
  std::span<const SceneBundle> scenes, std::span<const FrameRef> refs, std::size_t k,
  const GridSpec & spec, double velocity_threshold)
{
  std::vector<MaskGrid> out;
  out.reserve(refs.size());
  for (const FrameRef & r : refs) {
    out.push_back(window_input(
      scenes[r.scene], r.sensor_id, window_ending_at(r.step, k), spec, velocity_threshold));
  }
  return out;
}

LabelGrid raytrace_predict(const MaskGrid & input, double fov_half_angle, double max_range)
{
  return visibility_label(input.spec(), Point2{0.0, 0.0}, input, fov_half_angle, max_range);
}

std::vector<LabelGrid> raytrace_predict(
  std::span<const MaskGrid> inputs, double fov_half_angle, double max_range)
{
  std::vector<LabelGrid> out;
  out.reserve(inputs.size());
  for (const MaskGrid & m : inputs) {
    out.push_back(raytrace_predict(m, fov_half_angle, max_range));
  }
  return out;
}

std::vector<RealGrid> classic_predict(
  std::span<const SceneBundle> scenes, std::span<const FrameRef> refs, std::size_t k,
  const GridSpec & spec, const IsmConfig & cfg, double velocity_threshold)
{
  std::vector<RealGrid> out;
  out.reserve(refs.size());
  for (const FrameRef & r : refs) {
    const SceneBundle & scene = scenes[r.scene];
    out.push_back(classic_window_probability(
      window_data(scene, r.sensor_id, window_ending_at(r.step, k)), scene.mount(r.sensor_id), spec,
      cfg, velocity_threshold));
  }
  return out;
}

std::vector<Sample> make_samples(std::span<const MaskGrid> inputs, std::span<const LabelGrid> labels)
{
  if (inputs.size() != labels.size()) {
    throw Error(ErrorCategory::kConfig, "make_samples: inputs and labels differ in count");
  }
  std::vector<Sample> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.push_back({inputs[i], labels[i]});
  }
  return out;
}

BenchmarkConfig::BenchmarkConfig()
{
  scene.grid = GridSpec::forward(128, 48, 0.4);
  label.max_range = scene.grid.extent_x();
  label.alpha = 15.0;
}

BenchmarkData make_benchmark(const BenchmarkConfig & cfg)
{
  BenchmarkData d;
  std::size_t i = 0;
  auto gen = [&](std::size_t n, std::vector<SceneBundle> & dst) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      dst.push_back(gen_scene(mix_seed(cfg.seed, i), cfg.scene));
    }
  };
  gen(cfg.n_train, d.train);
  gen(cfg.n_val, d.val);
  gen(cfg.n_test, d.test);
  d.train_labels = label_scenes(d.train, cfg.label, cfg.scene.grid, cfg.stride);
  d.val_labels = label_scenes(d.val, cfg.label, cfg.scene.grid, cfg.stride);
  d.test_labels = label_scenes(d.test, cfg.label, cfg.scene.grid, cfg.stride);
  return d;
}

}  // namespace occgrid
