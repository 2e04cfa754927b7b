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


#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "occgrid/io.hpp"
#include "occgrid/pipeline.hpp"

namespace occgrid
{
namespace
{

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 7;
constexpr std::size_t kDefaultStride = 20;

void setup_logging()
{
  auto logger = spdlog::get("occgrid");
  if (!logger) {
    logger = spdlog::stderr_color_st("occgrid");
  }
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char * env = std::getenv("OCCGRID_VERBOSITY");
  spdlog::set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::info);
}

std::string read_text(const fs::path & p)
{
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

json parse_json_file(const fs::path & p)
{
  try {
    return json::parse(read_text(p));
  } catch (const json::exception & e) {
    throw Error(ErrorCategory::kFormat, p.string() + ": " + e.what());
  }
}

LabelConfig load_label_config(const std::string & path)
{
  LabelConfig cfg;
  if (path.empty()) {
    return cfg;
  }
  const json j = parse_json_file(path);
  try {
    cfg.min_count = j.value("min_count", cfg.min_count);
    cfg.z_min = j.value("z_min", cfg.z_min);
    cfg.z_max = j.value("z_max", cfg.z_max);
    cfg.morph_kernel = j.value("morph_kernel", cfg.morph_kernel);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("fov_half_angle_deg")) {
      cfg.fov_half_angle = deg2rad(j.at("fov_half_angle_deg").get<double>());
    }
    cfg.max_range = j.value("max_range", cfg.max_range);
    cfg.hull_thinning = j.value("hull_thinning", cfg.hull_thinning);
  } catch (const json::exception & e) {
    throw Error(ErrorCategory::kFormat, path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<int> parse_int_list(const std::string & text, char sep)
{
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception &) {
      throw Error(ErrorCategory::kConfig, "cannot parse '" + text + "' as a list of integers");
    }
  }
  return out;
}

std::vector<double> parse_real_list(const std::string & text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception &) {
      throw Error(ErrorCategory::kConfig, "cannot parse '" + text + "' as a list of numbers");
    }
  }
  return out;
}

void ensure_dir(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCategory::kIo, "cannot create directory " + dir.string());
  }
}

void ensure_parent(const fs::path & file)
{
  if (file.has_parent_path()) {
    ensure_dir(file.parent_path());
  }
}

std::vector<fs::path> list_files(const fs::path & dir, const std::string & ext)
{
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCategory::kIo, "not a directory: " + dir.string());
  }
  std::vector<fs::path> out;
  for (const auto & e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SceneBundle> load_scenes(const std::vector<fs::path> & paths)
{
  std::vector<SceneBundle> out;
  for (const fs::path & p : paths) {
    spdlog::debug("reading scene {}", p.string());
    out.push_back(read_scene(p));
  }
  return out;
}

std::string frame_name(const fs::path & scene_path, const FrameRef & r)
{
  char step[16];
  std::snprintf(step, sizeof(step), "t%04zu", r.step);
  return scene_path.stem().string() + "_" + r.sensor_id + "_" + step + ".pgm";
}

// Window ends of every radar of one scene.
std::vector<FrameRef> frame_refs(const SceneBundle & scene, std::size_t scene_index, std::size_t stride)
{
  std::vector<FrameRef> refs;
  for (const Window & w : make_windows(scene.steps.size(), 1, stride)) {
    for (const SensorMount & m : scene.radar_mounts()) {
      refs.push_back({scene_index, m.sensor_id, w.last()});
    }
  }
  return refs;
}

void check_frames(std::size_t k, std::size_t stride)
{
  if (k < 1 || k > stride) {
    throw Error(ErrorCategory::kConfig, "--frames must lie in [1, stride]");
  }
}

IsmKind parse_ism(const std::string & s)
{
  if (s == "delta") {
    return IsmKind::kDelta;
  }
  if (s == "gaussian") {
    return IsmKind::kGaussian;
  }
  throw Error(ErrorCategory::kConfig, "unknown ISM '" + s + "'");
}

void write_png(const fs::path & path, int width, int height, const std::vector<std::uint8_t> & pixels)
{
  fs::path tmp = path;
  tmp += ".tmp";
  FILE * fp = std::fopen(tmp.c_str(), "wb");
  if (fp == nullptr) {
    throw Error(ErrorCategory::kIo, "cannot open " + tmp.string());
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error(ErrorCategory::kIo, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
    PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < height; ++r) {
    png_write_row(png, pixels.data() + static_cast<std::size_t>(r) * width);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------

struct SimulateArgs
{
  std::uint64_t seed = kDefaultSeed;
  std::size_t scenes = 1;
  std::string out;
  std::size_t steps = 120;
  int height = 215;
  int width = 50;
  double cell = 0.4;
  bool text = false;
};

void run_simulate(const SimulateArgs & a)
{
  ensure_dir(a.out);
  SceneParams params;
  params.steps = a.steps;
  params.grid = GridSpec::forward(a.height, a.width, a.cell);
  for (std::size_t i = 0; i < a.scenes; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%03zu.ogsb", i);
    const SceneBundle scene = gen_scene(mix_seed(a.seed, i), params);
    write_scene(fs::path(a.out) / name, scene);
    if (a.text) {
      write_file_atomic(fs::path(a.out) / (std::string(name) + ".json"), scene_to_text(scene));
    }
    spdlog::info("wrote {} ({} steps, {} radar frames)", name, scene.steps.size(),
      scene.radar_frame_count());
  }
}

struct SceneArgs
{
  std::vector<std::string> scenes;
  std::string out;
  std::size_t frames = 1;
  std::size_t stride = kDefaultStride;
  std::string label_config;
};

void run_label(const SceneArgs & a)
{
  ensure_dir(a.out);
  const LabelConfig cfg = load_label_config(a.label_config);
  for (const std::string & path : a.scenes) {
    const SceneBundle scene = read_scene(path);
    const SceneLabeler labeler(scene, cfg);
    for (const FrameRef & r : frame_refs(scene, 0, a.stride)) {
      write_grid(fs::path(a.out) / frame_name(path, r), labeler.label(r.sensor_id, r.step, scene.grid));
    }
    spdlog::info("labeled {}", path);
  }
}

void run_raytrace(const SceneArgs & a)
{
  check_frames(a.frames, a.stride);
  ensure_dir(a.out);
  const LabelConfig cfg = load_label_config(a.label_config);
  for (const std::string & path : a.scenes) {
    const SceneBundle scene = read_scene(path);
    const auto refs = frame_refs(scene, 0, a.stride);
    const auto inputs = build_inputs(std::span(&scene, 1), refs, a.frames, scene.grid, 0.5);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      write_grid(fs::path(a.out) / frame_name(path, refs[i]),
        raytrace_predict(inputs[i], cfg.fov_half_angle, cfg.max_range));
    }
    spdlog::info("ray-traced {}", path);
  }
}

struct ClassicArgs
{
  SceneArgs base;
  std::string ism = "delta";
  std::string thresholds;
  double t_occ = IsmConfig{}.t_occ;
  double t_free = IsmConfig{}.t_free;
};

void run_classic(const ClassicArgs & a)
{
  check_frames(a.base.frames, a.base.stride);
  ensure_dir(a.base.out);
  IsmConfig cfg;
  cfg.kind = parse_ism(a.ism);
  cfg.t_occ = a.t_occ;
  cfg.t_free = a.t_free;
  if (!a.thresholds.empty()) {
    const json j = parse_json_file(a.thresholds);
    try {
      cfg.t_occ = j.at("t_occ").get<double>();
      cfg.t_free = j.at("t_free").get<double>();
    } catch (const json::exception & e) {
      throw Error(ErrorCategory::kFormat, a.thresholds + ": " + e.what());
    }
  }
  cfg.validate();
  for (const std::string & path : a.base.scenes) {
    const SceneBundle scene = read_scene(path);
    const auto refs = frame_refs(scene, 0, a.base.stride);
    const auto probs = classic_predict(std::span(&scene, 1), refs, a.base.frames, scene.grid, cfg, 0.5);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      write_grid(fs::path(a.base.out) / frame_name(path, refs[i]),
        classify_grid(probs[i], cfg.t_occ, cfg.t_free));
    }
    spdlog::info("classic {} ISM on {}", a.ism, path);
  }
}

struct TrainArgs
{
  std::string data;
  std::string split = "80/5/15";
  std::string loss = "lovasz";
  std::string ce_weights = "1,1,1";
  int epochs = 30;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::size_t frames = 20;
  std::size_t stride = kDefaultStride;
  std::string widths = "16,32,64";
  int batch = 8;
  std::string label_config;
};

void run_train(const TrainArgs & a)
{
  check_frames(a.frames, a.stride);
  const auto ratios = parse_int_list(a.split, '/');
  if (ratios.size() != 3 || ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] < 0) {
    throw Error(ErrorCategory::kConfig, "--split must look like 80/5/15");
  }
  const auto files = list_files(a.data, ".ogsb");
  const double total = ratios[0] + ratios[1] + ratios[2];
  const std::size_t n = files.size();
  const auto n_train = static_cast<std::size_t>(std::llround(n * ratios[0] / total));
  const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * ratios[1] / total)));
  if (n_train < 1 || n_train + n_val > n) {
    throw Error(ErrorCategory::kTraining,
      "split leaves an empty train or validation set for " + std::to_string(n) + " scenes");
  }
  const std::vector<fs::path> train_files(files.begin(), files.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<fs::path> val_files(files.begin() + static_cast<std::ptrdiff_t>(n_train),
    files.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));

  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.seed = a.seed;
  cfg.k = static_cast<int>(a.frames);
  cfg.batch_size = a.batch;
  cfg.widths = parse_int_list(a.widths, ',');
  if (a.loss == "lovasz") {
    cfg.loss.kind = LossKind::kLovasz;
  } else if (a.loss == "wce") {
    cfg.loss.kind = LossKind::kWeightedCe;
    const auto w = parse_real_list(a.ce_weights);
    if (w.size() != kNumClasses) {
      throw Error(ErrorCategory::kConfig, "--ce-weights needs three values");
    }
    std::copy(w.begin(), w.end(), cfg.loss.ce_weights.begin());
  } else {
    throw Error(ErrorCategory::kConfig, "unknown loss '" + a.loss + "'");
  }
  cfg.validate();
  const LabelConfig lcfg = load_label_config(a.label_config);

  auto build = [&](const std::vector<fs::path> & paths) {
    const auto scenes = load_scenes(paths);
    if (scenes.empty()) {
      throw Error(ErrorCategory::kTraining, "empty split");
    }
    const LabeledSet labels = label_scenes(scenes, lcfg, scenes.front().grid, a.stride);
    const auto inputs = build_inputs(scenes, labels.refs, a.frames, scenes.front().grid, 0.5);
    return make_samples(inputs, labels.labels);
  };
  const auto train_set = build(train_files);
  const auto val_set = build(val_files);
  spdlog::info("training on {} samples, validating on {}", train_set.size(), val_set.size());
  const TrainResult res = train(train_set, val_set, cfg, [](const EpochLog & e) {
    spdlog::info("epoch {:3d} lr {:.5f} loss {:.5f} val mIoU {:.4f}", e.epoch, e.lr, e.train_loss, e.val_miou);
  });
  ensure_parent(a.out);
  write_model(a.out, res.model);

  json log;
  log["seed"] = a.seed;
  log["frames"] = a.frames;
  log["loss"] = a.loss;
  log["initial_val_miou"] = res.initial_val_miou;
  log["best_epoch"] = res.best_epoch;
  auto names = [](const std::vector<fs::path> & ps) {
    json arr = json::array();
    for (const auto & p : ps) {
      arr.push_back(p.filename().string());
    }
    return arr;
  };
  log["train_scenes"] = names(train_files);
  log["val_scenes"] = names(val_files);
  log["test_scenes"] = names({files.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), files.end()});
  log["epochs"] = json::array();
  for (const EpochLog & e : res.log) {
    log["epochs"].push_back(
      {{"epoch", e.epoch}, {"lr", e.lr}, {"train_loss", e.train_loss}, {"val_miou", e.val_miou}});
  }
  write_file_atomic(a.out + ".log.json", log.dump(1) + "\n");
}

struct InferArgs
{
  SceneArgs base;
  std::string model;
};

void run_infer(const InferArgs & a)
{
  check_frames(a.base.frames, a.base.stride);
  ensure_dir(a.base.out);
  const OccNetModel model = read_model(a.model);
  for (const std::string & path : a.base.scenes) {
    const SceneBundle scene = read_scene(path);
    const auto refs = frame_refs(scene, 0, a.base.stride);
    const auto inputs = build_inputs(std::span(&scene, 1), refs, a.base.frames, scene.grid, 0.5);
    const auto preds = infer(model, inputs);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      write_grid(fs::path(a.base.out) / frame_name(path, refs[i]), preds[i]);
    }
    spdlog::info("inferred {}", path);
  }
}

struct EvalArgs
{
  std::string pred;
  std::string gt;
  std::string out;
};

void run_eval(const EvalArgs & a)
{
  const auto gt_files = list_files(a.gt, ".pgm");
  if (gt_files.empty()) {
    throw Error(ErrorCategory::kIo, "no label grids in " + a.gt);
  }
  std::vector<LabelGrid> preds;
  std::vector<LabelGrid> truths;
  for (const fs::path & g : gt_files) {
    const fs::path p = fs::path(a.pred) / g.filename();
    if (!fs::exists(p)) {
      throw Error(ErrorCategory::kIo, "missing prediction " + p.string());
    }
    truths.push_back(read_grid(g));
    preds.push_back(read_grid(p));
  }
  const MetricsReport r = evaluate(preds, truths);
  ensure_parent(a.out);
  write_report(a.out, r, {{"pred", a.pred}, {"gt", a.gt}});
  spdlog::info("mIoU {:.4f} (free {:.4f}, occupied {:.4f}, unobserved {:.4f}) over {} grids", r.miou,
    r.iou_free, r.iou_occupied, r.iou_unobserved, r.n_grids);
}

struct TuneArgs
{
  std::string ism = "delta";
  std::string val;
  std::size_t frames = 20;
  std::size_t stride = kDefaultStride;
  std::string label_config;
  std::string out;
};

void run_tune(const TuneArgs & a)
{
  check_frames(a.frames, a.stride);
  IsmConfig cfg;
  cfg.kind = parse_ism(a.ism);
  const auto scenes = load_scenes(list_files(a.val, ".ogsb"));
  if (scenes.empty()) {
    throw Error(ErrorCategory::kIo, "no scenes in " + a.val);
  }
  const LabelConfig lcfg = load_label_config(a.label_config);
  const LabeledSet labels = label_scenes(scenes, lcfg, scenes.front().grid, a.stride);
  const auto probs = classic_predict(scenes, labels.refs, a.frames, scenes.front().grid, cfg, 0.5);
  const auto candidates = default_threshold_candidates();
  const TuneResult res = tune_thresholds(probs, labels.labels, candidates);
  json j{{"ism", a.ism}, {"frames", a.frames}, {"t_occ", res.best.t_occ}, {"t_free", res.best.t_free},
    {"val_miou", res.miou}};
  ensure_parent(a.out);
  write_file_atomic(a.out, j.dump(1) + "\n");
  spdlog::info("best thresholds t_occ {:.2f} t_free {:.2f}, val mIoU {:.4f}", res.best.t_occ,
    res.best.t_free, res.miou);
}

struct RenderArgs
{
  std::string grid;
  std::string out;
};

void run_render(const RenderArgs & a)
{
  const LabelGrid g = read_grid(a.grid);
  // far range at the top, left of the sensor on the left
  const int w = g.width();
  const int h = g.height();
  std::vector<std::uint8_t> px(g.size());
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      px[static_cast<std::size_t>(h - 1 - u) * w + (w - 1 - v)] = label_to_byte(g.at(u, v));
    }
  }
  ensure_parent(a.out);
  const std::string ext = fs::path(a.out).extension().string();
  if (ext == ".png") {
    write_png(a.out, w, h, px);
  } else if (ext == ".pgm") {
    const std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), px.begin(), px.end());
    write_file_atomic(a.out, bytes);
  } else {
    throw Error(ErrorCategory::kConfig, "--out must end in .png or .pgm");
  }
}

}  // namespace

int exit_code_for(ErrorCategory c) { return 10 + static_cast<int>(c); }

int cli_main(int argc, char ** argv)
{
  CLI::App app{"Radar occupancy grid toolkit: simulation, labeling, classic and learned mapping"};
  app.require_subcommand(1);
  std::function<void()> action;

  SimulateArgs sim;
  auto * s = app.add_subcommand("simulate", "Generate synthetic scenes");
  s->add_option("--seed", sim.seed, "Base seed")->default_val(kDefaultSeed);
  s->add_option("--scenes", sim.scenes, "Number of scenes")->check(CLI::PositiveNumber);
  s->add_option("--out", sim.out, "Output directory")->required();
  s->add_option("--steps", sim.steps, "Timesteps per scene")->check(CLI::PositiveNumber);
  s->add_option("--height", sim.height, "Grid rows")->check(CLI::PositiveNumber);
  s->add_option("--width", sim.width, "Grid columns")->check(CLI::PositiveNumber);
  s->add_option("--cell", sim.cell, "Cell size in metres")->check(CLI::PositiveNumber);
  s->add_flag("--text", sim.text, "Also write a JSON dump of each scene");
  s->callback([&] { action = [&] { run_simulate(sim); }; });

  auto add_scene_opts = [](CLI::App * cmd, SceneArgs & a, bool frames) {
    cmd->add_option("--scene", a.scenes, "Scene file(s)")->required()->expected(1, -1);
    cmd->add_option("--out", a.out, "Output directory")->required();
    if (frames) {
      cmd->add_option("--frames", a.frames, "Aggregated frames k")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--stride", a.stride, "Steps between predicted frames")->check(CLI::PositiveNumber);
    cmd->add_option("--label-config", a.label_config, "JSON label configuration");
  };

  SceneArgs lab;
  auto * l = app.add_subcommand("label", "Auto-label radar frames from lidar");
  add_scene_opts(l, lab, false);
  l->add_option("--config", lab.label_config, "JSON label configuration");
  l->callback([&] { action = [&] { run_label(lab); }; });

  ClassicArgs cls;
  auto * c = app.add_subcommand("classic", "Classic inverse sensor model mapping");
  add_scene_opts(c, cls.base, true);
  c->add_option("--ism", cls.ism, "delta or gaussian");
  c->add_option("--thresholds", cls.thresholds, "Thresholds JSON from `tune`");
  c->add_option("--t-occ", cls.t_occ, "Occupied threshold");
  c->add_option("--t-free", cls.t_free, "Free threshold");
  c->callback([&] { action = [&] { run_classic(cls); }; });

  SceneArgs rt;
  auto * r = app.add_subcommand("raytrace", "Ray-trace the aggregated radar input");
  add_scene_opts(r, rt, true);
  r->callback([&] { action = [&] { run_raytrace(rt); }; });

  TrainArgs tr;
  auto * t = app.add_subcommand("train", "Train the occupancy network");
  t->add_option("--data", tr.data, "Directory of scene files")->required();
  t->add_option("--split", tr.split, "train/val/test percentages");
  t->add_option("--loss", tr.loss, "lovasz or wce");
  t->add_option("--ce-weights", tr.ce_weights, "Class weights for wce, e.g. 1,2,1");
  t->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::PositiveNumber);
  t->add_option("--seed", tr.seed, "Seed")->default_val(kDefaultSeed);
  t->add_option("--out", tr.out, "Model file")->required();
  t->add_option("--frames", tr.frames, "Aggregated frames k")->check(CLI::PositiveNumber);
  t->add_option("--stride", tr.stride, "Steps between training frames")->check(CLI::PositiveNumber);
  t->add_option("--widths", tr.widths, "Channel widths, e.g. 16,32,64");
  t->add_option("--batch", tr.batch, "Batch size")->check(CLI::PositiveNumber);
  t->add_option("--label-config", tr.label_config, "JSON label configuration");
  t->callback([&] { action = [&] { run_train(tr); }; });

  InferArgs inf;
  auto * i = app.add_subcommand("infer", "Predict grids with a trained network");
  add_scene_opts(i, inf.base, true);
  i->add_option("--model", inf.model, "Model file")->required();
  i->callback([&] { action = [&] { run_infer(inf); }; });

  EvalArgs ev;
  auto * e = app.add_subcommand("eval", "Compare predicted grids with labels");
  e->add_option("--pred", ev.pred, "Prediction directory")->required();
  e->add_option("--gt", ev.gt, "Label directory")->required();
  e->add_option("--out", ev.out, "Report file")->required();
  e->callback([&] { action = [&] { run_eval(ev); }; });

  TuneArgs tu;
  auto * u = app.add_subcommand("tune", "Tune classic ISM thresholds on validation scenes");
  u->add_option("--ism", tu.ism, "delta or gaussian");
  u->add_option("--val", tu.val, "Directory of validation scenes")->required();
  u->add_option("--frames", tu.frames, "Aggregated frames k")->check(CLI::PositiveNumber);
  u->add_option("--stride", tu.stride, "Steps between frames")->check(CLI::PositiveNumber);
  u->add_option("--label-config", tu.label_config, "JSON label configuration");
  u->add_option("--out", tu.out, "Thresholds JSON")->required();
  u->callback([&] { action = [&] { run_tune(tu); }; });

  RenderArgs rn;
  auto * g = app.add_subcommand("render", "Render a label grid as an image");
  g->add_option("--grid", rn.grid, "Grid file")->required();
  g->add_option("--out", rn.out, "Output .png or .pgm")->required();
  g->callback([&] { action = [&] { run_render(rn); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp & ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError & ex) {
    app.exit(ex);
    return kExitUsage;
  }
  setup_logging();
  try {
    action();
  } catch (const Error & ex) {
    spdlog::error("{} error: {}", category_name(ex.category()), ex.what());
    return exit_code_for(ex.category());
  } catch (const std::exception & ex) {
    spdlog::error("internal error: {}", ex.what());
    return kExitInternal;
  }
  spdlog::drop("occgrid");
  return kExitOk;
}

}  // namespace occgrid
