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


#include "occgrid/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>
#include <zlib.h>

#include <nlohmann/json.hpp>

namespace occgrid
{
namespace
{

using json = nlohmann::json;

class Writer
{
public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void u64(std::uint64_t v)
  {
    for (int i = 0; i < 8; ++i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string & s)
  {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  std::size_t size() const { return buf_.size(); }
  std::vector<std::uint8_t> & buf() { return buf_; }

private:
  std::vector<std::uint8_t> buf_;
};

class Reader
{
public:
  Reader(std::span<const std::uint8_t> b, ErrorCategory overrun) : b_(b), overrun_(overrun) {}
  std::uint8_t u8()
  {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32()
  {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    }
    return v;
  }
  std::uint64_t u64()
  {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
    }
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str()
  {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char *>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> take(std::size_t n)
  {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  /// Element count that must fit in the remaining bytes at `min_size` each.
  std::uint32_t count(std::size_t min_size)
  {
    const std::uint32_t n = u32();
    if (min_size > 0 && n > remaining() / min_size) {
      throw Error(overrun_, "record count exceeds remaining data");
    }
    return n;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

private:
  void need(std::size_t n) const
  {
    if (n > remaining()) {
      throw Error(overrun_, "unexpected end of data");
    }
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
  ErrorCategory overrun_;
};

std::vector<std::uint8_t> frame_payload(const char magic[4], std::uint32_t version, Writer & payload)
{
  Writer out;
  for (int i = 0; i < 4; ++i) {
    out.u8(static_cast<std::uint8_t>(magic[i]));
  }
  out.u32(version);
  out.u32(static_cast<std::uint32_t>(payload.size()));
  out.bytes(payload.buf());
  out.u32(crc32_of(payload.buf()));
  return std::move(out.buf());
}

// Validates the container and returns the payload.
std::span<const std::uint8_t> unframe(
  std::span<const std::uint8_t> bytes, const char magic[4], std::uint32_t version, const char * what)
{
  if (bytes.size() < 4) {
    throw Error(ErrorCategory::kLength, std::string(what) + ": file too short");
  }
  if (std::memcmp(bytes.data(), magic, 4) != 0) {
    throw Error(ErrorCategory::kMagic, std::string(what) + ": wrong magic bytes");
  }
  Reader r(bytes.subspan(4), ErrorCategory::kLength);
  const std::uint32_t v = r.u32();
  if (v != version) {
    throw Error(ErrorCategory::kVersion,
      std::string(what) + ": unsupported format version " + std::to_string(v));
  }
  const std::uint32_t len = r.u32();
  const auto payload = r.take(len);
  const std::uint32_t crc = r.u32();
  if (r.remaining() != 0) {
    throw Error(ErrorCategory::kFormat, std::string(what) + ": trailing bytes after checksum");
  }
  if (crc != crc32_of(payload)) {
    throw Error(ErrorCategory::kChecksum, std::string(what) + ": checksum mismatch");
  }
  return payload;
}

constexpr char kSceneMagic[4] = {'O', 'G', 'S', 'B'};
constexpr char kModelMagic[4] = {'O', 'G', 'N', 'M'};

void put_spec(Writer & w, const GridSpec & s)
{
  w.i32(s.height);
  w.i32(s.width);
  w.f64(s.cell_x);
  w.f64(s.cell_y);
  w.f64(s.origin.x);
  w.f64(s.origin.y);
}

GridSpec get_spec(Reader & r)
{
  GridSpec s;
  s.height = r.i32();
  s.width = r.i32();
  s.cell_x = r.f64();
  s.cell_y = r.f64();
  s.origin.x = r.f64();
  s.origin.y = r.f64();
  return s;
}

void put_pose(Writer & w, const Pose2 & p)
{
  w.f64(p.x);
  w.f64(p.y);
  w.f64(p.yaw);
}

Pose2 get_pose(Reader & r)
{
  Pose2 p;
  p.x = r.f64();
  p.y = r.f64();
  p.yaw = r.f64();
  return p;
}

json spec_json(const GridSpec & s)
{
  return json{{"height", s.height}, {"width", s.width}, {"cell_x", s.cell_x},
    {"cell_y", s.cell_y}, {"origin_x", s.origin.x}, {"origin_y", s.origin.y}};
}

json parse_json(const std::string & text, const char * what)
{
  try {
    return json::parse(text);
  } catch (const json::exception & e) {
    throw Error(ErrorCategory::kFormat, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json & j, const char * key, const char * what)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorCategory::kFormat, std::string(what) + ": missing or invalid field '" + key + "'");
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path & path)
{
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes)
{
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1U << 30));
    crc = crc32(crc, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_file_atomic(const std::filesystem::path & path, std::span<const std::uint8_t> bytes)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw Error(ErrorCategory::kIo, "cannot open " + tmp.string() + " for writing");
    }
    f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
      throw Error(ErrorCategory::kIo, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCategory::kIo, "cannot move output into place: " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path & path, const std::string & text)
{
  write_file_atomic(path, std::span<const std::uint8_t>(
    reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path & path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error(ErrorCategory::kIo, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> encode_scene(const SceneBundle & scene)
{
  Writer w;
  w.u64(scene.seed);
  put_spec(w, scene.grid);
  w.u32(static_cast<std::uint32_t>(scene.mounts.size()));
  for (const SensorMount & m : scene.mounts) {
    w.str(m.sensor_id);
    put_pose(w, m.mount_pose);
    w.u8(static_cast<std::uint8_t>(m.kind));
  }
  w.u32(static_cast<std::uint32_t>(scene.steps.size()));
  for (const SceneStep & step : scene.steps) {
    Writer rec;
    rec.f64(step.timestamp);
    put_pose(rec, step.ego_pose);
    rec.u32(static_cast<std::uint32_t>(step.radar.size()));
    for (const RadarFrame & f : step.radar) {
      rec.str(f.sensor_id);
      rec.f64(f.timestamp);
      rec.u32(static_cast<std::uint32_t>(f.points.size()));
      for (const RadarPoint & p : f.points) {
        rec.f64(p.x);
        rec.f64(p.y);
        rec.f64(p.vx);
        rec.f64(p.vy);
      }
    }
    rec.u32(static_cast<std::uint32_t>(step.lidar.size()));
    for (const LidarSweep & s : step.lidar) {
      rec.str(s.sensor_id);
      rec.f64(s.timestamp);
      rec.u32(static_cast<std::uint32_t>(s.points.size()));
      for (const Point3 & p : s.points) {
        rec.f64(p.x);
        rec.f64(p.y);
        rec.f64(p.z);
      }
    }
    w.u32(static_cast<std::uint32_t>(rec.size()));
    w.bytes(rec.buf());
  }
  return frame_payload(kSceneMagic, kSceneFormatVersion, w);
}

SceneBundle decode_scene(std::span<const std::uint8_t> bytes)
{
  const auto payload = unframe(bytes, kSceneMagic, kSceneFormatVersion, "scene");
  Reader r(payload, ErrorCategory::kFormat);
  SceneBundle scene;
  scene.seed = r.u64();
  scene.grid = get_spec(r);
  const std::uint32_t n_mounts = r.count(29);
  for (std::uint32_t i = 0; i < n_mounts; ++i) {
    SensorMount m;
    m.sensor_id = r.str();
    m.mount_pose = get_pose(r);
    const std::uint8_t kind = r.u8();
    if (kind > 1) {
      throw Error(ErrorCategory::kFormat, "scene: unknown sensor kind");
    }
    m.kind = static_cast<SensorKind>(kind);
    scene.mounts.push_back(std::move(m));
  }
  const std::uint32_t n_steps = r.count(4);
  scene.steps.reserve(n_steps);
  for (std::uint32_t t = 0; t < n_steps; ++t) {
    const std::uint32_t len = r.u32();
    Reader rec(r.take(len), ErrorCategory::kFormat);
    SceneStep step;
    step.timestamp = rec.f64();
    step.ego_pose = get_pose(rec);
    const std::uint32_t n_radar = rec.count(16);
    for (std::uint32_t i = 0; i < n_radar; ++i) {
      RadarFrame f;
      f.sensor_id = rec.str();
      f.timestamp = rec.f64();
      const std::uint32_t n = rec.count(32);
      f.points.resize(n);
      for (RadarPoint & p : f.points) {
        p.x = rec.f64();
        p.y = rec.f64();
        p.vx = rec.f64();
        p.vy = rec.f64();
      }
      step.radar.push_back(std::move(f));
    }
    const std::uint32_t n_lidar = rec.count(16);
    for (std::uint32_t i = 0; i < n_lidar; ++i) {
      LidarSweep s;
      s.sensor_id = rec.str();
      s.timestamp = rec.f64();
      const std::uint32_t n = rec.count(24);
      s.points.resize(n);
      for (Point3 & p : s.points) {
        p.x = rec.f64();
        p.y = rec.f64();
        p.z = rec.f64();
      }
      step.lidar.push_back(std::move(s));
    }
    if (rec.remaining() != 0) {
      throw Error(ErrorCategory::kFormat, "scene: timestep record has trailing bytes");
    }
    scene.steps.push_back(std::move(step));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCategory::kFormat, "scene: trailing bytes in payload");
  }
  return scene;
}

void write_scene(const std::filesystem::path & path, const SceneBundle & scene)
{
  write_file_atomic(path, encode_scene(scene));
}

SceneBundle read_scene(const std::filesystem::path & path) { return decode_scene(read_file(path)); }

std::string scene_to_text(const SceneBundle & scene)
{
  json j;
  j["seed"] = scene.seed;
  j["grid"] = spec_json(scene.grid);
  j["mounts"] = json::array();
  for (const SensorMount & m : scene.mounts) {
    j["mounts"].push_back({{"sensor_id", m.sensor_id},
      {"pose", {m.mount_pose.x, m.mount_pose.y, m.mount_pose.yaw}},
      {"kind", m.kind == SensorKind::kRadar ? "radar" : "lidar"}});
  }
  j["steps"] = json::array();
  for (const SceneStep & s : scene.steps) {
    json js{{"timestamp", s.timestamp}, {"ego_pose", {s.ego_pose.x, s.ego_pose.y, s.ego_pose.yaw}}};
    js["radar"] = json::array();
    for (const RadarFrame & f : s.radar) {
      json pts = json::array();
      for (const RadarPoint & p : f.points) {
        pts.push_back({p.x, p.y, p.vx, p.vy});
      }
      js["radar"].push_back({{"sensor_id", f.sensor_id}, {"timestamp", f.timestamp}, {"points", pts}});
    }
    js["lidar"] = json::array();
    for (const LidarSweep & l : s.lidar) {
      js["lidar"].push_back(
        {{"sensor_id", l.sensor_id}, {"timestamp", l.timestamp}, {"n_points", l.points.size()}});
    }
    j["steps"].push_back(std::move(js));
  }
  return j.dump(1) + "\n";
}

std::uint8_t label_to_byte(Label l)
{
  switch (l) {
    case Label::kFree:
      return 0;
    case Label::kOccupied:
      return 255;
    case Label::kUnobserved:
      return 192;
    case Label::kIgnore:
      return 96;
  }
  throw Error(ErrorCategory::kFormat, "label_to_byte: invalid label");
}

Label byte_to_label(std::uint8_t b)
{
  switch (b) {
    case 0:
      return Label::kFree;
    case 255:
      return Label::kOccupied;
    case 192:
      return Label::kUnobserved;
    case 96:
      return Label::kIgnore;
    default:
      throw Error(ErrorCategory::kFormat, "grid: byte " + std::to_string(b) + " is not a label value");
  }
}

std::vector<std::uint8_t> encode_pgm(const LabelGrid & grid)
{
  const std::string header =
    "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + grid.size());
  for (Label l : grid.data()) {
    out.push_back(label_to_byte(l));
  }
  return out;
}

LabelGrid decode_pgm(std::span<const std::uint8_t> bytes, const GridSpec & spec)
{
  // P5 header: magic, width, height, maxval separated by whitespace, then
  // exactly one whitespace byte before the raster.
  std::size_t pos = 0;
  auto skip_ws = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') {
          ++pos;
        }
      } else if (std::isspace(bytes[pos]) != 0) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto token = [&]() {
    skip_ws();
    std::string t;
    while (pos < bytes.size() && std::isspace(bytes[pos]) == 0) {
      t.push_back(static_cast<char>(bytes[pos++]));
    }
    return t;
  };
  if (token() != "P5") {
    throw Error(ErrorCategory::kMagic, "grid: not a binary PGM");
  }
  int w = 0;
  int h = 0;
  int maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception &) {
    throw Error(ErrorCategory::kFormat, "grid: malformed PGM header");
  }
  if (maxval != 255) {
    throw Error(ErrorCategory::kFormat, "grid: PGM maxval must be 255");
  }
  if (w != spec.width || h != spec.height) {
    throw Error(ErrorCategory::kShape, "grid: image size does not match the sidecar spec");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (pos > bytes.size() || bytes.size() - pos < n) {
    throw Error(ErrorCategory::kLength, "grid: raster truncated");
  }
  if (bytes.size() - pos > n) {
    throw Error(ErrorCategory::kFormat, "grid: trailing bytes after raster");
  }
  LabelGrid g(spec);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = byte_to_label(bytes[pos + i]);
  }
  return g;
}

std::string grid_spec_to_json(const GridSpec & spec) { return spec_json(spec).dump(1) + "\n"; }

GridSpec grid_spec_from_json(const std::string & text)
{
  const json j = parse_json(text, "grid spec");
  GridSpec s;
  s.height = field<int>(j, "height", "grid spec");
  s.width = field<int>(j, "width", "grid spec");
  s.cell_x = field<double>(j, "cell_x", "grid spec");
  s.cell_y = field<double>(j, "cell_y", "grid spec");
  s.origin.x = field<double>(j, "origin_x", "grid spec");
  s.origin.y = field<double>(j, "origin_y", "grid spec");
  try {
    s.validate();
  } catch (const Error & e) {
    throw Error(ErrorCategory::kFormat, e.what());
  }
  return s;
}

void write_grid(const std::filesystem::path & path, const LabelGrid & grid)
{
  write_file_atomic(sidecar_path(path), grid_spec_to_json(grid.spec()));
  write_file_atomic(path, encode_pgm(grid));
}

LabelGrid read_grid(const std::filesystem::path & path)
{
  const auto side = read_file(sidecar_path(path));
  const GridSpec spec = grid_spec_from_json(std::string(side.begin(), side.end()));
  return decode_pgm(read_file(path), spec);
}

std::vector<std::uint8_t> encode_model(const OccNetModel & model)
{
  Writer w;
  w.u64(model.seed);
  w.u32(static_cast<std::uint32_t>(model.widths.size()));
  for (int width : model.widths) {
    w.i32(width);
  }
  const auto table = layer_table(model.widths);
  w.u32(static_cast<std::uint32_t>(table.size()));
  for (const LayerDesc & d : table) {
    w.u8(static_cast<std::uint8_t>(d.kind));
    w.i32(d.a);
    w.i32(d.b);
  }
  w.u64(model.params.size());
  for (double p : model.params) {
    w.f32(static_cast<float>(p));
  }
  return frame_payload(kModelMagic, kModelFormatVersion, w);
}

OccNetModel decode_model(std::span<const std::uint8_t> bytes)
{
  const auto payload = unframe(bytes, kModelMagic, kModelFormatVersion, "model");
  Reader r(payload, ErrorCategory::kFormat);
  const std::uint64_t seed = r.u64();
  const std::uint32_t n_widths = r.count(4);
  std::vector<int> widths(n_widths);
  for (int & x : widths) {
    x = r.i32();
  }
  OccNetModel m;
  try {
    m = make_architecture(widths);
  } catch (const Error & e) {
    throw Error(ErrorCategory::kFormat, std::string("model: ") + e.what());
  }
  m.seed = seed;
  const std::uint32_t n_layers = r.count(9);
  std::vector<LayerDesc> table(n_layers);
  for (LayerDesc & d : table) {
    const std::uint8_t kind = r.u8();
    if (kind > 3) {
      throw Error(ErrorCategory::kFormat, "model: unknown layer kind");
    }
    d.kind = static_cast<LayerKind>(kind);
    d.a = r.i32();
    d.b = r.i32();
  }
  if (table != layer_table(widths)) {
    throw Error(ErrorCategory::kFormat, "model: layer table does not match the declared widths");
  }
  const std::uint64_t n_params = r.u64();
  if (n_params != m.params.size() || r.remaining() != n_params * 4) {
    throw Error(ErrorCategory::kFormat, "model: parameter count does not match the layer table");
  }
  for (double & p : m.params) {
    p = static_cast<double>(r.f32());
  }
  return m;
}

void write_model(const std::filesystem::path & path, const OccNetModel & model)
{
  write_file_atomic(path, encode_model(model));
}

OccNetModel read_model(const std::filesystem::path & path) { return decode_model(read_file(path)); }

std::string report_to_json(const MetricsReport & report, const std::map<std::string, std::string> & meta)
{
  json j;
  j["iou_free"] = report.iou_free;
  j["iou_occupied"] = report.iou_occupied;
  j["iou_unobserved"] = report.iou_unobserved;
  j["miou"] = report.miou;
  j["n_grids"] = report.n_grids;
  json conf = json::array();
  for (const auto & row : report.counts.counts) {
    conf.push_back(json(row));
  }
  j["confusion"] = conf;
  j["meta"] = json(meta);
  return j.dump(1) + "\n";
}

MetricsReport report_from_json(const std::string & text)
{
  const json j = parse_json(text, "report");
  MetricsReport r;
  r.iou_free = field<double>(j, "iou_free", "report");
  r.iou_occupied = field<double>(j, "iou_occupied", "report");
  r.iou_unobserved = field<double>(j, "iou_unobserved", "report");
  r.miou = field<double>(j, "miou", "report");
  r.n_grids = field<std::uint64_t>(j, "n_grids", "report");
  const auto conf = field<std::vector<std::vector<std::uint64_t>>>(j, "confusion", "report");
  if (conf.size() != kNumClasses) {
    throw Error(ErrorCategory::kFormat, "report: confusion matrix must be 3x3");
  }
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    if (conf[t].size() != kNumClasses) {
      throw Error(ErrorCategory::kFormat, "report: confusion matrix must be 3x3");
    }
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      r.counts.counts[t][p] = conf[t][p];
    }
  }
  return r;
}

void write_report(
  const std::filesystem::path & path, const MetricsReport & report,
  const std::map<std::string, std::string> & meta)
{
  write_file_atomic(path, report_to_json(report, meta));
}

MetricsReport read_report(const std::filesystem::path & path)
{
  const auto bytes = read_file(path);
  return report_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace occgrid
