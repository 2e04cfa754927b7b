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


#ifndef OCCGRID__IO_HPP_
#define OCCGRID__IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "occgrid/grid.hpp"
#include "occgrid/metrics.hpp"
#include "occgrid/occnet.hpp"
#include "occgrid/scene.hpp"

namespace occgrid
{

inline constexpr std::uint32_t kSceneFormatVersion = 1;
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path & path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path & path, const std::string & text);
/// Whole file; throws kIo when it cannot be opened.
std::vector<std::uint8_t> read_file(const std::filesystem::path & path);

// Scene bundles: "OGSB", u32 version, u32 payload length, payload, u32 CRC-32
// of the payload. All integers and IEEE doubles little-endian; every
// timestep is a length-prefixed record.
std::vector<std::uint8_t> encode_scene(const SceneBundle & scene);
SceneBundle decode_scene(std::span<const std::uint8_t> bytes);
void write_scene(const std::filesystem::path & path, const SceneBundle & scene);
SceneBundle read_scene(const std::filesystem::path & path);
/// Human-readable JSON dump for debugging.
std::string scene_to_text(const SceneBundle & scene);

// Label grids: binary PGM (P5), row u of the grid is image row u, plus a
// JSON sidecar `<path>.json` carrying the GridSpec.
std::uint8_t label_to_byte(Label l);
/// Throws kFormat for bytes outside {0, 255, 192, 96}.
Label byte_to_label(std::uint8_t b);
std::vector<std::uint8_t> encode_pgm(const LabelGrid & grid);
LabelGrid decode_pgm(std::span<const std::uint8_t> bytes, const GridSpec & spec);
std::string grid_spec_to_json(const GridSpec & spec);
GridSpec grid_spec_from_json(const std::string & text);
void write_grid(const std::filesystem::path & path, const LabelGrid & grid);
LabelGrid read_grid(const std::filesystem::path & path);

// Model weights: "OGNM", u32 version, u32 payload length, payload (seed,
// widths, layer table, float32 parameters), u32 CRC-32 of the payload.
// Parameters are stored as float32, so a round trip is exact for models
// whose parameters are float32 values (train() returns such models).
std::vector<std::uint8_t> encode_model(const OccNetModel & model);
OccNetModel decode_model(std::span<const std::uint8_t> bytes);
void write_model(const std::filesystem::path & path, const OccNetModel & model);
OccNetModel read_model(const std::filesystem::path & path);

// Metrics reports: JSON with the per-class IoUs, mIoU, grid count, the
// confusion counts and free-form string metadata.
std::string report_to_json(
  const MetricsReport & report, const std::map<std::string, std::string> & meta = {});
MetricsReport report_from_json(const std::string & text);
void write_report(
  const std::filesystem::path & path, const MetricsReport & report,
  const std::map<std::string, std::string> & meta = {});
MetricsReport read_report(const std::filesystem::path & path);

}  // namespace occgrid

#endif  // OCCGRID__IO_HPP_
