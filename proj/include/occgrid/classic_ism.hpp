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

#ifndef OCCGRID__CLASSIC_ISM_HPP_
#define OCCGRID__CLASSIC_ISM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "occgrid/aggregate.hpp"
#include "occgrid/grid.hpp"

namespace occgrid
{

enum class IsmKind { kDelta, kGaussian };

struct IsmConfig
{
  IsmKind kind = IsmKind::kDelta;
  double p_hit = 0.7;
  double p_miss = 0.4;
  double sigma_range = 0.6;                // m
  double sigma_azimuth = deg2rad(1.5);     // rad
  double l0 = 0.0;
  double l_max = 8.0;
  double t_occ = 0.65;
  double t_free = 0.35;

  void validate() const;
};

double logit(double p);

/// Log-odds accumulator. Values are unclamped; clamping happens on readout.
/// Cells hold 32.32 fixed-point integers so that accumulation is exact and
/// the result does not depend on the order of the updates.
struct LogOddsGrid
{
  static constexpr double kScale = 4294967296.0;  // 2^32 units per log-odds unit

  Grid<std::int64_t> fixed;
  double l0 = 0.0;

  LogOddsGrid() = default;
  LogOddsGrid(const GridSpec & spec, double prior);

  const GridSpec & spec() const { return fixed.spec(); }
  double value(std::size_t i) const { return static_cast<double>(fixed[i]) / kScale; }
  RealGrid values() const;
};

/// Nearest 32.32 fixed-point value; throws kConfig for non-finite input or
/// magnitudes of 2^30 and above.
std::int64_t to_fixed(double x);

/// Delta inverse sensor model of one frame. Each detection casts a ray from
/// the sensor; along it, cells before the first detection cell get
/// logit(p_miss), the first run of detection cells gets logit(p_hit) and the
/// rest is left at 0. Hits win over misses where rays disagree.
RealGrid delta_ism_update(
  const GridSpec & spec, Point2 sensor_origin, std::span<const Point2> detections,
  const IsmConfig & cfg);

/// Gaussian variant: each visible detection spreads logit(p_hit) over the
/// cells within 3 sigma in range and azimuth, peak-normalized so its own
/// cell gets exactly logit(p_hit). Free space runs up to 3 sigma_range
/// before the detection.
RealGrid gaussian_ism_update(
  const GridSpec & spec, Point2 sensor_origin, std::span<const Point2> detections,
  const IsmConfig & cfg);

RealGrid ism_update(
  const GridSpec & spec, Point2 sensor_origin, std::span<const Point2> detections,
  const IsmConfig & cfg);

/// values += inc - l0 wherever inc != 0, both rounded to fixed point.
void bayes_update(LogOddsGrid & acc, const RealGrid & inc);

/// Clamp to [-l_max, l_max] and map back to a probability.
double logodds_to_prob(double l, double l_max);
RealGrid to_probability(const LogOddsGrid & acc, double l_max);

/// p >= t_occ -> Occupied, p <= t_free -> Free, otherwise Unobserved.
LabelGrid classify_grid(const RealGrid & prob, double t_occ, double t_free);

struct Thresholds
{
  double t_occ = 0.65;
  double t_free = 0.35;
  friend bool operator==(const Thresholds &, const Thresholds &) = default;
};

/// Candidate sweep t_free < 0.5 < t_occ, steps of 0.05. The prior 0.5 stays
/// Unobserved for every candidate.
std::vector<Thresholds> default_threshold_candidates();

struct TuneResult
{
  Thresholds best;
  double miou = 0.0;
};

/// Exhaustive mIoU sweep over `candidates`. Ties go to the smaller t_occ,
/// then the larger t_free.
TuneResult tune_thresholds(
  std::span<const RealGrid> predicted, std::span<const LabelGrid> truth,
  std::span<const Thresholds> candidates);

/// Bayesian filtering of one radar over a window: every frame is
/// velocity-filtered, warped into the sensor frame of the window's last
/// step and fused from its own sensor origin. Returns the posterior
/// probability per cell.
RealGrid classic_window_probability(
  const WindowData & window, const SensorMount & mount, const GridSpec & spec,
  const IsmConfig & cfg, double velocity_threshold);

}  // namespace occgrid

#endif  // OCCGRID__CLASSIC_ISM_HPP_
