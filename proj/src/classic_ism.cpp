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

#include "occgrid/classic_ism.hpp"

#include <algorithm>
#include <cmath>

#include "occgrid/metrics.hpp"
#include "occgrid/raytrace.hpp"

namespace occgrid
{

void IsmConfig::validate() const
{
  if (!(p_hit > 0.5 && p_hit < 1.0)) {
    throw Error(ErrorCategory::kConfig, "IsmConfig: p_hit must lie in (0.5, 1)");
  }
  if (!(p_miss > 0.0 && p_miss < 0.5)) {
    throw Error(ErrorCategory::kConfig, "IsmConfig: p_miss must lie in (0, 0.5)");
  }
  if (!(l_max > 0.0)) {
    throw Error(ErrorCategory::kConfig, "IsmConfig: l_max must be positive");
  }
  if (!(0.0 <= t_free && t_free <= t_occ && t_occ <= 1.0)) {
    throw Error(ErrorCategory::kConfig, "IsmConfig: need 0 <= t_free <= t_occ <= 1");
  }
  if (kind == IsmKind::kGaussian && !(sigma_range > 0.0 && sigma_azimuth > 0.0)) {
    throw Error(ErrorCategory::kConfig, "IsmConfig: Gaussian sigmas must be positive");
  }
}

double logit(double p) { return std::log(p / (1.0 - p)); }

namespace
{

// Per-ray walk shared by both models: which cells the first run of detection
// cells covers and which cells lie in front of it.
struct RayMarks
{
  std::vector<std::uint8_t> hit;
  std::vector<std::uint8_t> miss;
  // index of detections whose ray's first run contains their own cell
  std::vector<std::size_t> visible;
};

std::vector<Cell> clipped_traverse(const GridSpec & spec, Point2 origin, Point2 target)
{
  const auto seg = clip_segment(spec, origin, target);
  if (!seg) {
    return {};
  }
  return traverse_ray(spec, seg->first, target);
}

RayMarks walk_detection_rays(
  const GridSpec & spec, Point2 origin, std::span<const Point2> detections,
  const MaskGrid & det_mask, const std::vector<Point2> * free_targets)
{
  RayMarks m;
  m.hit.assign(spec.cell_count(), 0);
  m.miss.assign(spec.cell_count(), 0);
  std::vector<std::uint8_t> run_cell(spec.cell_count(), 0);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const std::vector<Cell> cells = clipped_traverse(spec, origin, detections[d]);
    const std::vector<Label> labels =
      label_along_ray(cells, [&](Cell c) { return det_mask.at(c) != 0; });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t idx = det_mask.index(cells[i].u, cells[i].v);
      if (labels[i] == Label::kOccupied) {
        m.hit[idx] = 1;
        run_cell[idx] = 1;
      } else if (labels[i] == Label::kFree && free_targets == nullptr) {
        m.miss[idx] = 1;
      }
    }
    if (free_targets != nullptr) {
      const std::vector<Cell> fcells = clipped_traverse(spec, origin, (*free_targets)[d]);
      for (const Cell & c : fcells) {
        if (det_mask.at(c) != 0) {
          break;
        }
        m.miss[det_mask.index(c.u, c.v)] = 1;
      }
    }
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (auto c = world_to_cell(detections[d], spec); c && run_cell[det_mask.index(c->u, c->v)]) {
      m.visible.push_back(d);
    }
  }
  return m;
}

MaskGrid detection_mask(const GridSpec & spec, std::span<const Point2> detections)
{
  return rasterize_bev(detections, spec);
}

}  // namespace

RealGrid delta_ism_update(
  const GridSpec & spec, Point2 sensor_origin, std::span<const Point2> detections,
  const IsmConfig & cfg)
{
  spec.validate();
  const MaskGrid det = detection_mask(spec, detections);
  const RayMarks m = walk_detection_rays(spec, sensor_origin, detections, det, nullptr);
  const double l_hit = logit(cfg.p_hit);
  const double l_miss = logit(cfg.p_miss);
  RealGrid inc(spec, 0.0);
  for (std::size_t i = 0; i < inc.size(); ++i) {
    inc[i] = m.hit[i] ? l_hit : (m.miss[i] ? l_miss : 0.0);
  }
  return inc;
}

RealGrid gaussian_ism_update(
  const GridSpec & spec, Point2 sensor_origin, std::span<const Point2> detections,
  const IsmConfig & cfg)
{
  spec.validate();
  const double sr = cfg.sigma_range;
  const double sa = cfg.sigma_azimuth;
  const MaskGrid det = detection_mask(spec, detections);

  // Free space stops 3 sigma_range short of each detection.
  std::vector<Point2> free_targets;
  free_targets.reserve(detections.size());
  for (const Point2 & d : detections) {
    const double dx = d.x - sensor_origin.x;
    const double dy = d.y - sensor_origin.y;
    const double r = std::hypot(dx, dy);
    const double keep = r > 0.0 ? std::max(0.0, r - 3.0 * sr) / r : 0.0;
    free_targets.push_back({sensor_origin.x + keep * dx, sensor_origin.y + keep * dy});
  }
  const RayMarks m = walk_detection_rays(spec, sensor_origin, detections, det, &free_targets);

  RealGrid weight(spec, 0.0);
  auto polar = [&](Point2 p) {
    const double dx = p.x - sensor_origin.x;
    const double dy = p.y - sensor_origin.y;
    return std::pair<double, double>{std::hypot(dx, dy), std::atan2(dy, dx)};
  };
  auto log_kernel = [&](double dr, double da) {
    return -0.5 * (dr / sr) * (dr / sr) - 0.5 * (da / sa) * (da / sa);
  };
  for (std::size_t d : m.visible) {
    const Point2 p = detections[d];
    const auto own = *world_to_cell(p, spec);
    const auto [rd, ad] = polar(p);
    const auto [ro, ao] = polar(cell_center(own, spec));
    const double log_own = log_kernel(ro - rd, normalize_angle(ao - ad));
    const double reach = 3.0 * sr + (rd + 3.0 * sr) * 3.0 * sa;
    const auto lo = to_grid_units({p.x - reach, p.y - reach}, spec);
    const auto hi = to_grid_units({p.x + reach, p.y + reach}, spec);
    const int u0 = std::max(0, static_cast<int>(std::floor(lo.x)));
    const int v0 = std::max(0, static_cast<int>(std::floor(lo.y)));
    const int u1 = std::min(spec.height - 1, static_cast<int>(std::floor(hi.x)));
    const int v1 = std::min(spec.width - 1, static_cast<int>(std::floor(hi.y)));
    for (int u = u0; u <= u1; ++u) {
      for (int v = v0; v <= v1; ++v) {
        double w;
        if (Cell{u, v} == own) {
          w = 1.0;
        } else {
          const auto [rc, ac] = polar(cell_center({u, v}, spec));
          const double dr = rc - rd;
          const double da = normalize_angle(ac - ad);
          if (std::abs(dr) > 3.0 * sr || std::abs(da) > 3.0 * sa) {
            continue;
          }
          w = std::exp(std::min(0.0, log_kernel(dr, da) - log_own));
        }
        double & cell = weight.at(u, v);
        cell = std::max(cell, w);
      }
    }
  }

  const double l_hit = logit(cfg.p_hit);
  const double l_miss = logit(cfg.p_miss);
  RealGrid inc(spec, 0.0);
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (weight[i] > 0.0) {
      inc[i] = l_hit * weight[i];
    } else if (m.miss[i]) {
      inc[i] = l_miss;
    }
  }
  return inc;
}

RealGrid ism_update(
  const GridSpec & spec, Point2 sensor_origin, std::span<const Point2> detections,
  const IsmConfig & cfg)
{
  return cfg.kind == IsmKind::kDelta ? delta_ism_update(spec, sensor_origin, detections, cfg)
                                     : gaussian_ism_update(spec, sensor_origin, detections, cfg);
}

std::int64_t to_fixed(double x)
{
  if (!std::isfinite(x) || std::abs(x) >= 1073741824.0) {
    throw Error(ErrorCategory::kConfig, "log-odds value outside the fixed-point range");
  }
  return std::llround(x * LogOddsGrid::kScale);
}

LogOddsGrid::LogOddsGrid(const GridSpec & spec, double prior)
: fixed(spec, to_fixed(prior)), l0(prior)
{
}

RealGrid LogOddsGrid::values() const
{
  RealGrid out(spec(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = value(i);
  }
  return out;
}

void bayes_update(LogOddsGrid & acc, const RealGrid & inc)
{
  if (!(acc.spec() == inc.spec())) {
    throw Error(ErrorCategory::kShape, "bayes_update: grid specs differ");
  }
  const std::int64_t prior = to_fixed(acc.l0);
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (inc[i] != 0.0) {
      acc.fixed[i] += to_fixed(inc[i]) - prior;
    }
  }
}

double logodds_to_prob(double l, double l_max)
{
  const double c = std::clamp(l, -l_max, l_max);
  return 1.0 / (1.0 + std::exp(-c));
}

RealGrid to_probability(const LogOddsGrid & acc, double l_max)
{
  RealGrid out(acc.spec(), 0.5);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = logodds_to_prob(acc.value(i), l_max);
  }
  return out;
}

LabelGrid classify_grid(const RealGrid & prob, double t_occ, double t_free)
{
  if (t_free > t_occ) {
    throw Error(ErrorCategory::kConfig, "classify_grid: t_free exceeds t_occ");
  }
  LabelGrid out(prob.spec(), Label::kUnobserved);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double p = prob[i];
    if (p >= t_occ) {
      out[i] = Label::kOccupied;
    } else if (p <= t_free) {
      out[i] = Label::kFree;
    }
  }
  return out;
}

std::vector<Thresholds> default_threshold_candidates()
{
  std::vector<Thresholds> out;
  for (int o = 11; o <= 19; ++o) {
    for (int f = 1; f <= 9; ++f) {
      out.push_back({o / 20.0, f / 20.0});
    }
  }
  return out;
}

TuneResult tune_thresholds(
  std::span<const RealGrid> predicted, std::span<const LabelGrid> truth,
  std::span<const Thresholds> candidates)
{
  if (predicted.empty() || predicted.size() != truth.size()) {
    throw Error(ErrorCategory::kConfig, "tune_thresholds: need matching, non-empty validation pairs");
  }
  if (candidates.empty()) {
    throw Error(ErrorCategory::kConfig, "tune_thresholds: no candidates");
  }
  TuneResult best;
  bool have = false;
  for (const Thresholds & t : candidates) {
    if (t.t_free > t.t_occ) {
      throw Error(ErrorCategory::kConfig, "tune_thresholds: candidate with t_free > t_occ");
    }
    ConfusionCounts counts;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      counts += confusion(classify_grid(predicted[i], t.t_occ, t.t_free), truth[i]);
    }
    const double m = miou(iou_per_class(counts));
    const bool better = !have || m > best.miou ||
                        (m == best.miou && (t.t_occ < best.best.t_occ ||
                                            (t.t_occ == best.best.t_occ && t.t_free > best.best.t_free)));
    if (better) {
      best.best = t;
      best.miou = m;
      have = true;
    }
  }
  return best;
}

RealGrid classic_window_probability(
  const WindowData & window, const SensorMount & mount, const GridSpec & spec,
  const IsmConfig & cfg, double velocity_threshold)
{
  cfg.validate();
  if (window.frames.empty() || window.frames.size() != window.ego_poses.size()) {
    throw Error(ErrorCategory::kConfig, "classic_window_probability: malformed window");
  }
  LogOddsGrid acc(spec, cfg.l0);
  const Pose2 & last = window.ego_poses.back();
  for (std::size_t j = 0; j < window.frames.size(); ++j) {
    const RadarFrame kept = filter_dynamic(window.frames[j], velocity_threshold);
    const Pose2 rel = j + 1 == window.frames.size()
                        ? Pose2::identity()
                        : relative_sensor_pose(window.ego_poses[j], last, mount.mount_pose);
    std::vector<Point2> dets;
    dets.reserve(kept.points.size());
    for (const RadarPoint & p : kept.points) {
      dets.push_back(apply(rel, Point2{p.x, p.y}));
    }
    bayes_update(acc, ism_update(spec, apply(rel, Point2{0.0, 0.0}), dets, cfg));
  }
  return to_probability(acc, cfg.l_max);
}

}  // namespace occgrid
