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

#ifndef OCCGRID__METRICS_HPP_
#define OCCGRID__METRICS_HPP_

#include <array>
#include <cstdint>
#include <span>

#include "occgrid/grid.hpp"

namespace occgrid
{

/// counts[truth][predicted] over {Free, Occupied, Unobserved}.
struct ConfusionCounts
{
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  ConfusionCounts & operator+=(const ConfusionCounts & other);
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

/// Per-class counts over the cells whose truth is not Ignore. A prediction
/// must not contain Ignore on those cells (kConfig).
ConfusionCounts confusion(const LabelGrid & pred, const LabelGrid & truth);

/// TP / (TP + FP + FN) per class; 1.0 when the class is absent from both.
std::array<double, kNumClasses> iou_per_class(const ConfusionCounts & counts);

double miou(std::span<const double> ious);
double miou(const std::array<double, kNumClasses> & ious);

struct MetricsReport
{
  double iou_free = 1.0;
  double iou_occupied = 1.0;
  double iou_unobserved = 1.0;
  double miou = 1.0;
  ConfusionCounts counts;
  std::uint64_t n_grids = 0;
};

/// Pools the counts of all pairs before taking ratios.
MetricsReport evaluate(std::span<const LabelGrid> preds, std::span<const LabelGrid> truths);
MetricsReport make_report(const ConfusionCounts & counts, std::uint64_t n_grids);

}  // namespace occgrid

#endif  // OCCGRID__METRICS_HPP_
