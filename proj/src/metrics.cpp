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

#include "occgrid/metrics.hpp"

#include <numeric>

namespace occgrid
{

std::uint64_t ConfusionCounts::total() const
{
  std::uint64_t n = 0;
  for (const auto & row : counts) {
    for (auto c : row) {
      n += c;
    }
  }
  return n;
}

ConfusionCounts & ConfusionCounts::operator+=(const ConfusionCounts & other)
{
  for (int i = 0; i < kNumClasses; ++i) {
    for (int j = 0; j < kNumClasses; ++j) {
      counts[i][j] += other.counts[i][j];
    }
  }
  return *this;
}

ConfusionCounts confusion(const LabelGrid & pred, const LabelGrid & truth)
{
  if (!(pred.spec() == truth.spec())) {
    throw Error(ErrorCategory::kShape, "confusion: grid specs differ");
  }
  ConfusionCounts out;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const Label t = truth[i];
    if (t == Label::kIgnore) {
      continue;
    }
    const Label p = pred[i];
    if (p == Label::kIgnore) {
      throw Error(ErrorCategory::kConfig, "confusion: prediction contains Ignore on a live cell");
    }
    ++out.counts[static_cast<int>(t)][static_cast<int>(p)];
  }
  return out;
}

std::array<double, kNumClasses> iou_per_class(const ConfusionCounts & c)
{
  std::array<double, kNumClasses> out{};
  for (int k = 0; k < kNumClasses; ++k) {
    const std::uint64_t tp = c.counts[k][k];
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    for (int j = 0; j < kNumClasses; ++j) {
      if (j != k) {
        fp += c.counts[j][k];
        fn += c.counts[k][j];
      }
    }
    const std::uint64_t denom = tp + fp + fn;
    out[k] = denom == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(denom);
  }
  return out;
}

double miou(std::span<const double> ious)
{
  if (ious.empty()) {
    throw Error(ErrorCategory::kUndefined, "miou: no classes");
  }
  return std::accumulate(ious.begin(), ious.end(), 0.0) / static_cast<double>(ious.size());
}

double miou(const std::array<double, kNumClasses> & ious)
{
  return miou(std::span<const double>(ious.data(), ious.size()));
}

MetricsReport make_report(const ConfusionCounts & counts, std::uint64_t n_grids)
{
  MetricsReport r;
  const auto iou = iou_per_class(counts);
  r.iou_free = iou[static_cast<int>(Label::kFree)];
  r.iou_occupied = iou[static_cast<int>(Label::kOccupied)];
  r.iou_unobserved = iou[static_cast<int>(Label::kUnobserved)];
  r.miou = miou(iou);
  r.counts = counts;
  r.n_grids = n_grids;
  return r;
}

MetricsReport evaluate(std::span<const LabelGrid> preds, std::span<const LabelGrid> truths)
{
  if (preds.size() != truths.size()) {
    throw Error(ErrorCategory::kConfig, "evaluate: prediction and truth counts differ");
  }
  ConfusionCounts total;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    total += confusion(preds[i], truths[i]);
  }
  return make_report(total, preds.size());
}

}  // namespace occgrid
