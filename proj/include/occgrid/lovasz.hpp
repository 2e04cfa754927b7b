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


#ifndef OCCGRID__LOVASZ_HPP_
#define OCCGRID__LOVASZ_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "occgrid/grid.hpp"

namespace occgrid
{

/// Per-cell class probabilities over (Free, Occupied, Unobserved), stored
/// cell-major: value(cell, c) = data[cell * 3 + c].
struct ProbMap
{
  GridSpec spec;
  std::vector<double> data;

  ProbMap() = default;
  explicit ProbMap(const GridSpec & s) : spec(s), data(s.cell_count() * kNumClasses, 0.0) {}

  double & at(std::size_t cell, int c) { return data[cell * kNumClasses + static_cast<std::size_t>(c)]; }
  double at(std::size_t cell, int c) const { return data[cell * kNumClasses + static_cast<std::size_t>(c)]; }
  std::size_t cells() const { return spec.cell_count(); }
};

/// One-hot probabilities of a label grid (Ignore cells become uniform).
ProbMap one_hot(const LabelGrid & labels);

/// Per-element gradient of the Jaccard loss extension for a binary vector
/// already sorted by descending error. All-zero input gives all zeros.
std::vector<double> jaccard_grad(std::span<const std::uint8_t> gt_sorted);

struct LossResult
{
  double loss = 0.0;
  std::vector<double> grad;                     // same layout as ProbMap::data
  std::array<double, kNumClasses> per_class{};  // Lovasz only; 0 when absent
  std::array<bool, kNumClasses> present{};
  std::uint64_t order_hash = 0;                 // Lovasz sort permutations
};

/// Multi-class Lovasz-softmax over the non-Ignore cells, averaged over the
/// classes present in `gt`. The gradient holds the sort order fixed.
/// Throws kUndefined when every cell is Ignore.
LossResult lovasz_softmax(const ProbMap & probs, const LabelGrid & gt);

/// Same over several samples pooled into one flattened pixel list.
LossResult lovasz_softmax(std::span<const ProbMap> probs, std::span<const LabelGrid> gt);

/// Mean of -w[gt] ln max(p[gt], 1e-12) over non-Ignore cells.
LossResult weighted_cross_entropy(
  const ProbMap & probs, const LabelGrid & gt, const std::array<double, kNumClasses> & weights);

LossResult weighted_cross_entropy(
  std::span<const ProbMap> probs, std::span<const LabelGrid> gt,
  const std::array<double, kNumClasses> & weights);

}  // namespace occgrid

#endif  // OCCGRID__LOVASZ_HPP_
