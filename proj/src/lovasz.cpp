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


#include "occgrid/lovasz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace occgrid
{
namespace
{

constexpr double kProbFloor = 1e-12;

void check_pairs(std::span<const ProbMap> probs, std::span<const LabelGrid> gt)
{
  if (probs.size() != gt.size()) {
    throw Error(ErrorCategory::kShape, "loss: sample count mismatch");
  }
  for (std::size_t s = 0; s < probs.size(); ++s) {
    if (!(probs[s].spec == gt[s].spec()) || probs[s].data.size() != gt[s].size() * kNumClasses) {
      throw Error(ErrorCategory::kShape, "loss: probability map and labels differ in shape");
    }
  }
}

}  // namespace

ProbMap one_hot(const LabelGrid & labels)
{
  ProbMap p(labels.spec());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label l = labels[i];
    if (l == Label::kIgnore) {
      for (int c = 0; c < kNumClasses; ++c) {
        p.at(i, c) = 1.0 / kNumClasses;
      }
    } else {
      p.at(i, static_cast<int>(l)) = 1.0;
    }
  }
  return p;
}

std::vector<double> jaccard_grad(std::span<const std::uint8_t> gt_sorted)
{
  const std::size_t n = gt_sorted.size();
  if (n == 0) {
    throw Error(ErrorCategory::kConfig, "jaccard_grad: empty input");
  }
  std::vector<double> g(n, 0.0);
  double positives = 0.0;
  for (std::uint8_t x : gt_sorted) {
    positives += x != 0 ? 1.0 : 0.0;
  }
  if (positives == 0.0) {
    return g;
  }
  double cum_pos = 0.0;
  double cum_neg = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (gt_sorted[i] != 0) {
      cum_pos += 1.0;
    } else {
      cum_neg += 1.0;
    }
    const double jac = 1.0 - (positives - cum_pos) / (positives + cum_neg);
    g[i] = i == 0 ? jac : jac - prev;
    prev = jac;
  }
  return g;
}

LossResult lovasz_softmax(std::span<const ProbMap> probs, std::span<const LabelGrid> gt)
{
  check_pairs(probs, gt);
  // flattened list of (sample, cell) for every non-Ignore cell
  std::vector<std::pair<std::size_t, std::size_t>> pix;
  for (std::size_t s = 0; s < gt.size(); ++s) {
    for (std::size_t i = 0; i < gt[s].size(); ++i) {
      if (gt[s][i] != Label::kIgnore) {
        pix.emplace_back(s, i);
      }
    }
  }
  if (pix.empty()) {
    throw Error(ErrorCategory::kUndefined, "lovasz_softmax: no non-Ignore cells");
  }
  LossResult out;
  std::vector<std::size_t> offset(probs.size() + 1, 0);
  for (std::size_t s = 0; s < probs.size(); ++s) {
    offset[s + 1] = offset[s] + probs[s].data.size();
  }
  out.grad.assign(offset.back(), 0.0);

  const std::size_t n = pix.size();
  std::vector<double> err(n);
  std::vector<std::uint8_t> fg(n);
  std::vector<std::size_t> order(n);
  std::vector<std::uint8_t> fg_sorted(n);
  int n_present = 0;
  std::array<std::vector<double>, kNumClasses> class_g;
  std::array<std::vector<std::size_t>, kNumClasses> class_order;
  for (int c = 0; c < kNumClasses; ++c) {
    bool present = false;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [s, i] = pix[k];
      fg[k] = gt[s][i] == static_cast<Label>(c) ? 1 : 0;
      present = present || fg[k] != 0;
      const double p = probs[s].at(i, c);
      err[k] = fg[k] != 0 ? 1.0 - p : p;
    }
    out.present[static_cast<std::size_t>(c)] = present;
    if (!present) {
      continue;
    }
    ++n_present;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return err[a] > err[b];
    });
    for (std::size_t r = 0; r < n; ++r) {
      fg_sorted[r] = fg[order[r]];
      out.order_hash = (out.order_hash ^ order[r]) * 0x100000001b3ULL;
    }
    std::vector<double> g = jaccard_grad(fg_sorted);
    double loss_c = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      loss_c += err[order[r]] * g[r];
    }
    out.per_class[static_cast<std::size_t>(c)] = loss_c;
    class_g[static_cast<std::size_t>(c)] = std::move(g);
    class_order[static_cast<std::size_t>(c)] = order;
  }
  const double scale = 1.0 / n_present;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    if (!out.present[ci]) {
      continue;
    }
    out.loss += out.per_class[ci] * scale;
    for (std::size_t r = 0; r < n; ++r) {
      const auto [s, i] = pix[class_order[ci][r]];
      // d err / d p is -1 for the true class, +1 otherwise
      const double sign = gt[s][i] == static_cast<Label>(c) ? -1.0 : 1.0;
      out.grad[offset[s] + i * kNumClasses + ci] += sign * class_g[ci][r] * scale;
    }
  }
  return out;
}

LossResult lovasz_softmax(const ProbMap & probs, const LabelGrid & gt)
{
  return lovasz_softmax(std::span<const ProbMap>(&probs, 1), std::span<const LabelGrid>(&gt, 1));
}

LossResult weighted_cross_entropy(
  std::span<const ProbMap> probs, std::span<const LabelGrid> gt,
  const std::array<double, kNumClasses> & weights)
{
  check_pairs(probs, gt);
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw Error(ErrorCategory::kConfig, "weighted_cross_entropy: weights must be positive");
    }
  }
  std::size_t count = 0;
  for (const LabelGrid & g : gt) {
    count += static_cast<std::size_t>(
      std::count_if(g.data().begin(), g.data().end(), [](Label l) { return l != Label::kIgnore; }));
  }
  if (count == 0) {
    throw Error(ErrorCategory::kUndefined, "weighted_cross_entropy: no non-Ignore cells");
  }
  LossResult out;
  std::size_t total = 0;
  for (const ProbMap & p : probs) {
    total += p.data.size();
  }
  out.grad.assign(total, 0.0);
  const double inv = 1.0 / static_cast<double>(count);
  // extended-precision sum: the rounded total is what finite differences see
  long double sum = 0.0L;
  std::size_t base = 0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    for (std::size_t i = 0; i < gt[s].size(); ++i) {
      const Label l = gt[s][i];
      if (l == Label::kIgnore) {
        continue;
      }
      const int c = static_cast<int>(l);
      const double w = weights[static_cast<std::size_t>(c)];
      const double p = probs[s].at(i, c);
      out.present[static_cast<std::size_t>(c)] = true;
      if (p > kProbFloor) {
        sum += static_cast<long double>(w) * std::log(static_cast<long double>(p));
        out.grad[base + i * kNumClasses + static_cast<std::size_t>(c)] = -w / p * inv;
      } else {
        sum += static_cast<long double>(w) * std::log(static_cast<long double>(kProbFloor));
      }
    }
    base += probs[s].data.size();
  }
  out.loss = static_cast<double>(-sum / static_cast<long double>(count));
  return out;
}

LossResult weighted_cross_entropy(
  const ProbMap & probs, const LabelGrid & gt, const std::array<double, kNumClasses> & weights)
{
  return weighted_cross_entropy(
    std::span<const ProbMap>(&probs, 1), std::span<const LabelGrid>(&gt, 1), weights);
}

}  // namespace occgrid
