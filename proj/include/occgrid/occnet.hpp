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


#ifndef OCCGRID__OCCNET_HPP_
#define OCCGRID__OCCNET_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "occgrid/grid.hpp"
#include "occgrid/lovasz.hpp"
#include "occgrid/tensor.hpp"

namespace occgrid
{

struct ConvLayer
{
  int in = 0;
  int out = 0;
  std::size_t w_offset = 0;
  std::size_t b_offset = 0;

  std::size_t weight_count() const { return static_cast<std::size_t>(in) * out * 9; }
  friend bool operator==(const ConvLayer &, const ConvLayer &) = default;
};

/// Encoder-decoder segmentation net with skip connections. Stage s of the
/// encoder runs two conv-relu layers at widths[s] and, except for the last
/// stage, pools by 2. Each decoder stage upsamples, concatenates the
/// matching encoder output and runs two conv-relu layers; a final conv maps
/// to the three class logits. All parameters live in one flat vector.
struct OccNetModel
{
  std::vector<int> widths;
  std::vector<ConvLayer> convs;
  std::vector<double> params;
  std::uint64_t seed = 0;

  int depth() const { return static_cast<int>(widths.size()) - 1; }
  std::span<const double> weight(std::size_t i) const
  {
    return {params.data() + convs[i].w_offset, convs[i].weight_count()};
  }
  std::span<const double> bias(std::size_t i) const
  {
    return {params.data() + convs[i].b_offset, static_cast<std::size_t>(convs[i].out)};
  }
  friend bool operator==(const OccNetModel &, const OccNetModel &) = default;
};

/// Layer layout for `widths` with all parameters zero.
OccNetModel make_architecture(const std::vector<int> & widths);
/// Seeded fan-in scaled uniform weights, zero biases.
OccNetModel make_model(const std::vector<int> & widths, std::uint64_t seed);

enum class LayerKind : std::uint8_t { kConv = 0, kPool = 1, kUpsample = 2, kConcat = 3 };

/// Forward-order layer list. Conv: (in, out); concat: (upsampled, skip)
/// channel counts; pool and upsample: the channel count twice.
struct LayerDesc
{
  LayerKind kind = LayerKind::kConv;
  int a = 0;
  int b = 0;
  friend bool operator==(const LayerDesc &, const LayerDesc &) = default;
};
std::vector<LayerDesc> layer_table(const std::vector<int> & widths);

/// Inputs stacked into one batch, each padded by reflection at the far
/// row and column ends up to a multiple of `multiple`.
Tensor4 pad_inputs(std::span<const MaskGrid> inputs, int multiple);

std::vector<ProbMap> forward(const OccNetModel & model, std::span<const MaskGrid> inputs);
ProbMap forward(const OccNetModel & model, const MaskGrid & input);

/// Per-cell argmax; ties go to the lowest class index.
LabelGrid argmax_labels(const ProbMap & probs);
LabelGrid infer(const OccNetModel & model, const MaskGrid & input);
std::vector<LabelGrid> infer(const OccNetModel & model, std::span<const MaskGrid> inputs);

enum class LossKind { kLovasz, kWeightedCe };

struct LossConfig
{
  LossKind kind = LossKind::kLovasz;
  std::array<double, kNumClasses> ce_weights{1.0, 1.0, 1.0};
};

struct GradResult
{
  double loss = 0.0;
  std::vector<double> grad;     // aligned with OccNetModel::params
  std::uint64_t signature = 0;  // hash of ReLU masks, pool winners and loss sort order
};

/// Batch loss and its gradient with respect to every parameter.
GradResult loss_and_grad(
  const OccNetModel & model, std::span<const MaskGrid> inputs, std::span<const LabelGrid> labels,
  const LossConfig & loss);

struct SgdState
{
  std::vector<double> velocity;
};

/// v = momentum * v + g; theta -= lr * v.
void sgd_step(
  OccNetModel & model, std::span<const double> grad, SgdState & state, double lr, double momentum);

/// Multiplies the learning rate by `decay` once the tracked metric has not
/// improved by more than `delta` for `patience` consecutive epochs.
class PlateauScheduler
{
public:
  PlateauScheduler(double lr0, double decay, int patience, double delta, double baseline);
  double lr() const { return lr_; }
  /// Record one epoch's metric; returns the learning rate for the next epoch.
  double step(double metric);

private:
  double lr_;
  double decay_;
  int patience_;
  double delta_;
  double best_;
  int stale_ = 0;
};

struct TrainConfig
{
  double lr0 = 0.05;
  double momentum = 0.9;
  double decay = 0.9;
  int plateau_patience = 2;
  double plateau_delta = 1e-3;
  int epochs = 30;
  int batch_size = 8;
  double flip_prob = 0.5;
  int k = 1;  // aggregation length the data was built with
  std::uint64_t seed = 7;
  LossConfig loss;
  std::vector<int> widths{16, 32, 64};

  void validate() const;
};

struct Sample
{
  MaskGrid input;
  LabelGrid label;
};

struct EpochLog
{
  int epoch = 0;
  double lr = 0.0;         // rate used during the epoch
  double train_loss = 0.0; // mean batch loss
  double val_miou = 0.0;
  friend bool operator==(const EpochLog &, const EpochLog &) = default;
};

struct TrainResult
{
  OccNetModel model;         // best validation snapshot, rounded to float32
  std::vector<EpochLog> log;
  double initial_val_miou = 0.0;
  int best_epoch = 0;        // 0 when the initial weights were never beaten
};

double validation_miou(const OccNetModel & model, std::span<const Sample> val);

/// SGD with momentum over seeded shuffles with lateral flip augmentation;
/// keeps the weights with the best validation mIoU. Throws kTraining on an
/// empty split or a non-finite loss.
TrainResult train(
  std::span<const Sample> train_set, std::span<const Sample> val_set, const TrainConfig & cfg,
  const std::function<void(const EpochLog &)> & on_epoch = {});

struct GradCheckResult
{
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // parameters whose perturbation crosses a kink
};

/// Central-difference check of every parameter gradient on one sample.
/// The relative error is |a - n| / max(|a|, |n|, floor).
GradCheckResult grad_check(
  const OccNetModel & model, const LossConfig & loss, const Sample & sample, double eps = 1e-4,
  double floor = 1e-8);

}  // namespace occgrid

#endif  // OCCGRID__OCCNET_HPP_
