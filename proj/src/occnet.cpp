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


#include "occgrid/occnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "occgrid/metrics.hpp"

namespace occgrid
{
namespace
{

std::size_t enc_conv(int s, int j) { return static_cast<std::size_t>(2 * s + j); }
std::size_t dec_conv(int depth, int s, int j)
{
  return static_cast<std::size_t>(2 * (depth + 1) + 2 * (depth - 1 - s) + j);
}
std::size_t final_conv(int depth) { return static_cast<std::size_t>(4 * depth + 2); }

int reflect_index(int i, int n)
{
  if (n == 1) {
    return 0;
  }
  const int period = 2 * (n - 1);
  i %= period;
  return i < n ? i : period - i;
}

struct Cache
{
  std::vector<Tensor4> conv_in;
  std::vector<Tensor4> act;
  std::vector<std::vector<std::uint32_t>> argmax;
};

Tensor4 forward_logits(const OccNetModel & model, const Tensor4 & x, Cache * cache)
{
  const int depth = model.depth();
  if (cache != nullptr) {
    cache->conv_in.assign(model.convs.size(), Tensor4{});
    cache->act.assign(model.convs.size(), Tensor4{});
    cache->argmax.assign(static_cast<std::size_t>(depth), {});
  }
  auto run = [&](std::size_t li, const Tensor4 & in, bool relu) {
    if (cache != nullptr) {
      cache->conv_in[li] = in;
    }
    Tensor4 z = conv3x3_forward(in, model.weight(li), model.bias(li), model.convs[li].out);
    if (!relu) {
      return z;
    }
    for (double & v : z.data) {
      v = v > 0.0 ? v : 0.0;
    }
    if (cache != nullptr) {
      cache->act[li] = z;
    }
    return z;
  };
  std::vector<Tensor4> skips(static_cast<std::size_t>(depth));
  Tensor4 cur = x;
  for (int s = 0; s <= depth; ++s) {
    cur = run(enc_conv(s, 0), cur, true);
    cur = run(enc_conv(s, 1), cur, true);
    if (s < depth) {
      skips[static_cast<std::size_t>(s)] = cur;
      cur = maxpool2x2_forward(
        cur, cache != nullptr ? &cache->argmax[static_cast<std::size_t>(s)] : nullptr);
    }
  }
  for (int s = depth - 1; s >= 0; --s) {
    cur = concat_channels(upsample2x_forward(cur), skips[static_cast<std::size_t>(s)]);
    cur = run(dec_conv(depth, s, 0), cur, true);
    cur = run(dec_conv(depth, s, 1), cur, true);
  }
  return run(final_conv(depth), cur, false);
}

// Accumulates parameter gradients for d(loss)/d(logits).
void backward(const OccNetModel & model, const Cache & cache, Tensor4 d, std::vector<double> & grad)
{
  const int depth = model.depth();
  auto conv_back = [&](std::size_t li, const Tensor4 & dy, bool want_dx) {
    const ConvLayer & L = model.convs[li];
    return conv3x3_backward(cache.conv_in[li], model.weight(li), dy,
      std::span<double>(grad.data() + L.w_offset, L.weight_count()),
      std::span<double>(grad.data() + L.b_offset, static_cast<std::size_t>(L.out)), want_dx);
  };
  auto relu_conv_back = [&](std::size_t li, const Tensor4 & dy, bool want_dx) {
    return conv_back(li, relu_backward(cache.act[li], dy), want_dx);
  };
  d = conv_back(final_conv(depth), d, true);
  std::vector<Tensor4> dskips(static_cast<std::size_t>(depth));
  for (int s = 0; s < depth; ++s) {
    d = relu_conv_back(dec_conv(depth, s, 1), d, true);
    d = relu_conv_back(dec_conv(depth, s, 0), d, true);
    auto [dup, dskip] = split_channels(d, model.widths[static_cast<std::size_t>(s + 1)]);
    dskips[static_cast<std::size_t>(s)] = std::move(dskip);
    d = upsample2x_backward(dup);
  }
  for (int s = depth; s >= 0; --s) {
    if (s < depth) {
      const Tensor4 & skip = dskips[static_cast<std::size_t>(s)];
      d = maxpool2x2_backward(d, cache.argmax[static_cast<std::size_t>(s)], skip.h, skip.w);
      for (std::size_t i = 0; i < d.data.size(); ++i) {
        d.data[i] += skip.data[i];
      }
    }
    d = relu_conv_back(enc_conv(s, 1), d, true);
    d = relu_conv_back(enc_conv(s, 0), d, s > 0);
  }
}

std::vector<ProbMap> softmax_crop(const Tensor4 & logits, std::span<const MaskGrid> inputs)
{
  std::vector<ProbMap> out;
  out.reserve(inputs.size());
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    const GridSpec & spec = inputs[s].spec();
    ProbMap p(spec);
    for (int u = 0; u < spec.height; ++u) {
      for (int v = 0; v < spec.width; ++v) {
        const std::size_t cell = static_cast<std::size_t>(u) * spec.width + v;
        double z[kNumClasses];
        double zmax = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < kNumClasses; ++c) {
          z[c] = logits.at(static_cast<int>(s), c, u, v);
          zmax = std::max(zmax, z[c]);
        }
        double sum = 0.0;
        for (int c = 0; c < kNumClasses; ++c) {
          z[c] = std::exp(z[c] - zmax);
          sum += z[c];
        }
        for (int c = 0; c < kNumClasses; ++c) {
          p.at(cell, c) = z[c] / sum;
        }
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

// d(loss)/d(logits) on the padded layout; padding cells get zero.
Tensor4 softmax_backward(
  const std::vector<ProbMap> & probs, std::span<const double> dprob, const Tensor4 & shape)
{
  Tensor4 d(shape.n, shape.c, shape.h, shape.w);
  std::size_t base = 0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    const GridSpec & spec = probs[s].spec;
    for (int u = 0; u < spec.height; ++u) {
      for (int v = 0; v < spec.width; ++v) {
        const std::size_t cell = static_cast<std::size_t>(u) * spec.width + v;
        double dot = 0.0;
        for (int c = 0; c < kNumClasses; ++c) {
          dot += probs[s].at(cell, c) * dprob[base + cell * kNumClasses + static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < kNumClasses; ++c) {
          const double g = dprob[base + cell * kNumClasses + static_cast<std::size_t>(c)];
          d.at(static_cast<int>(s), c, u, v) = probs[s].at(cell, c) * (g - dot);
        }
      }
    }
    base += probs[s].data.size();
  }
  return d;
}

std::uint64_t cache_signature(const Cache & cache)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) { h = (h ^ x) * 0x100000001b3ULL; };
  for (const Tensor4 & a : cache.act) {
    std::uint64_t word = 0;
    int bits = 0;
    for (double v : a.data) {
      word = (word << 1) | (v > 0.0 ? 1U : 0U);
      if (++bits == 64) {
        mix(word);
        word = 0;
        bits = 0;
      }
    }
    mix(word);
  }
  for (const auto & am : cache.argmax) {
    for (std::uint32_t i : am) {
      mix(i);
    }
  }
  return h;
}

LossResult evaluate_loss(
  const std::vector<ProbMap> & probs, std::span<const LabelGrid> labels, const LossConfig & loss)
{
  if (loss.kind == LossKind::kLovasz) {
    return lovasz_softmax(probs, labels);
  }
  return weighted_cross_entropy(probs, labels, loss.ce_weights);
}

}  // namespace

OccNetModel make_architecture(const std::vector<int> & widths)
{
  if (widths.empty()) {
    throw Error(ErrorCategory::kConfig, "occnet: widths must not be empty");
  }
  for (int w : widths) {
    if (w <= 0) {
      throw Error(ErrorCategory::kConfig, "occnet: widths must be positive");
    }
  }
  OccNetModel m;
  m.widths = widths;
  const int depth = m.depth();
  std::size_t offset = 0;
  auto add = [&](int in, int out) {
    ConvLayer L{in, out, offset, 0};
    offset += L.weight_count();
    L.b_offset = offset;
    offset += static_cast<std::size_t>(out);
    m.convs.push_back(L);
  };
  for (int s = 0; s <= depth; ++s) {
    const int w = widths[static_cast<std::size_t>(s)];
    add(s == 0 ? 1 : widths[static_cast<std::size_t>(s - 1)], w);
    add(w, w);
  }
  for (int s = depth - 1; s >= 0; --s) {
    const int w = widths[static_cast<std::size_t>(s)];
    add(widths[static_cast<std::size_t>(s + 1)] + w, w);
    add(w, w);
  }
  add(widths[0], kNumClasses);
  m.params.assign(offset, 0.0);
  return m;
}

OccNetModel make_model(const std::vector<int> & widths, std::uint64_t seed)
{
  OccNetModel m = make_architecture(widths);
  m.seed = seed;
  Rng rng = Rng::derive(seed, 0x1417);
  for (const ConvLayer & L : m.convs) {
    const double bound = std::sqrt(6.0 / (9.0 * L.in));
    for (std::size_t i = 0; i < L.weight_count(); ++i) {
      m.params[L.w_offset + i] = rng.uniform(-bound, bound);
    }
  }
  return m;
}

std::vector<LayerDesc> layer_table(const std::vector<int> & widths)
{
  const OccNetModel m = make_architecture(widths);
  const int depth = m.depth();
  std::vector<LayerDesc> t;
  for (int s = 0; s <= depth; ++s) {
    for (int j = 0; j < 2; ++j) {
      const ConvLayer & L = m.convs[enc_conv(s, j)];
      t.push_back({LayerKind::kConv, L.in, L.out});
    }
    if (s < depth) {
      t.push_back({LayerKind::kPool, widths[static_cast<std::size_t>(s)], widths[static_cast<std::size_t>(s)]});
    }
  }
  for (int s = depth - 1; s >= 0; --s) {
    const int below = widths[static_cast<std::size_t>(s + 1)];
    t.push_back({LayerKind::kUpsample, below, below});
    t.push_back({LayerKind::kConcat, below, widths[static_cast<std::size_t>(s)]});
    for (int j = 0; j < 2; ++j) {
      const ConvLayer & L = m.convs[dec_conv(depth, s, j)];
      t.push_back({LayerKind::kConv, L.in, L.out});
    }
  }
  const ConvLayer & F = m.convs[final_conv(depth)];
  t.push_back({LayerKind::kConv, F.in, F.out});
  return t;
}

Tensor4 pad_inputs(std::span<const MaskGrid> inputs, int multiple)
{
  if (inputs.empty()) {
    throw Error(ErrorCategory::kShape, "pad_inputs: empty batch");
  }
  const int h = inputs[0].height();
  const int w = inputs[0].width();
  for (const MaskGrid & g : inputs) {
    if (g.height() != h || g.width() != w) {
      throw Error(ErrorCategory::kShape, "pad_inputs: inputs differ in size");
    }
  }
  const int hp = (h + multiple - 1) / multiple * multiple;
  const int wp = (w + multiple - 1) / multiple * multiple;
  Tensor4 x(static_cast<int>(inputs.size()), 1, hp, wp);
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    for (int u = 0; u < hp; ++u) {
      const int su = reflect_index(u, h);
      for (int v = 0; v < wp; ++v) {
        x.at(static_cast<int>(s), 0, u, v) = inputs[s].at(su, reflect_index(v, w)) != 0 ? 1.0 : 0.0;
      }
    }
  }
  return x;
}

std::vector<ProbMap> forward(const OccNetModel & model, std::span<const MaskGrid> inputs)
{
  constexpr std::size_t kChunk = 8;
  std::vector<ProbMap> out;
  out.reserve(inputs.size());
  for (std::size_t b = 0; b < inputs.size(); b += kChunk) {
    const auto part = inputs.subspan(b, std::min(kChunk, inputs.size() - b));
    const Tensor4 logits = forward_logits(model, pad_inputs(part, 1 << model.depth()), nullptr);
    for (ProbMap & p : softmax_crop(logits, part)) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

ProbMap forward(const OccNetModel & model, const MaskGrid & input)
{
  return std::move(forward(model, std::span<const MaskGrid>(&input, 1)).front());
}

LabelGrid argmax_labels(const ProbMap & probs)
{
  LabelGrid out(probs.spec, Label::kFree);
  for (std::size_t i = 0; i < probs.cells(); ++i) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
      if (probs.at(i, c) > probs.at(i, best)) {
        best = c;
      }
    }
    out[i] = static_cast<Label>(best);
  }
  return out;
}

LabelGrid infer(const OccNetModel & model, const MaskGrid & input)
{
  return argmax_labels(forward(model, input));
}

std::vector<LabelGrid> infer(const OccNetModel & model, std::span<const MaskGrid> inputs)
{
  std::vector<LabelGrid> out;
  out.reserve(inputs.size());
  for (const ProbMap & p : forward(model, inputs)) {
    out.push_back(argmax_labels(p));
  }
  return out;
}

GradResult loss_and_grad(
  const OccNetModel & model, std::span<const MaskGrid> inputs, std::span<const LabelGrid> labels,
  const LossConfig & loss)
{
  if (inputs.size() != labels.size()) {
    throw Error(ErrorCategory::kShape, "loss_and_grad: inputs and labels differ in count");
  }
  const Tensor4 x = pad_inputs(inputs, 1 << model.depth());
  Cache cache;
  const Tensor4 logits = forward_logits(model, x, &cache);
  const std::vector<ProbMap> probs = softmax_crop(logits, inputs);
  const LossResult lr = evaluate_loss(probs, labels, loss);
  GradResult out;
  out.loss = lr.loss;
  out.grad.assign(model.params.size(), 0.0);
  backward(model, cache, softmax_backward(probs, lr.grad, logits), out.grad);
  out.signature = cache_signature(cache) ^ (lr.order_hash * 0x9e3779b97f4a7c15ULL);
  return out;
}

void sgd_step(
  OccNetModel & model, std::span<const double> grad, SgdState & state, double lr, double momentum)
{
  if (grad.size() != model.params.size()) {
    throw Error(ErrorCategory::kShape, "sgd_step: gradient size does not match parameters");
  }
  if (state.velocity.empty()) {
    state.velocity.assign(model.params.size(), 0.0);
  }
  if (state.velocity.size() != model.params.size()) {
    throw Error(ErrorCategory::kShape, "sgd_step: velocity size does not match parameters");
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    state.velocity[i] = momentum * state.velocity[i] + grad[i];
    model.params[i] -= lr * state.velocity[i];
  }
}

PlateauScheduler::PlateauScheduler(double lr0, double decay, int patience, double delta, double baseline)
: lr_(lr0), decay_(decay), patience_(patience), delta_(delta), best_(baseline)
{
}

double PlateauScheduler::step(double metric)
{
  if (metric > best_ + delta_) {
    best_ = metric;
    stale_ = 0;
  } else if (++stale_ >= patience_) {
    lr_ *= decay_;
    stale_ = 0;
  }
  return lr_;
}

void TrainConfig::validate() const
{
  if (!(lr0 > 0.0) || !(momentum >= 0.0) || !(decay > 0.0) || plateau_patience < 1 ||
      !(plateau_delta >= 0.0) || epochs < 1 || batch_size < 1 || k < 1) {
    throw Error(ErrorCategory::kConfig, "TrainConfig: values must be positive");
  }
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw Error(ErrorCategory::kConfig, "TrainConfig: flip_prob must lie in [0, 1]");
  }
  make_architecture(widths);
}

double validation_miou(const OccNetModel & model, std::span<const Sample> val)
{
  std::vector<MaskGrid> inputs;
  std::vector<LabelGrid> truth;
  for (const Sample & s : val) {
    inputs.push_back(s.input);
    truth.push_back(s.label);
  }
  return evaluate(infer(model, inputs), truth).miou;
}

TrainResult train(
  std::span<const Sample> train_set, std::span<const Sample> val_set, const TrainConfig & cfg,
  const std::function<void(const EpochLog &)> & on_epoch)
{
  cfg.validate();
  if (train_set.empty() || val_set.empty()) {
    throw Error(ErrorCategory::kTraining, "train: train and validation splits must be non-empty");
  }
  TrainResult result;
  OccNetModel model = make_model(cfg.widths, cfg.seed);
  result.initial_val_miou = validation_miou(model, val_set);
  OccNetModel best = model;
  double best_miou = result.initial_val_miou;
  PlateauScheduler sched(cfg.lr0, cfg.decay, cfg.plateau_patience, cfg.plateau_delta,
    result.initial_val_miou);
  SgdState state;
  Rng rng = Rng::derive(cfg.seed, 0x7a11);
  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.index(i)]);
    }
    const double lr = sched.lr();
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_size));
      std::vector<MaskGrid> inputs;
      std::vector<LabelGrid> labels;
      for (std::size_t i = b; i < e; ++i) {
        const Sample & s = train_set[order[i]];
        if (rng.bernoulli(cfg.flip_prob)) {
          inputs.push_back(flip_lateral(s.input));
          labels.push_back(flip_lateral(s.label));
        } else {
          inputs.push_back(s.input);
          labels.push_back(s.label);
        }
      }
      GradResult g;
      try {
        g = loss_and_grad(model, inputs, labels, cfg.loss);
      } catch (const Error & err) {
        // an all-Ignore batch carries no signal
        if (err.category() == ErrorCategory::kUndefined) {
          continue;
        }
        throw;
      }
      if (!std::isfinite(g.loss)) {
        throw Error(ErrorCategory::kTraining,
          "train: non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
            std::to_string(batches));
      }
      sgd_step(model, g.grad, state, lr, cfg.momentum);
      loss_sum += g.loss;
      ++batches;
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.lr = lr;
    entry.train_loss = batches > 0 ? loss_sum / batches : 0.0;
    entry.val_miou = validation_miou(model, val_set);
    if (entry.val_miou > best_miou) {
      best_miou = entry.val_miou;
      best = model;
      result.best_epoch = epoch;
    }
    sched.step(entry.val_miou);
    result.log.push_back(entry);
    if (on_epoch) {
      on_epoch(entry);
    }
  }
  for (double & p : best.params) {
    p = static_cast<double>(static_cast<float>(p));
  }
  result.model = std::move(best);
  return result;
}

GradCheckResult grad_check(
  const OccNetModel & model, const LossConfig & loss, const Sample & sample, double eps, double floor)
{
  const std::span<const MaskGrid> in(&sample.input, 1);
  const std::span<const LabelGrid> gt(&sample.label, 1);
  const GradResult base = loss_and_grad(model, in, gt, loss);
  GradCheckResult out;
  OccNetModel probe = model;
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    probe.params[i] = model.params[i] + eps;
    const GradResult plus = loss_and_grad(probe, in, gt, loss);
    probe.params[i] = model.params[i] - eps;
    const GradResult minus = loss_and_grad(probe, in, gt, loss);
    probe.params[i] = model.params[i];
    if (plus.signature != base.signature || minus.signature != base.signature) {
      ++out.skipped;
      continue;
    }
    const double numeric = (plus.loss - minus.loss) / (2.0 * eps);
    const double analytic = base.grad[i];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), floor});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(numeric - analytic) / denom);
    ++out.checked;
  }
  return out;
}

}  // namespace occgrid
