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


#ifndef OCCGRID__TENSOR_HPP_
#define OCCGRID__TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "occgrid/common.hpp"

namespace occgrid
{

/// Dense NCHW tensor of doubles.
struct Tensor4
{
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<double> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_, double fill = 0.0)
  : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill)
  {
  }

  std::size_t plane() const { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }
  std::size_t index(int in, int ic, int y, int x) const
  {
    return ((static_cast<std::size_t>(in) * c + ic) * h + y) * static_cast<std::size_t>(w) + x;
  }
  double & at(int in, int ic, int y, int x) { return data[index(in, ic, y, x)]; }
  double at(int in, int ic, int y, int x) const { return data[index(in, ic, y, x)]; }
  bool same_shape(const Tensor4 & o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }

  friend bool operator==(const Tensor4 &, const Tensor4 &) = default;
};

/// 3x3 cross-correlation with zero padding 1. `weight` is laid out
/// [out][in][ky][kx], `bias` has one entry per output channel.
Tensor4 conv3x3_forward(
  const Tensor4 & x, std::span<const double> weight, std::span<const double> bias, int out_channels);

/// Gradients of conv3x3_forward. Weight and bias gradients are added to
/// `dweight` and `dbias`; the input gradient is returned when `want_dx`.
Tensor4 conv3x3_backward(
  const Tensor4 & x, std::span<const double> weight, const Tensor4 & dy, std::span<double> dweight,
  std::span<double> dbias, bool want_dx = true);

Tensor4 relu_forward(const Tensor4 & x);
/// Gradient through a ReLU given its output; the derivative at 0 is 0.
Tensor4 relu_backward(const Tensor4 & y, const Tensor4 & dy);

/// 2x2 max pooling with stride 2. `argmax` receives, per output element, the
/// flat input index of the first maximum in row-major window order.
Tensor4 maxpool2x2_forward(const Tensor4 & x, std::vector<std::uint32_t> * argmax = nullptr);
Tensor4 maxpool2x2_backward(
  const Tensor4 & dy, const std::vector<std::uint32_t> & argmax, int in_h, int in_w);

Tensor4 upsample2x_forward(const Tensor4 & x);
Tensor4 upsample2x_backward(const Tensor4 & dy);

/// Channel concatenation [a, b].
Tensor4 concat_channels(const Tensor4 & a, const Tensor4 & b);
/// Inverse of concat_channels for a gradient: the first `ca` channels, then the rest.
std::pair<Tensor4, Tensor4> split_channels(const Tensor4 & d, int ca);

}  // namespace occgrid

#endif  // OCCGRID__TENSOR_HPP_
