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


#include "occgrid/tensor.hpp"

#include <algorithm>

#include <Eigen/Core>

namespace occgrid
{
namespace
{

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// col[(ci * 9 + ky * 3 + kx), y * W + x] = x[ci, y + ky - 1, x + kx - 1]
void im2col(const Tensor4 & x, int sample, RowMat & col)
{
  const int h = x.h;
  const int w = x.w;
  col.resize(static_cast<Eigen::Index>(x.c) * 9, static_cast<Eigen::Index>(h) * w);
  for (int ci = 0; ci < x.c; ++ci) {
    const double * src = &x.data[x.index(sample, ci, 0, 0)];
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double * dst = col.row(static_cast<Eigen::Index>(ci) * 9 + ky * 3 + kx).data();
        const int dy = ky - 1;
        const int dx = kx - 1;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        for (int y = 0; y < h; ++y) {
          double * d = dst + static_cast<std::ptrdiff_t>(y) * w;
          if (y + dy < 0 || y + dy >= h) {
            std::fill(d, d + w, 0.0);
            continue;
          }
          const double * s = src + static_cast<std::ptrdiff_t>(y + dy) * w + dx;
          std::fill(d, d + x0, 0.0);
          std::copy(s + x0, s + x1, d + x0);
          std::fill(d + x1, d + w, 0.0);
        }
      }
    }
  }
}

void col2im_add(const RowMat & col, Tensor4 & dx, int sample)
{
  const int h = dx.h;
  const int w = dx.w;
  for (int ci = 0; ci < dx.c; ++ci) {
    double * dst = &dx.data[dx.index(sample, ci, 0, 0)];
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double * src = col.row(static_cast<Eigen::Index>(ci) * 9 + ky * 3 + kx).data();
        const int dy = ky - 1;
        const int ddx = kx - 1;
        const int x0 = std::max(0, -ddx);
        const int x1 = std::min(w, w - ddx);
        for (int y = std::max(0, -dy); y < std::min(h, h - dy); ++y) {
          double * d = dst + static_cast<std::ptrdiff_t>(y + dy) * w + ddx;
          const double * s = src + static_cast<std::ptrdiff_t>(y) * w;
          for (int xx = x0; xx < x1; ++xx) {
            d[xx] += s[xx];
          }
        }
      }
    }
  }
}

void require(bool ok, const char * what)
{
  if (!ok) {
    throw Error(ErrorCategory::kShape, what);
  }
}

}  // namespace

Tensor4 conv3x3_forward(
  const Tensor4 & x, std::span<const double> weight, std::span<const double> bias, int out_channels)
{
  require(
    weight.size() == static_cast<std::size_t>(out_channels) * x.c * 9 &&
      bias.size() == static_cast<std::size_t>(out_channels),
    "conv3x3_forward: weight or bias size does not match channel counts");
  Tensor4 y(x.n, out_channels, x.h, x.w);
  const auto hw = static_cast<Eigen::Index>(x.plane());
  ConstMapMat wm(weight.data(), out_channels, static_cast<Eigen::Index>(x.c) * 9);
  RowMat col;
  for (int s = 0; s < x.n; ++s) {
    im2col(x, s, col);
    MapMat ym(&y.data[y.index(s, 0, 0, 0)], out_channels, hw);
    ym.noalias() = wm * col;
    for (int o = 0; o < out_channels; ++o) {
      ym.row(o).array() += bias[static_cast<std::size_t>(o)];
    }
  }
  return y;
}

Tensor4 conv3x3_backward(
  const Tensor4 & x, std::span<const double> weight, const Tensor4 & dy, std::span<double> dweight,
  std::span<double> dbias, bool want_dx)
{
  const int out_channels = dy.c;
  require(
    dy.n == x.n && dy.h == x.h && dy.w == x.w &&
      weight.size() == static_cast<std::size_t>(out_channels) * x.c * 9 &&
      dweight.size() == weight.size() && dbias.size() == static_cast<std::size_t>(out_channels),
    "conv3x3_backward: shape mismatch");
  const auto hw = static_cast<Eigen::Index>(x.plane());
  const auto k = static_cast<Eigen::Index>(x.c) * 9;
  ConstMapMat wm(weight.data(), out_channels, k);
  MapMat dwm(dweight.data(), out_channels, k);
  RowMat col;
  for (int s = 0; s < x.n; ++s) {
    ConstMapMat dym(&dy.data[dy.index(s, 0, 0, 0)], out_channels, hw);
    im2col(x, s, col);
    dwm.noalias() += dym * col.transpose();
    // plain loop: Eigen's vectorised sum peels by address alignment, which
    // would make the rounding depend on where the batch happens to live
    for (int o = 0; o < out_channels; ++o) {
      const double * row = dym.data() + static_cast<std::ptrdiff_t>(o) * hw;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < hw; ++i) {
        acc += row[i];
      }
      dbias[static_cast<std::size_t>(o)] += acc;
    }
  }
  if (!want_dx) {
    return {};
  }
  if (out_channels < x.c) {
    // Narrow output: the input gradient is a forward convolution of dy
    // with the transposed, spatially flipped kernel, which moves less data.
    std::vector<double> wt(weight.size());
    for (int o = 0; o < out_channels; ++o) {
      for (int c = 0; c < x.c; ++c) {
        for (int t = 0; t < 9; ++t) {
          wt[(static_cast<std::size_t>(c) * out_channels + o) * 9 + static_cast<std::size_t>(8 - t)] =
            weight[(static_cast<std::size_t>(o) * x.c + c) * 9 + static_cast<std::size_t>(t)];
        }
      }
    }
    const std::vector<double> zero(static_cast<std::size_t>(x.c), 0.0);
    return conv3x3_forward(dy, wt, zero, x.c);
  }
  Tensor4 dx(x.n, x.c, x.h, x.w);
  RowMat dcol;
  for (int s = 0; s < x.n; ++s) {
    ConstMapMat dym(&dy.data[dy.index(s, 0, 0, 0)], out_channels, hw);
    dcol.noalias() = wm.transpose() * dym;
    col2im_add(dcol, dx, s);
  }
  return dx;
}

Tensor4 relu_forward(const Tensor4 & x)
{
  Tensor4 y = x;
  for (double & v : y.data) {
    v = v > 0.0 ? v : 0.0;
  }
  return y;
}

Tensor4 relu_backward(const Tensor4 & y, const Tensor4 & dy)
{
  require(y.same_shape(dy), "relu_backward: shape mismatch");
  Tensor4 dx = dy;
  for (std::size_t i = 0; i < dx.data.size(); ++i) {
    if (!(y.data[i] > 0.0)) {
      dx.data[i] = 0.0;
    }
  }
  return dx;
}

Tensor4 maxpool2x2_forward(const Tensor4 & x, std::vector<std::uint32_t> * argmax)
{
  require(x.h % 2 == 0 && x.w % 2 == 0, "maxpool2x2: spatial size must be even");
  Tensor4 y(x.n, x.c, x.h / 2, x.w / 2);
  if (argmax != nullptr) {
    argmax->assign(y.data.size(), 0);
  }
  std::size_t o = 0;
  for (int s = 0; s < x.n; ++s) {
    for (int ch = 0; ch < x.c; ++ch) {
      for (int yy = 0; yy < y.h; ++yy) {
        for (int xx = 0; xx < y.w; ++xx, ++o) {
          std::size_t best = x.index(s, ch, 2 * yy, 2 * xx);
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const std::size_t i = x.index(s, ch, 2 * yy + dy, 2 * xx + dx);
              if (x.data[i] > x.data[best]) {
                best = i;
              }
            }
          }
          y.data[o] = x.data[best];
          if (argmax != nullptr) {
            (*argmax)[o] = static_cast<std::uint32_t>(best);
          }
        }
      }
    }
  }
  return y;
}

Tensor4 maxpool2x2_backward(
  const Tensor4 & dy, const std::vector<std::uint32_t> & argmax, int in_h, int in_w)
{
  require(argmax.size() == dy.data.size() && in_h == 2 * dy.h && in_w == 2 * dy.w,
    "maxpool2x2_backward: shape mismatch");
  Tensor4 dx(dy.n, dy.c, in_h, in_w);
  for (std::size_t o = 0; o < dy.data.size(); ++o) {
    dx.data[argmax[o]] += dy.data[o];
  }
  return dx;
}

Tensor4 upsample2x_forward(const Tensor4 & x)
{
  Tensor4 y(x.n, x.c, 2 * x.h, 2 * x.w);
  for (int s = 0; s < x.n; ++s) {
    for (int ch = 0; ch < x.c; ++ch) {
      for (int yy = 0; yy < y.h; ++yy) {
        for (int xx = 0; xx < y.w; ++xx) {
          y.at(s, ch, yy, xx) = x.at(s, ch, yy / 2, xx / 2);
        }
      }
    }
  }
  return y;
}

Tensor4 upsample2x_backward(const Tensor4 & dy)
{
  require(dy.h % 2 == 0 && dy.w % 2 == 0, "upsample2x_backward: spatial size must be even");
  Tensor4 dx(dy.n, dy.c, dy.h / 2, dy.w / 2);
  for (int s = 0; s < dy.n; ++s) {
    for (int ch = 0; ch < dy.c; ++ch) {
      for (int yy = 0; yy < dy.h; ++yy) {
        for (int xx = 0; xx < dy.w; ++xx) {
          dx.at(s, ch, yy / 2, xx / 2) += dy.at(s, ch, yy, xx);
        }
      }
    }
  }
  return dx;
}

Tensor4 concat_channels(const Tensor4 & a, const Tensor4 & b)
{
  require(a.n == b.n && a.h == b.h && a.w == b.w, "concat_channels: shape mismatch");
  Tensor4 y(a.n, a.c + b.c, a.h, a.w);
  const std::size_t pa = a.plane() * static_cast<std::size_t>(a.c);
  const std::size_t pb = b.plane() * static_cast<std::size_t>(b.c);
  for (int s = 0; s < a.n; ++s) {
    const auto si = static_cast<std::size_t>(s);
    std::copy_n(a.data.begin() + static_cast<std::ptrdiff_t>(si * pa), pa,
      y.data.begin() + static_cast<std::ptrdiff_t>(si * (pa + pb)));
    std::copy_n(b.data.begin() + static_cast<std::ptrdiff_t>(si * pb), pb,
      y.data.begin() + static_cast<std::ptrdiff_t>(si * (pa + pb) + pa));
  }
  return y;
}

std::pair<Tensor4, Tensor4> split_channels(const Tensor4 & d, int ca)
{
  require(ca >= 0 && ca <= d.c, "split_channels: bad channel split");
  Tensor4 a(d.n, ca, d.h, d.w);
  Tensor4 b(d.n, d.c - ca, d.h, d.w);
  const std::size_t pa = a.plane() * static_cast<std::size_t>(a.c);
  const std::size_t pb = b.plane() * static_cast<std::size_t>(b.c);
  for (int s = 0; s < d.n; ++s) {
    const auto si = static_cast<std::size_t>(s);
    const auto base = d.data.begin() + static_cast<std::ptrdiff_t>(si * (pa + pb));
    std::copy_n(base, pa, a.data.begin() + static_cast<std::ptrdiff_t>(si * pa));
    std::copy_n(base + static_cast<std::ptrdiff_t>(pa), pb,
      b.data.begin() + static_cast<std::ptrdiff_t>(si * pb));
  }
  return {std::move(a), std::move(b)};
}

}  // namespace occgrid
