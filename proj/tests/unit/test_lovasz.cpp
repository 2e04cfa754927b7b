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


#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "occgrid/lovasz.hpp"
#include "occgrid/metrics.hpp"

namespace occgrid
{
namespace
{

TEST(JaccardGradTest, Examples)
{
  const std::vector<std::uint8_t> a{1};
  EXPECT_EQ(jaccard_grad(a), (std::vector<double>{1.0}));
  const std::vector<std::uint8_t> b{1, 0};
  EXPECT_EQ(jaccard_grad(b), (std::vector<double>{1.0, 0.0}));
  const std::vector<std::uint8_t> c{0, 1};
  EXPECT_EQ(jaccard_grad(c), (std::vector<double>{0.5, 0.5}));
  const std::vector<std::uint8_t> none{0, 0, 0};
  EXPECT_EQ(jaccard_grad(none), (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(LovaszTest, Examples)
{
  const GridSpec spec = GridSpec::forward(3, 3, 1.0);
  Rng rng(1);
  const LabelGrid gt = testing::random_labels(spec, rng, 0.0);
  EXPECT_EQ(lovasz_softmax(one_hot(gt), gt).loss, 0.0);

  // Occupied is present but gets no mass anywhere
  LabelGrid g2(spec, Label::kFree);
  g2.at(1, 1) = Label::kOccupied;
  const LossResult r = lovasz_softmax(one_hot(LabelGrid(spec, Label::kFree)), g2);
  EXPECT_DOUBLE_EQ(r.per_class[1], 1.0);
  EXPECT_FALSE(r.present[2]);

  LabelGrid single(spec, Label::kIgnore);
  single.at(2, 0) = Label::kUnobserved;
  ProbMap p(spec);
  for (std::size_t i = 0; i < p.cells(); ++i) {
    p.at(i, 0) = 0.1;
    p.at(i, 1) = 0.2;
    p.at(i, 2) = 0.7;
  }
  const LossResult s = lovasz_softmax(p, single);
  EXPECT_NEAR(s.per_class[2], 0.3, 1e-15);
  EXPECT_NEAR(s.loss, 0.3, 1e-15);
}

TEST(LovaszTest, AllIgnoreIsUndefined)
{
  const GridSpec spec = GridSpec::forward(2, 2, 1.0);
  try {
    lovasz_softmax(ProbMap(spec), LabelGrid(spec, Label::kIgnore));
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.category(), ErrorCategory::kUndefined);
  }
}

TEST(LovaszTest, HardPredictionsEqualOneMinusIou)
{
  const GridSpec spec = GridSpec::forward(8, 8, 1.0);
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const LabelGrid gt = testing::random_labels(spec, rng, 0.2);
    const LabelGrid pred = testing::random_labels(spec, rng, 0.0);
    const LossResult r = lovasz_softmax(one_hot(pred), gt);
    const auto iou = iou_per_class(confusion(pred, gt));
    for (std::size_t c = 0; c < 3; ++c) {
      if (r.present[c]) {
        ASSERT_NEAR(r.per_class[c], 1.0 - iou[c], 1e-9);
      }
    }
  }
}

TEST(LovaszTest, PixelOrderInvariance)
{
  const GridSpec spec = GridSpec::forward(5, 5, 1.0);
  Rng rng(4);
  const ProbMap p = testing::random_probs(spec, rng);
  const LabelGrid gt = testing::random_labels(spec, rng, 0.2);
  const double ref = lovasz_softmax(p, gt).loss;
  std::vector<std::size_t> perm(spec.cell_count());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    perm[i] = i;
  }
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.index(i + 1)]);
  }
  ProbMap q(spec);
  LabelGrid h(spec);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    h[i] = gt[perm[i]];
    for (int c = 0; c < 3; ++c) {
      q.at(i, c) = p.at(perm[i], c);
    }
  }
  EXPECT_NEAR(lovasz_softmax(q, h).loss, ref, 1e-12);
}

TEST(LovaszTest, PerClassLossInUnitInterval)
{
  const GridSpec spec = GridSpec::forward(6, 6, 1.0);
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const LossResult r = lovasz_softmax(testing::random_probs(spec, rng), testing::random_labels(spec, rng, 0.1));
    for (double x : r.per_class) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(LovaszTest, BatchPoolsPixels)
{
  const GridSpec spec = GridSpec::forward(3, 4, 1.0);
  Rng rng(12);
  const std::vector<ProbMap> ps{testing::random_probs(spec, rng), testing::random_probs(spec, rng)};
  const std::vector<LabelGrid> gs{testing::random_labels(spec, rng, 0.2), testing::random_labels(spec, rng, 0.2)};
  // the same pixels as one 6x4 map
  const GridSpec tall = GridSpec::forward(6, 4, 1.0);
  ProbMap joined(tall);
  LabelGrid jl(tall);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
      jl[s * 12 + i] = gs[s][i];
      for (int c = 0; c < 3; ++c) {
        joined.at(s * 12 + i, c) = ps[s].at(i, c);
      }
    }
  }
  EXPECT_DOUBLE_EQ(lovasz_softmax(ps, gs).loss, lovasz_softmax(joined, jl).loss);
}

TEST(LovaszTest, GradientMatchesFiniteDifferences)
{
  Rng rng(99);
  EXPECT_LT(testing::check_lovasz(rng), 1e-4);
}

TEST(WeightedCeTest, Examples)
{
  const GridSpec spec = GridSpec::forward(3, 3, 1.0);
  Rng rng(3);
  const LabelGrid gt = testing::random_labels(spec, rng, 0.0);
  EXPECT_LE(weighted_cross_entropy(one_hot(gt), gt, {2, 3, 4}).loss, 1e-11);

  ProbMap uniform(spec);
  for (double & x : uniform.data) {
    x = 1.0 / 3.0;
  }
  EXPECT_NEAR(weighted_cross_entropy(uniform, gt, {1, 1, 1}).loss, std::log(3.0), 1e-12);

  const ProbMap p = testing::random_probs(spec, rng);
  const LossResult a = weighted_cross_entropy(p, gt, {1.0, 0.5, 2.0});
  const LossResult b = weighted_cross_entropy(p, gt, {2.0, 1.0, 4.0});
  EXPECT_EQ(b.loss, 2.0 * a.loss);
  for (std::size_t i = 0; i < a.grad.size(); ++i) {
    EXPECT_EQ(b.grad[i], 2.0 * a.grad[i]);
  }
  EXPECT_THROW(weighted_cross_entropy(p, gt, {1.0, 0.0, 1.0}), Error);
}

TEST(WeightedCeTest, GradientMatchesFiniteDifferences)
{
  Rng rng(98);
  EXPECT_LT(testing::check_weighted_ce(rng), 1e-5);
}

}  // namespace
}  // namespace occgrid
