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

#include <algorithm>
#include <cmath>

#include "occgrid/classic_ism.hpp"
#include "occgrid/metrics.hpp"
#include "occgrid/raytrace.hpp"

namespace occgrid
{
namespace
{

TEST(DeltaIsmTest, NoDetectionsContributesNothing)
{
  const GridSpec spec = GridSpec::forward(10, 5, 1.0);
  EXPECT_EQ(delta_ism_update(spec, {0, 0}, {}, IsmConfig{}), RealGrid(spec, 0.0));
}

TEST(DeltaIsmTest, SingleColumnDetection)
{
  const GridSpec spec = GridSpec::forward(10, 1, 1.0);
  const std::vector<Point2> det{{5.5, 0.0}};
  const RealGrid inc = delta_ism_update(spec, {0, 0}, det, IsmConfig{});
  for (int u = 0; u < 10; ++u) {
    const double want = u < 5 ? std::log(0.4 / 0.6) : u == 5 ? std::log(0.7 / 0.3) : 0.0;
    EXPECT_DOUBLE_EQ(inc.at(u, 0), want) << u;
  }
  EXPECT_NEAR(inc.at(5, 0), 0.847, 5e-4);
  EXPECT_NEAR(inc.at(0, 0), -0.405, 5e-4);
}

TEST(DeltaIsmTest, FartherDetectionOnSameRayIsHidden)
{
  const GridSpec spec = GridSpec::forward(10, 1, 1.0);
  const std::vector<Point2> det{{3.5, 0.0}, {7.5, 0.0}};
  const RealGrid inc = delta_ism_update(spec, {0, 0}, det, IsmConfig{});
  EXPECT_GT(inc.at(3, 0), 0.0);
  for (int u = 4; u < 10; ++u) {
    EXPECT_EQ(inc.at(u, 0), 0.0) << u;
  }
}

TEST(DeltaIsmTest, TouchesOnlyCellsOnDetectionRays)
{
  const GridSpec spec = GridSpec::forward(30, 30, 0.5);
  Rng rng(4);
  std::vector<Point2> det;
  for (int i = 0; i < 5; ++i) {
    det.push_back({rng.uniform(1, 14), rng.uniform(-7, 7)});
  }
  const RealGrid inc = delta_ism_update(spec, {0, 0}, det, IsmConfig{});
  MaskGrid on_ray(spec, 0);
  for (const Point2 & d : det) {
    for (const Cell & c : traverse_ray(spec, {0, 0}, d)) {
      on_ray.at(c) = 1;
    }
  }
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (!on_ray[i]) {
      ASSERT_EQ(inc[i], 0.0);
    }
  }
}

TEST(GaussianIsmTest, PeakAtDetectionAndAzimuthSymmetric)
{
  const GridSpec spec = GridSpec::forward(41, 41, 0.5);
  IsmConfig cfg;
  cfg.kind = IsmKind::kGaussian;
  cfg.sigma_range = 1.0;
  cfg.sigma_azimuth = deg2rad(3.0);
  const std::vector<Point2> det{{12.25, 0.0}};
  const RealGrid inc = gaussian_ism_update(spec, {0, 0}, det, cfg);
  const auto own = *world_to_cell(det[0], spec);
  const double peak = inc.at(own);
  EXPECT_DOUBLE_EQ(peak, logit(cfg.p_hit));
  EXPECT_EQ(*std::max_element(inc.data().begin(), inc.data().end()), peak);
  // the detection ray runs along the centre line of column own.v
  for (int u = 0; u < spec.height; ++u) {
    for (int dv = 1; own.v + dv < spec.width && own.v - dv >= 0; ++dv) {
      EXPECT_NEAR(inc.at(u, own.v + dv), inc.at(u, own.v - dv), 1e-9);
    }
  }
}

TEST(GaussianIsmTest, NarrowKernelReproducesDelta)
{
  const GridSpec spec = GridSpec::forward(21, 21, 1.0);
  IsmConfig g;
  g.kind = IsmKind::kGaussian;
  g.sigma_range = 1e-6;
  g.sigma_azimuth = 1e-6;
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> det;
    for (int i = 0; i < 4; ++i) {
      det.push_back({rng.uniform(0.5, 20.5), rng.uniform(-10, 10)});
    }
    EXPECT_EQ(gaussian_ism_update(spec, {0, 0}, det, g), delta_ism_update(spec, {0, 0}, det, IsmConfig{}));
  }
}

TEST(BayesTest, Additivity)
{
  const GridSpec spec = GridSpec::forward(3, 3, 1.0);
  LogOddsGrid acc(spec, 0.0);
  bayes_update(acc, RealGrid(spec, 0.0));
  EXPECT_EQ(acc.values(), RealGrid(spec, 0.0));
  RealGrid inc(spec, 0.0);
  inc.at(1, 1) = 0.847;
  bayes_update(acc, inc);
  bayes_update(acc, inc);
  EXPECT_NEAR(acc.values().at(1, 1), 1.694, 1e-9);
  EXPECT_THROW(bayes_update(acc, RealGrid(GridSpec::forward(2, 3, 1.0), 0.0)), Error);
}

TEST(BayesTest, PriorIsSubtractedOnlyWhereObserved)
{
  const GridSpec spec = GridSpec::forward(1, 2, 1.0);
  LogOddsGrid acc(spec, 0.2);
  RealGrid inc(spec, 0.0);
  inc.at(0, 0) = 1.0;
  bayes_update(acc, inc);
  EXPECT_NEAR(acc.values().at(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(acc.values().at(0, 1), 0.2, 1e-9);
}

TEST(BayesTest, FrameOrderIsBitExact)
{
  const GridSpec spec = GridSpec::forward(16, 16, 1.0);
  Rng rng(21);
  std::vector<RealGrid> incs;
  for (int i = 0; i < 10; ++i) {
    RealGrid g(spec, 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
      g[c] = rng.bernoulli(0.5) ? rng.uniform(-3.0, 3.0) : 0.0;
    }
    incs.push_back(g);
  }
  LogOddsGrid ref(spec, 0.0);
  for (const auto & g : incs) {
    bayes_update(ref, g);
  }
  std::vector<std::size_t> order(10);
  for (std::size_t i = 0; i < 10; ++i) {
    order[i] = i;
  }
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = 9; i > 0; --i) {
      std::swap(order[i], order[rng.index(i + 1)]);
    }
    LogOddsGrid acc(spec, 0.0);
    for (std::size_t i : order) {
      bayes_update(acc, incs[i]);
    }
    ASSERT_EQ(acc.fixed, ref.fixed);
    ASSERT_EQ(acc.values(), ref.values());
  }
}

TEST(ReadoutTest, LogOddsToProbability)
{
  EXPECT_DOUBLE_EQ(logodds_to_prob(0.0, 8.0), 0.5);
  EXPECT_NEAR(logodds_to_prob(std::log(3.0), 8.0), 0.75, 1e-15);
  EXPECT_EQ(logodds_to_prob(80.0, 8.0), logodds_to_prob(8.0, 8.0));
  EXPECT_EQ(logodds_to_prob(-80.0, 8.0), logodds_to_prob(-8.0, 8.0));
}

TEST(ReadoutTest, ClassifyGrid)
{
  const GridSpec spec = GridSpec::forward(1, 3, 1.0);
  const RealGrid p(spec, std::vector<double>{0.5, 0.9, 0.1});
  EXPECT_EQ(classify_grid(p, 0.65, 0.35).data(),
    (std::vector<Label>{Label::kUnobserved, Label::kOccupied, Label::kFree}));
  EXPECT_THROW(classify_grid(p, 0.3, 0.4), Error);
}

TEST(ReadoutTest, ClassifyIsMonotone)
{
  const GridSpec spec = GridSpec::forward(1, 101, 1.0);
  RealGrid p(spec);
  for (int v = 0; v <= 100; ++v) {
    p.at(0, v) = v / 100.0;
  }
  const LabelGrid g = classify_grid(p, 0.6, 0.3);
  auto rank = [](Label l) { return l == Label::kFree ? 0 : l == Label::kUnobserved ? 1 : 2; };
  for (int v = 1; v <= 100; ++v) {
    EXPECT_GE(rank(g.at(0, v)), rank(g.at(0, v - 1)));
  }
}

TEST(TuneTest, PerfectCandidateWins)
{
  const GridSpec spec = GridSpec::forward(6, 6, 1.0);
  Rng rng(1);
  RealGrid p(spec);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = rng.uniform();
  }
  const LabelGrid gt = classify_grid(p, 0.65, 0.35);
  const std::vector<RealGrid> preds{p};
  const std::vector<LabelGrid> gts{gt};
  const auto cands = default_threshold_candidates();
  ASSERT_NE(std::find(cands.begin(), cands.end(), Thresholds{0.65, 0.35}), cands.end());
  const TuneResult r = tune_thresholds(preds, gts, cands);
  EXPECT_EQ(r.miou, 1.0);
  const LabelGrid again = classify_grid(p, r.best.t_occ, r.best.t_free);
  EXPECT_EQ(again, gt);
}

TEST(TuneTest, AllUnobservedTieBreak)
{
  const GridSpec spec = GridSpec::forward(2, 2, 1.0);
  const std::vector<RealGrid> preds{RealGrid(spec, std::vector<double>{0.5, 0.52, 0.48, 0.6})};
  const std::vector<LabelGrid> gts{LabelGrid(spec, Label::kUnobserved)};
  const std::vector<Thresholds> cands{{0.7, 0.3}, {0.65, 0.35}, {0.65, 0.4}, {0.55, 0.45}, {0.9, 0.1}};
  // (0.65, 0.35), (0.65, 0.40), (0.70, 0.30), (0.90, 0.10) all score 1; the
  // smallest t_occ wins, then the larger t_free
  const TuneResult r = tune_thresholds(preds, gts, cands);
  EXPECT_EQ(r.miou, 1.0);
  EXPECT_EQ(r.best, (Thresholds{0.65, 0.4}));
}

TEST(TuneTest, MatchesBruteForceSweep)
{
  const GridSpec spec = GridSpec::forward(12, 12, 1.0);
  Rng rng(17);
  std::vector<RealGrid> preds;
  std::vector<LabelGrid> gts;
  for (int i = 0; i < 4; ++i) {
    RealGrid p(spec);
    LabelGrid g(spec);
    for (std::size_t c = 0; c < p.size(); ++c) {
      p[c] = rng.uniform();
      g[c] = static_cast<Label>(rng.index(4));
    }
    preds.push_back(p);
    gts.push_back(g);
  }
  const auto cands = default_threshold_candidates();
  double best = -1.0;
  Thresholds arg{};
  for (const Thresholds & t : cands) {
    std::vector<LabelGrid> lab;
    for (const auto & p : preds) {
      lab.push_back(classify_grid(p, t.t_occ, t.t_free));
    }
    const double m = evaluate(lab, gts).miou;
    if (m > best || (m == best && (t.t_occ < arg.t_occ || (t.t_occ == arg.t_occ && t.t_free > arg.t_free)))) {
      best = m;
      arg = t;
    }
  }
  const TuneResult r = tune_thresholds(preds, gts, cands);
  EXPECT_EQ(r.best, arg);
  EXPECT_EQ(r.miou, best);
}

TEST(TuneTest, EmptyValidationThrows)
{
  const auto cands = default_threshold_candidates();
  EXPECT_THROW(tune_thresholds({}, {}, cands), Error);
}

}  // namespace
}  // namespace occgrid
