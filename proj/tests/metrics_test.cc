// Copyright 2026 The MTAL Authors. All Rights Reserved.
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

#include "mtal/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "test_util.hpp"

namespace mtal {
namespace {

using testing::ExhaustiveAp;
using testing::kPropertyCases;

TEST(BoxIouTest, HalfOverlap) {
  EXPECT_DOUBLE_EQ(BoxIou({0, 0, 2, 2}, {1, 0, 3, 2}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(BoxIou({0, 0, 1, 1}, {1, 0, 2, 1}), 0.0);
  EXPECT_DOUBLE_EQ(BoxIou({0, 0, 4, 4}, {0, 0, 4, 4}), 1.0);
}

TEST(BoxIouTest, SymmetricAndBounded) {
  RandomStream rng(41);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    auto box = [&] {
      const double x = rng.uniform(0, 10), y = rng.uniform(0, 10);
      return Box{x, y, x + rng.uniform(0.1, 5), y + rng.uniform(0.1, 5)};
    };
    const Box a = box(), b = box();
    const double iou = BoxIou(a, b);
    ASSERT_EQ(iou, BoxIou(b, a));
    ASSERT_GE(iou, 0.0);
    ASSERT_LE(iou, 1.0);
  }
}

TEST(AveragePrecisionTest, TruePositiveThenFalsePositive) {
  const std::vector<ScoredBox> preds{{{0, 0, 2, 2}, 0.9}, {{5, 5, 6, 6}, 0.5}};
  const std::vector<Box> truths{{0, 0, 2, 2}};
  EXPECT_DOUBLE_EQ(AveragePrecision(preds, truths), 1.0);
}

TEST(AveragePrecisionTest, FalsePositiveFirstHalvesPrecision) {
  const std::vector<ScoredBox> preds{{{5, 5, 6, 6}, 0.9}, {{0, 0, 2, 2}, 0.5}};
  const std::vector<Box> truths{{0, 0, 2, 2}};
  EXPECT_DOUBLE_EQ(AveragePrecision(preds, truths), 0.5);
}

TEST(AveragePrecisionTest, EmptyConventions) {
  EXPECT_DOUBLE_EQ(AveragePrecision({}, {}), 1.0);
  const std::vector<ScoredBox> preds{{{0, 0, 1, 1}, 0.3}};
  EXPECT_DOUBLE_EQ(AveragePrecision(preds, {}), 0.0);
  const std::vector<Box> truths{{0, 0, 1, 1}};
  EXPECT_DOUBLE_EQ(AveragePrecision({}, truths), 0.0);
}

TEST(AveragePrecisionTest, MatchesExhaustiveCutoffs) {
  RandomStream rng(42);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    // Coarse grids make equal confidences and IoU ties common.
    auto box = [&] {
      const double x = static_cast<double>(rng.below(6));
      const double y = static_cast<double>(rng.below(6));
      return Box{x, y, x + 1 + static_cast<double>(rng.below(3)),
                 y + 1 + static_cast<double>(rng.below(3))};
    };
    std::vector<Box> truths(rng.below(6));
    for (Box& t : truths) t = box();
    std::vector<ScoredBox> preds(rng.below(6));
    for (ScoredBox& p : preds)
      p = {box(), static_cast<double>(rng.below(4)) / 4.0};
    ASSERT_EQ(AveragePrecision(preds, truths),
              ExhaustiveAp(preds, truths, 0.5));
  }
}

TEST(AveragePrecisionTest, PooledKeepsImagesApart) {
  const std::vector<PooledBox> truths{{0, {0, 0, 2, 2}, 0},
                                      {1, {0, 0, 2, 2}, 0}};
  const std::vector<PooledBox> same_image{{0, {0, 0, 2, 2}, 0.9},
                                          {0, {0, 0, 2, 2}, 0.8}};
  EXPECT_DOUBLE_EQ(PooledAveragePrecision(same_image, truths), 0.5);
  const std::vector<PooledBox> both{{0, {0, 0, 2, 2}, 0.9},
                                    {1, {0, 0, 2, 2}, 0.8}};
  EXPECT_DOUBLE_EQ(PooledAveragePrecision(both, truths), 1.0);
}

TEST(MeanIouTest, HalfCorrectAgainstAbsentClass) {
  LabelMap truth(2, 2, 0);
  LabelMap pred(2, 2, 0);
  pred.at(1, 0) = 1;
  pred.at(1, 1) = 1;
  const std::vector<LabelMap> p{pred}, t{truth};
  EXPECT_DOUBLE_EQ(MeanIouOfLabels(p, t, 2), 0.5);
  const std::vector<LabelMap> same{truth};
  EXPECT_DOUBLE_EQ(MeanIouOfLabels(same, t, 2), 1.0);
}

TEST(MeanIouTest, InvariantUnderClassRelabeling) {
  RandomStream rng(43);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    const std::size_t k = 2 + rng.below(5);
    LabelMap pred(3, 5), truth(3, 5);
    for (auto& v : pred.labels) v = static_cast<std::int32_t>(rng.below(k));
    for (auto& v : truth.labels) v = static_cast<std::int32_t>(rng.below(k));
    std::vector<std::int32_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = k; i > 1; --i)
      std::swap(perm[i - 1], perm[rng.below(i)]);
    LabelMap pp = pred, tp = truth;
    for (auto& v : pp.labels) v = perm[v];
    for (auto& v : tp.labels) v = perm[v];
    const std::vector<LabelMap> a{pred}, b{truth}, c{pp}, d{tp};
    const double base = MeanIouOfLabels(a, b, k);
    ASSERT_NEAR(MeanIouOfLabels(c, d, k), base, 1e-12);
    ASSERT_GE(base, 0.0);
    ASSERT_LE(base, 1.0);
  }
}

TEST(MdsqTest, WorkedExample) {
  EXPECT_DOUBLE_EQ(Mdsq(0.3, 0.4, 0.6, 0.8), 0.5);
  EXPECT_EQ(Mdsq(0.62, 0.71, 0.62, 0.71), 1.0);
  EXPECT_ERROR_KIND(Mdsq(0.3, 0.4, 0.0, 0.8), ErrorKind::kInvalidArgument);
}

SampleRecord PerfectSample(const std::string& id) {
  LabelMap labels(4, 4, 2);
  labels.at(1, 1) = 0;
  labels.at(1, 2) = 0;
  SampleRecord s;
  s.sample_id = id;
  s.height = 4;
  s.width = 4;
  s.seg = testing::ConfidentMap(labels, 3);
  s.detections.push_back(testing::MakeDetection({1, 1, 3, 2}, {0.9, 0.1}));
  s.truth = GroundTruth{{{{1, 1, 3, 2}, 0}}, labels};
  return s;
}

TEST(EvaluateTest, PerfectPredictionsScoreOne) {
  const std::vector<SampleRecord> samples{PerfectSample("a"),
                                          PerfectSample("b")};
  const ClassSpace space = testing::CarTruckRoad();
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(samples, space), 1.0);
  EXPECT_DOUBLE_EQ(MeanIou(samples, space), 1.0);
  const MetricReport r = Evaluate(samples, space, 1.0, 1.0);
  EXPECT_EQ(r.mdsq, 1.0);
}

TEST(EvaluateTest, MissingTruthThrows) {
  SampleRecord s = PerfectSample("a");
  s.truth.reset();
  const std::vector<SampleRecord> samples{s};
  EXPECT_ERROR_KIND(MeanIou(samples, testing::CarTruckRoad()),
                    ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace mtal
