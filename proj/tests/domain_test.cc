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

#include "mtal/domain.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"

namespace mtal {
namespace {

using testing::CarTruckRoad;
using testing::kPropertyCases;

TEST(ClassSpaceTest, RejectsBrokenSubsets) {
  EXPECT_ERROR_KIND(ClassSpace({"car"}, {0}), ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(ClassSpace({"car", "car"}, {0}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(ClassSpace({"car", "road"}, {}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(ClassSpace({"car", "road"}, {2}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(ClassSpace({"car", "road", "sky"}, {1, 0}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(ClassSpace({"car", "road"}, {0}, 0.0),
                    ErrorKind::kInvalidArgument);
}

TEST(ClassSpaceTest, Lookups) {
  const ClassSpace space = CarTruckRoad();
  EXPECT_EQ(space.num_seg(), 3u);
  EXPECT_EQ(space.num_det(), 2u);
  EXPECT_EQ(space.seg_index_of_det(1), 1u);
  EXPECT_TRUE(space.is_det_class(0));
  EXPECT_FALSE(space.is_det_class(2));
  EXPECT_EQ(space.find_seg("road"), 2u);
  EXPECT_FALSE(space.find_seg("bus").has_value());
  EXPECT_EQ(space.det_membership(), (std::vector<std::int32_t>{1, 1, 0}));
}

TEST(TransformTest, PadsBackgroundWithEpsilon) {
  const ClassSpace space = CarTruckRoad();
  const auto out = TransformClassDistribution({{0.7, 0.3}}, space);
  const double sum = 1.0 + 1e-6;
  ASSERT_EQ(out.size(), 3u);
  EXPECT_NEAR(out.probs[0], 0.7 / sum, 1e-15);
  EXPECT_NEAR(out.probs[1], 0.3 / sum, 1e-15);
  EXPECT_NEAR(out.probs[2], 1e-6 / sum, 1e-18);
}

TEST(TransformTest, RejectsWrongLength) {
  EXPECT_ERROR_KIND(TransformClassDistribution({{1.0}}, CarTruckRoad()),
                    ErrorKind::kDimensionMismatch);
}

TEST(TransformTest, PropertiesOnRandomSpaces) {
  RandomStream rng(11);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    const std::size_t n_seg = 2 + rng.below(12);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n_seg; ++k)
      names.push_back("c" + std::to_string(k));
    std::vector<std::size_t> det;
    for (std::size_t k = 0; k < n_seg; ++k) {
      if (rng.bernoulli(0.5)) det.push_back(k);
    }
    if (det.empty()) det.push_back(rng.below(n_seg));
    const double eps = std::pow(10.0, -1.0 - 8.0 * rng.uniform());
    const ClassSpace space(names, det, eps);
    const ClassDistribution p{testing::RandomSimplex(rng, det.size())};
    const auto out = TransformClassDistribution(p, space);

    ASSERT_EQ(out.size(), n_seg);
    EXPECT_NEAR(std::accumulate(out.probs.begin(), out.probs.end(), 0.0), 1.0,
                1e-12);
    const double norm = 1.0 + eps * static_cast<double>(n_seg - det.size());
    for (std::size_t d = 0; d < det.size(); ++d) {
      EXPECT_NEAR(out.probs[det[d]], p.probs[d] / norm, 1e-14);
    }
    for (std::size_t k = 0; k < n_seg; ++k) {
      if (!space.is_det_class(k)) EXPECT_NEAR(out.probs[k], eps / norm, 1e-15);
    }
    EXPECT_EQ(space.seg_index_of_det(p.argmax()), out.argmax());
  }
}

TEST(ArgmaxTest, TiesResolveToLowestIndex) {
  EXPECT_EQ((ClassDistribution{{0.4, 0.4, 0.2}}).argmax(), 0u);
  EXPECT_EQ((ClassDistribution{{0.2, 0.4, 0.4}}).argmax(), 1u);

  ProbabilityMap seg(1, 2, 3, {0.2f, 0.5f, 0.4f, 0.25f, 0.4f, 0.25f});
  const LabelMap labels = ArgmaxLabel(seg);
  EXPECT_EQ(labels.at(0, 0), 1);
  EXPECT_EQ(labels.at(0, 1), 0);
}

TEST(ArgmaxTest, MatchesPixelLoop) {
  RandomStream rng(5);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    const std::size_t h = 1 + rng.below(9);
    const std::size_t w = 1 + rng.below(40);
    const std::size_t c = 2 + rng.below(6);
    ProbabilityMap seg = testing::RandomProbabilityMap(rng, h, w, c);
    // Plant exact ties.
    if (rng.bernoulli(0.5)) seg.at(c - 1, 0, 0) = seg.at(0, 0, 0);
    const LabelMap labels = ArgmaxLabel(seg);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t col = 0; col < w; ++col) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k) {
          if (seg.at(k, r, col) > seg.at(best, r, col)) best = k;
        }
        ASSERT_EQ(labels.at(r, col), static_cast<std::int32_t>(best));
      }
    }
  }
}

SampleRecord ValidSample() {
  SampleRecord rec;
  rec.sample_id = "a";
  rec.height = 10;
  rec.width = 10;
  rec.seg = testing::ConfidentMap(LabelMap(10, 10, 2), 3);
  rec.detections.push_back(testing::MakeDetection({1, 1, 5, 5}, {0.6, 0.4}));
  return rec;
}

TEST(ValidateSampleTest, AcceptsValidRecord) {
  EXPECT_TRUE(ValidateSample(ValidSample(), CarTruckRoad()).empty());
}

TEST(ValidateSampleTest, SegDimensionMismatchIsOneViolation) {
  SampleRecord rec = ValidSample();
  rec.height = 12;
  const auto v = ValidateSample(rec, CarTruckRoad());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "seg");
}

TEST(ValidateSampleTest, BoxPastRightEdgeIsOneViolation) {
  SampleRecord rec = ValidSample();
  rec.detections[0].box.x_max = 11;
  const auto v = ValidateSample(rec, CarTruckRoad());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "detections[0].box");
}

TEST(ValidateSampleTest, ReportsEveryViolation) {
  SampleRecord rec = ValidSample();
  rec.detections[0].confidence = 1.5;
  rec.detections[0].dist.probs = {0.5, 0.2};
  rec.seg.at(0, 3, 3) = 2.0f;
  const auto v = ValidateSample(rec, CarTruckRoad());
  EXPECT_EQ(v.size(), 4u);  // range + sum on the pixel, confidence, dist
}

}  // namespace
}  // namespace mtal
