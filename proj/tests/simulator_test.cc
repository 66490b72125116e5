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

#include "mtal/simulator.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "test_util.hpp"

namespace mtal {
namespace {

using testing::kPropertyCases;

TEST(WorldTest, DeterministicAndWellFormed) {
  const ClassSpace space = DefaultWorldClassSpace();
  const auto a = GenerateWorld(30, space, 9);
  const auto b = GenerateWorld(30, space, 9);
  const auto c = GenerateWorld(30, space, 10);
  ASSERT_EQ(a.size(), 30u);
  EXPECT_EQ(a[0].sample_id, "s00000");
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].labels, b[i].labels);
    EXPECT_EQ(a[i].difficulty, b[i].difficulty);
    differs = differs || a[i].labels != c[i].labels;

    const SyntheticScene& s = a[i];
    EXPECT_GE(s.objects.size(), 1u);
    EXPECT_GE(s.difficulty, 0.0);
    EXPECT_LE(s.difficulty, 1.0);
    for (std::size_t p = 0; p < s.height * s.width; ++p) {
      const std::int32_t obj = s.object_index[p];
      if (obj < 0) {
        EXPECT_FALSE(space.is_det_class(s.labels.labels[p]));
      } else {
        EXPECT_EQ(static_cast<std::size_t>(s.labels.labels[p]),
                  space.seg_index_of_det(s.objects[obj].det_class));
      }
    }
    // Boxes are tight around the rasterized pixels.
    for (std::size_t j = 0; j < s.objects.size(); ++j) {
      double x0 = 1e9, y0 = 1e9, x1 = -1, y1 = -1;
      for (std::size_t p = 0; p < s.height * s.width; ++p) {
        if (s.object_index[p] != static_cast<std::int32_t>(j)) continue;
        const double r = static_cast<double>(p / s.width);
        const double col = static_cast<double>(p % s.width);
        x0 = std::min(x0, col);
        y0 = std::min(y0, r);
        x1 = std::max(x1, col + 1);
        y1 = std::max(y1, r + 1);
      }
      EXPECT_EQ(s.objects[j].box, (Box{x0, y0, x1, y1}));
    }
    EXPECT_TRUE(
        ValidateSample(PredictWithNoise(s, space, 0.5, {}, 1), space).empty());
  }
  EXPECT_TRUE(differs);
}

TEST(PredictTest, NoNoiseReproducesGroundTruth) {
  const ClassSpace space = DefaultWorldClassSpace();
  const auto world = GenerateWorld(20, space, 3);
  for (const SyntheticScene& scene : world) {
    // Fully trained: effective noise is zero whatever the difficulty.
    const SampleRecord rec = PredictWithNoise(scene, space, 1.0, {}, 7);
    EXPECT_EQ(ArgmaxLabel(rec.seg), scene.labels);
    ASSERT_EQ(rec.detections.size(), scene.objects.size());
    for (std::size_t j = 0; j < scene.objects.size(); ++j) {
      EXPECT_EQ(rec.detections[j].box, scene.objects[j].box);
      EXPECT_EQ(rec.detections[j].det_class(), scene.objects[j].det_class);
    }
  }
}

TEST(PredictTest, ZeroRatesReproduceGroundTruthAtAnyNoise) {
  const ClassSpace space = DefaultWorldClassSpace();
  const CorruptionParams zero{0, 0, 0, 0, 0, 0, 0};
  for (const SyntheticScene& scene : GenerateWorld(10, space, 4)) {
    const SampleRecord rec = PredictWithNoise(scene, space, 0.0, zero, 1);
    EXPECT_EQ(ArgmaxLabel(rec.seg), scene.labels);
    EXPECT_EQ(rec.detections.size(), scene.objects.size());
  }
}

TEST(PredictTest, SeededPerSampleAndProgress) {
  const ClassSpace space = DefaultWorldClassSpace();
  const auto world = GenerateWorld(5, space, 5);
  for (const SyntheticScene& scene : world) {
    EXPECT_EQ(PredictWithNoise(scene, space, 0.3, {}, 1),
              PredictWithNoise(scene, space, 0.3, {}, 1));
  }
}

TEST(PredictTest, EffectiveNoise) {
  EXPECT_DOUBLE_EQ(EffectiveNoise(0.8, 0.5), 0.4);
  EXPECT_DOUBLE_EQ(EffectiveNoise(0.8, 1.0), 0.0);
}

TEST(CompetenceTest, Extremes) {
  const std::vector<double> corpus{0.1, 0.2, 0.3, 0.9};
  EXPECT_DOUBLE_EQ(Competence(0.5, corpus, corpus, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(Competence(0.5, {}, corpus, 0.1), 0.0);
  const std::vector<double> low{0.1, 0.2, 0.3};
  EXPECT_GT(Competence(0.15, low, corpus, 0.1),
            Competence(0.9, low, corpus, 0.1));
}

TEST(SelectTest, TopScores) {
  const std::vector<SampleScore> scores{{"a", 0.9}, {"b", 0.1}, {"c", 0.5}};
  EXPECT_EQ(SelectBatch(scores, 2, {}), (std::vector<std::string>{"a", "c"}));
  EXPECT_TRUE(SelectBatch(scores, 0, {}).empty());
  EXPECT_ERROR_KIND(SelectBatch(scores, 4, {}), ErrorKind::kInvalidArgument);
}

TEST(SelectTest, TiesGoToSmallerId) {
  const std::vector<SampleScore> scores{{"b", 0.5}, {"a", 0.5}, {"c", 0.5}};
  EXPECT_EQ(SelectBatch(scores, 2, {}), (std::vector<std::string>{"a", "b"}));
}

TEST(SelectTest, RandomIsSeededAndIgnoresScores) {
  std::vector<SampleScore> scores;
  for (int i = 0; i < 50; ++i)
    scores.push_back({"id" + std::to_string(i), i * 0.01});
  const Strategy s1{StrategyKind::kRandom, 1};
  const auto a = SelectBatch(scores, 10, s1);
  EXPECT_EQ(a, SelectBatch(scores, 10, s1));
  EXPECT_NE(a, SelectBatch(scores, 10, {StrategyKind::kRandom, 2}));
  EXPECT_NE(a, SelectBatch(scores, 10, {}));
  std::reverse(scores.begin(), scores.end());
  EXPECT_EQ(a, SelectBatch(scores, 10, s1));
}

TEST(SelectTest, PropertiesOnRandomPools) {
  RandomStream rng(51);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    std::vector<SampleScore> scores(1 + rng.below(30));
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = {"x" + std::to_string(i), static_cast<double>(rng.below(5))};
    }
    const std::size_t budget = rng.below(scores.size() + 1);
    const auto batch = SelectBatch(scores, budget, {});
    ASSERT_EQ(batch.size(), budget);
    ASSERT_EQ(std::set<std::string>(batch.begin(), batch.end()).size(), budget);
    // Nothing left behind scores higher than anything picked.
    double lowest_picked = std::numeric_limits<double>::infinity();
    for (const auto& s : scores) {
      if (std::find(batch.begin(), batch.end(), s.sample_id) != batch.end()) {
        lowest_picked = std::min(lowest_picked, s.score);
      }
    }
    for (const auto& s : scores) {
      if (std::find(batch.begin(), batch.end(), s.sample_id) == batch.end()) {
        ASSERT_LE(s.score, lowest_picked);
      }
    }
  }
}

TEST(PoolTest, AdvanceMovesIds) {
  PoolState pool({"a"}, {"c", "b", "d"});
  EXPECT_EQ(pool.unlabeled(), (std::vector<std::string>{"b", "c", "d"}));
  pool.Advance({"c"});
  EXPECT_EQ(pool.labeled(), (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(pool.cycle(), 1u);
  EXPECT_DOUBLE_EQ(pool.labeled_fraction(), 0.5);
  EXPECT_TRUE(pool.is_labeled("c"));
  EXPECT_ERROR_KIND(pool.Advance({"a"}), ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(pool.Advance({"b", "b"}), ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(PoolState({"a"}, {"a"}), ErrorKind::kInvalidArgument);
}

TEST(PoolTest, PartitionInvariant) {
  RandomStream rng(52);
  for (int trial = 0; trial < kPropertyCases; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
    const std::size_t init = rng.below(n + 1);
    PoolState pool({ids.begin(), ids.begin() + init},
                   {ids.begin() + init, ids.end()});
    while (!pool.unlabeled().empty()) {
      std::vector<std::string> pick = pool.unlabeled();
      pick.resize(1 + rng.below(pick.size()));
      const std::size_t before = pool.labeled().size();
      pool.Advance(pick);
      ASSERT_EQ(pool.labeled().size(), before + pick.size());
      ASSERT_EQ(pool.corpus_size(), n);
      ASSERT_TRUE(std::is_sorted(pool.labeled().begin(), pool.labeled().end()));
      for (const auto& id : pick) ASSERT_TRUE(pool.is_labeled(id));
    }
    ASSERT_DOUBLE_EQ(pool.labeled_fraction(), 1.0);
  }
}

TEST(ProtocolTest, DefaultScheduleEndsFullyLabeled) {
  const Protocol p;
  for (std::size_t corpus = 1; corpus <= 1000; ++corpus) {
    ASSERT_EQ(p.LabeledCountAt(p.cycles, corpus), corpus);
    for (std::size_t c = 1; c <= p.cycles; ++c) {
      ASSERT_GE(p.LabeledCountAt(c, corpus), p.LabeledCountAt(c - 1, corpus));
    }
  }
  EXPECT_EQ(p.LabeledCountAt(0, 160), 64u);
  EXPECT_EQ(p.LabeledCountAt(1, 160), 80u);
}

TEST(ProtocolTest, RejectsOverfullSchedule) {
  Protocol p;
  p.cycles = 7;
  EXPECT_ERROR_KIND(p.Validate(), ErrorKind::kInvalidArgument);
}

TEST(FractionReachingTest, Interpolates) {
  std::vector<CycleReport> r(3);
  r[0].labeled_fraction = 0.4;
  r[0].metrics.mdsq = 0.8;
  r[1].labeled_fraction = 0.5;
  r[1].metrics.mdsq = 0.9;
  r[2].labeled_fraction = 0.6;
  r[2].metrics.mdsq = 1.0;
  EXPECT_NEAR(FractionReaching(r, 0.95), 0.55, 1e-12);
  EXPECT_DOUBLE_EQ(FractionReaching(r, 0.5), 0.4);
  EXPECT_TRUE(std::isinf(FractionReaching(r, 1.5)));
}

TEST(SimulationTest, FullRunShapeAndDeterminism) {
  const ClassSpace space = DefaultWorldClassSpace();
  // 50 samples leave a training corpus of 40 after the validation split.
  const auto world = GenerateWorld(50, space, 6, {32, 32, 4});
  SimulationOptions opt;
  const auto a =
      RunSimulation(world, space, StrategyKind::kInconsistency, 6, opt);
  opt.threads = 3;
  const auto b =
      RunSimulation(world, space, StrategyKind::kInconsistency, 6, opt);
  ASSERT_EQ(a.reports.size(), 7u);
  EXPECT_EQ(a.pool.labeled(), b.pool.labeled());
  EXPECT_EQ(a.pool.history(), b.pool.history());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].metrics.mdsq, b.reports[i].metrics.mdsq);
    EXPECT_EQ(a.reports[i].cycle, i);
  }
  EXPECT_DOUBLE_EQ(a.reports.front().labeled_fraction, 0.4);
  EXPECT_EQ(a.reports.back().labeled_fraction, 1.0);
  EXPECT_EQ(a.reports.back().metrics.mdsq, 1.0);
  EXPECT_TRUE(a.pool.unlabeled().empty());
  ASSERT_EQ(a.candidates.size(), 6u);
  EXPECT_FALSE(a.candidates[0].empty());
}

TEST(SimulationTest, StrategiesShareTheStartingPool) {
  const ClassSpace space = DefaultWorldClassSpace();
  const auto world = GenerateWorld(40, space, 8, {32, 32, 4});
  const auto inc =
      RunSimulation(world, space, StrategyKind::kInconsistency, 8, {});
  const auto rnd = RunSimulation(world, space, StrategyKind::kRandom, 8, {});
  EXPECT_EQ(inc.reports[0].metrics.mdsq, rnd.reports[0].metrics.mdsq);
  EXPECT_NE(inc.pool.history()[0], rnd.pool.history()[0]);
}

}  // namespace
}  // namespace mtal
