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

#pragma once

// Desk-scale stand-in for the train/predict loop of pool-based active
// learning: synthetic scenes with exact ground truth, a predictor whose
// errors scale with per-sample difficulty and shrink as more similar samples
// get labeled, pool bookkeeping, and the cycle driver.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtal/boxmask.hpp"
#include "mtal/domain.hpp"
#include "mtal/metrics.hpp"

namespace mtal {

/// Class space used by generated worlds: four object classes followed by
/// five background classes.
ClassSpace DefaultWorldClassSpace();

enum class ShapeKind { kRectangle, kEllipse };

struct SceneObject {
  ShapeKind shape = ShapeKind::kRectangle;
  std::size_t det_class = 0;  // index into C_det
  Box box;                    // tight box of the rasterized pixels
};

struct SyntheticScene {
  std::string sample_id;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<SceneObject> objects;
  LabelMap background;                     // labels before objects were painted
  LabelMap labels;                         // full ground-truth label map
  std::vector<std::int32_t> object_index;  // per pixel: object id or -1
  double difficulty = 0.0;

  GroundTruth truth() const;
};

struct WorldOptions {
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t max_objects = 5;
};

std::vector<SyntheticScene> GenerateWorld(std::size_t n_samples,
                                          const ClassSpace& space,
                                          std::uint64_t seed,
                                          const WorldOptions& options = {});

/// Per-channel corruption rates at effective noise 1. Every channel is
/// multiplied by the effective noise before use.
struct CorruptionParams {
  double box_jitter = 0.25;          // std-dev of edge shift, fraction of side
  double class_confusion = 0.2;      // probability of a wrong detected class
  double mask_erosion_dilation = 3;  // max boundary shift in pixels
  double drop_rate = 0.15;           // missed detections
  double spurious_rate = 0.2;        // false-positive boxes and seg blobs
  double label_flip = 0.25;          // per-pixel seg label noise
  double softness = 0.6;             // flattening of predicted distributions

  void Validate() const;
};

/// difficulty x (1 - labeled_fraction), clamped to [0,1].
double EffectiveNoise(double difficulty, double labeled_fraction);

/// Prediction for one scene at the given training progress. The returned
/// record carries the scene's ground truth. Deterministic per
/// (sample_id, labeled_fraction, seed).
SampleRecord PredictWithNoise(const SyntheticScene& scene,
                              const ClassSpace& space, double labeled_fraction,
                              const CorruptionParams& params,
                              std::uint64_t seed);

/// Training progress seen by a sample of difficulty `difficulty`: the
/// kernel-weighted share of the training corpus near that difficulty that is
/// labeled. Equals the plain labeled fraction when labels are spread evenly
/// over difficulty, and 1 when everything is labeled.
double Competence(double difficulty, std::span<const double> labeled,
                  std::span<const double> corpus, double bandwidth);

enum class StrategyKind { kInconsistency, kRandom };

struct Strategy {
  StrategyKind kind = StrategyKind::kInconsistency;
  std::uint64_t seed = 0;
};

StrategyKind ParseStrategy(const std::string& text);
std::string_view StrategyName(StrategyKind kind);

struct SampleScore {
  std::string sample_id;
  double score = 0.0;
};

/// Picks `budget` ids. Inconsistency takes the highest scores; random draws a
/// seeded uniform score per id and takes the highest of those. Output is in
/// descending (used) score, ties by ascending id. Throws when budget exceeds
/// the pool.
std::vector<std::string> SelectBatch(std::span<const SampleScore> scores,
                                     std::size_t budget,
                                     const Strategy& strategy);

/// Labeled / unlabeled partition of the training corpus. Both id lists are
/// kept sorted.
class PoolState {
 public:
  PoolState() = default;
  PoolState(std::vector<std::string> labeled,
            std::vector<std::string> unlabeled);

  const std::vector<std::string>& labeled() const { return labeled_; }
  const std::vector<std::string>& unlabeled() const { return unlabeled_; }
  std::size_t cycle() const { return cycle_; }
  const std::vector<std::vector<std::string>>& history() const {
    return history_;
  }
  std::size_t corpus_size() const {
    return labeled_.size() + unlabeled_.size();
  }
  double labeled_fraction() const;
  bool is_labeled(const std::string& id) const;

  /// Moves `selected` from unlabeled to labeled, records it, advances the
  /// cycle. Throws if any id is not currently unlabeled.
  void Advance(const std::vector<std::string>& selected);

 private:
  std::vector<std::string> labeled_;
  std::vector<std::string> unlabeled_;
  std::size_t cycle_ = 0;
  std::vector<std::vector<std::string>> history_;
};

struct Protocol {
  double init_fraction = 0.4;
  double budget_fraction = 0.1;
  std::size_t cycles = 6;
  double validation_fraction = 0.2;
  double competence_bandwidth = 0.1;

  /// Throws on infeasible fractions.
  void Validate() const;
  /// Labeled-pool size after `cycle` cycles on a corpus of `corpus` samples.
  std::size_t LabeledCountAt(std::size_t cycle, std::size_t corpus) const;
};

struct CycleReport {
  std::size_t cycle = 0;
  double labeled_fraction = 0.0;
  StrategyKind strategy = StrategyKind::kInconsistency;
  MetricReport metrics;
};

/// Per-candidate record of one selection round.
struct CandidateTrace {
  std::string sample_id;
  double effective_noise = 0.0;
  double combined = 0.0;
};

struct SimulationResult {
  std::vector<CycleReport> reports;  // cycle 0 = initial pool
  PoolState pool;
  std::vector<std::vector<CandidateTrace>> candidates;  // one per cycle
};

struct SimulationOptions {
  ScoringConfig scoring;
  Protocol protocol;
  CorruptionParams corruption;
  std::size_t threads = 1;
};

SimulationResult RunSimulation(std::span<const SyntheticScene> world,
                               const ClassSpace& space, StrategyKind strategy,
                               std::uint64_t seed,
                               const SimulationOptions& options);

/// Labeled fraction at which `reports` first reach `target` mDSQ, linearly
/// interpolated between consecutive cycles. +infinity if never reached.
double FractionReaching(std::span<const CycleReport> reports, double target);

}  // namespace mtal
