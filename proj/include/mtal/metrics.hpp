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

#include <cstddef>
#include <span>
#include <vector>

#include "mtal/domain.hpp"

namespace mtal {

double BoxIou(const Box& a, const Box& b);

struct ScoredBox {
  Box box;
  double confidence = 0.0;
};

/// Single-image average precision.
///
/// Predictions are visited in descending confidence (ties: ascending index);
/// each one claims the unmatched truth with the highest IoU at or above
/// `iou_threshold`. AP is the area under the all-point interpolated
/// precision/recall curve. No truths: 1 when there are no predictions
/// either, else 0.
double AveragePrecision(std::span<const ScoredBox> preds,
                        std::span<const Box> truths,
                        double iou_threshold = 0.5);

/// A prediction or truth tagged with the image it belongs to, for pooled AP.
struct PooledBox {
  std::size_t image = 0;
  Box box;
  double confidence = 0.0;
};

/// AP with predictions from many images ranked jointly; matches only happen
/// inside the same image.
double PooledAveragePrecision(std::span<const PooledBox> preds,
                              std::span<const PooledBox> truths,
                              double iou_threshold = 0.5);

/// Mean over detection classes with at least one ground-truth box of the
/// pooled per-class AP. Throws when a sample has no ground truth.
double MeanAveragePrecision(std::span<const SampleRecord> samples,
                            const ClassSpace& space,
                            double iou_threshold = 0.5);

/// Mean IoU of argmax label maps from pooled confusion counts, over classes
/// that occur in the ground truth. Throws when a sample has no ground truth.
double MeanIou(std::span<const SampleRecord> samples, const ClassSpace& space);

/// Pooled mean IoU of raw label maps (predictions[i] against truths[i]).
double MeanIouOfLabels(std::span<const LabelMap> predictions,
                       std::span<const LabelMap> truths,
                       std::size_t num_classes);

/// (map/map_fully + miou/miou_fully) / 2. Throws on a non-positive
/// normalizer.
double Mdsq(double map, double miou, double map_fully, double miou_fully);

struct MetricReport {
  double map = 0.0;
  double miou = 0.0;
  double mdsq = 0.0;
  double map_fully = 1.0;
  double miou_fully = 1.0;
};

MetricReport Evaluate(std::span<const SampleRecord> samples,
                      const ClassSpace& space, double map_fully,
                      double miou_fully, double iou_threshold = 0.5);

}  // namespace mtal
