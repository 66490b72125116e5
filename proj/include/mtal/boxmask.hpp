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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtal/domain.hpp"
#include "mtal/maskops.hpp"

namespace mtal {

/// Integer-aligned crop in the image frame: columns [col0, col1), rows
/// [row0, row1).
struct CropRegion {
  std::size_t col0 = 0;
  std::size_t row0 = 0;
  std::size_t col1 = 0;
  std::size_t row1 = 0;

  std::size_t rows() const { return row1 - row0; }
  std::size_t cols() const { return col1 - col0; }

  bool operator==(const CropRegion&) const = default;
};

enum class ResegmenterKind { kIdentity, kSynthetic };

/// Provider of the crop's segmentation. `identity` slices the full-image map;
/// `synthetic` perturbs the ground-truth labels of the crop with a seeded
/// noise level (needs ground truth on the sample).
struct ResegmenterSpec {
  ResegmenterKind kind = ResegmenterKind::kIdentity;
  double noise = 0.0;
  std::uint64_t seed = 0;

  static ResegmenterSpec Identity() { return {}; }
  static ResegmenterSpec Synthetic(double noise, std::uint64_t seed) {
    return {ResegmenterKind::kSynthetic, noise, seed};
  }
};

/// Parses "identity", "synthetic" or "synthetic:<noise>:<seed>".
ResegmenterSpec ParseResegmenter(const std::string& text);

struct ScoringConfig {
  double tau = 0.3;
  double epsilon = ClassSpace::kDefaultEpsilon;
  double margin_fraction = 0.1;
  ResegmenterSpec resegmenter;

  /// Throws Error(kInvalidArgument) on out-of-range fields.
  void Validate() const;
};

/// Extends each side by margin_fraction x side length, clamps to the image
/// and rounds outward to whole pixels.
CropRegion ExpandCropRegion(const Box& det, double margin_fraction,
                            std::size_t image_height, std::size_t image_width);

/// Segmentation of the crop, sized region.rows() x region.cols().
ProbabilityMap Resegment(const CropRegion& region, const SampleRecord& sample,
                         const ResegmenterSpec& spec);

/// Largest float f with f <= tau, so `p > f` matches `double(p) > tau` for
/// every float p.
float FloatThresholdBelow(double tau);

/// BoxMask of one detection in the image frame.
BinaryMask GenerateBoxMask(const DetectionBox& det, const SampleRecord& sample,
                           const ClassSpace& space,
                           const ScoringConfig& config);

struct CombinedMasks {
  BinaryMask combined;  // union of all BoxMasks
  BinaryMask inverse;   // region outside every BoxMask
};

/// Union of `masks` (all-zero when empty) and its complement.
CombinedMasks CombineBoxMasks(std::span<const BinaryMask> masks,
                              std::size_t image_height,
                              std::size_t image_width);

struct BoxMaskAccuracy {
  double mean_iou = 0.0;
  std::size_t boxes = 0;  // detections with a non-empty union
};

/// Mean IoU, inside each detection box, between its BoxMask and the
/// ground-truth pixels of the detected class. A pixel is inside a box when
/// its center is. Boxes where both masks are empty are skipped. Samples
/// without ground truth are ignored.
BoxMaskAccuracy MeasureBoxMaskAccuracy(std::span<const SampleRecord> samples,
                                       const ClassSpace& space,
                                       const ScoringConfig& config);

}  // namespace mtal
