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

// Detection/segmentation inconsistency scores. All three terms are oriented
// "higher = more inconsistent" so that they can be summed and the
// highest-scored samples selected for labeling.

#include <cstddef>
#include <span>
#include <vector>

#include "mtal/boxmask.hpp"
#include "mtal/domain.hpp"
#include "mtal/maskops.hpp"

namespace mtal {

struct BoxScore {
  std::size_t detection_index = 0;
  double s_loc = 0.0;
  double s_cls = 0.0;
  double s_box = 0.0;  // s_loc + s_cls

  bool operator==(const BoxScore&) const = default;
};

struct ScoreBreakdown {
  std::vector<BoxScore> per_box;
  double s_seg = 0.0;
  double max_s_box = 0.0;  // 0 when there are no detections
  double combined = 0.0;   // s_seg + max_s_box

  bool operator==(const ScoreBreakdown&) const = default;
};

/// Fraction of BoxMask pixels whose segmentation argmax equals `seg_class`.
/// Returns 0 on an empty mask.
double LocAgreement(const BinaryMask& bm, const LabelMap& labels,
                    std::size_t seg_class);

/// 1 - LocAgreement; an empty BoxMask scores 1.
double LocInconsistency(const BinaryMask& bm, const LabelMap& labels,
                        std::size_t seg_class);

/// KL(p || q) with natural log, each probability floored at `epsilon` inside
/// the logarithm.
double FlooredKl(std::span<const double> p, std::span<const double> q,
                 double epsilon);

/// Mean symmetric KL between each BoxMask pixel's segmentation distribution
/// and `tilde_p`, halved. Returns 0 on an empty mask.
double ClsInconsistency(const BinaryMask& bm, const ProbabilityMap& seg,
                        const ClassDistribution& tilde_p, double epsilon);

/// Fraction of pixels in `bm_prime` whose argmax is a detection class.
/// Returns 0 when `bm_prime` is empty.
double SegInconsistency(const BinaryMask& bm_prime, const LabelMap& labels,
                        const ClassSpace& space);

ScoreBreakdown ScoreSample(const SampleRecord& sample, const ClassSpace& space,
                           const ScoringConfig& config);

/// Scores every sample; result[i] belongs to samples[i] regardless of
/// `threads`.
std::vector<ScoreBreakdown> ScoreSamples(std::span<const SampleRecord> samples,
                                         const ClassSpace& space,
                                         const ScoringConfig& config,
                                         std::size_t threads = 1);

}  // namespace mtal
