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

#include "mtal/inconsistency.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mtal/error.hpp"
#include "mtal/kernels/kernels.hpp"
#include "mtal/parallel.hpp"

namespace mtal {
namespace {

void RequireShape(const BinaryMask& m, std::size_t height, std::size_t width) {
  if (m.height() != height || m.width() != width) {
    throw Error(ErrorKind::kDimensionMismatch,
                "mask and map dimensions differ");
  }
}

BinaryMask LabelEquals(const LabelMap& labels, std::int32_t value) {
  BinaryMask out(labels.height, labels.width);
  kernels::Active().label_eq_bits(labels.labels.data(), labels.labels.size(),
                                  value, out.mutable_words().data());
  return out;
}

// Calls fn(flat_index) for every set bit, in ascending order.
template <typename Fn>
void ForEachSetBit(const BinaryMask& m, Fn&& fn) {
  const auto words = m.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t bits = words[w];
    while (bits != 0) {
      fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
}

}  // namespace

double LocAgreement(const BinaryMask& bm, const LabelMap& labels,
                    std::size_t seg_class) {
  RequireShape(bm, labels.height, labels.width);
  const std::uint64_t size = CountOnes(bm);
  if (size == 0) return 0.0;
  const std::uint64_t hits = CountOverlap(
      bm, LabelEquals(labels, static_cast<std::int32_t>(seg_class)));
  return static_cast<double>(hits) / static_cast<double>(size);
}

double LocInconsistency(const BinaryMask& bm, const LabelMap& labels,
                        std::size_t seg_class) {
  RequireShape(bm, labels.height, labels.width);
  if (CountOnes(bm) == 0) return 1.0;
  return 1.0 - LocAgreement(bm, labels, seg_class);
}

double FlooredKl(std::span<const double> p, std::span<const double> q,
                 double epsilon) {
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    kl += p[k] * (std::log(std::max(p[k], epsilon)) -
                  std::log(std::max(q[k], epsilon)));
  }
  return kl;
}

double ClsInconsistency(const BinaryMask& bm, const ProbabilityMap& seg,
                        const ClassDistribution& tilde_p, double epsilon) {
  RequireShape(bm, seg.height(), seg.width());
  if (tilde_p.size() != seg.channels()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "class distribution length differs from seg channel count");
  }
  const std::uint64_t size = CountOnes(bm);
  if (size == 0) return 0.0;

  const std::size_t channels = seg.channels();
  const std::size_t n = seg.pixels();
  std::vector<double> log_q(channels);
  for (std::size_t k = 0; k < channels; ++k) {
    log_q[k] = std::log(std::max(tilde_p.probs[k], epsilon));
  }
  const float* data = seg.data().data();
  double total = 0.0;
  ForEachSetBit(bm, [&](std::size_t i) {
    double forward = 0.0;   // KL(p_seg || tilde_p)
    double backward = 0.0;  // KL(tilde_p || p_seg)
    for (std::size_t k = 0; k < channels; ++k) {
      const double p = data[k * n + i];
      const double log_p = std::log(std::max(p, epsilon));
      forward += p * (log_p - log_q[k]);
      backward += tilde_p.probs[k] * (log_q[k] - log_p);
    }
    total += forward + backward;
  });
  return total / (2.0 * static_cast<double>(size));
}

double SegInconsistency(const BinaryMask& bm_prime, const LabelMap& labels,
                        const ClassSpace& space) {
  RequireShape(bm_prime, labels.height, labels.width);
  const std::uint64_t size = CountOnes(bm_prime);
  if (size == 0) return 0.0;
  for (std::int32_t v : labels.labels) {
    if (v < 0 || static_cast<std::size_t>(v) >= space.num_seg()) {
      throw Error(ErrorKind::kInvalidArgument, "label outside C_seg");
    }
  }
  BinaryMask det_pixels(labels.height, labels.width);
  kernels::Active().label_in_set_bits(
      labels.labels.data(), labels.labels.size(), space.det_membership().data(),
      det_pixels.mutable_words().data());
  return static_cast<double>(CountOverlap(bm_prime, det_pixels)) /
         static_cast<double>(size);
}

ScoreBreakdown ScoreSample(const SampleRecord& sample, const ClassSpace& space,
                           const ScoringConfig& config) {
  config.Validate();
  if (sample.seg.channels() != space.num_seg()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "sample " + sample.sample_id +
                    " has a seg map with the wrong channel count");
  }
  const LabelMap labels = ArgmaxLabel(sample.seg);

  ScoreBreakdown out;
  BinaryMask combined(sample.height, sample.width);
  for (std::size_t i = 0; i < sample.detections.size(); ++i) {
    const DetectionBox& det = sample.detections[i];
    const BinaryMask bm = GenerateBoxMask(det, sample, space, config);
    const std::size_t seg_class = space.seg_index_of_det(det.det_class());
    const ClassDistribution tilde_p =
        TransformClassDistribution(det.dist, space, config.epsilon);

    BoxScore box;
    box.detection_index = i;
    box.s_loc = LocInconsistency(bm, labels, seg_class);
    box.s_cls = ClsInconsistency(bm, sample.seg, tilde_p, config.epsilon);
    box.s_box = box.s_loc + box.s_cls;
    out.per_box.push_back(box);
    out.max_s_box = (i == 0) ? box.s_box : std::max(out.max_s_box, box.s_box);

    combined = PixelwiseMax(combined, bm);
  }
  out.s_seg = SegInconsistency(InvertMask(combined), labels, space);
  out.combined = out.s_seg + out.max_s_box;
  return out;
}

std::vector<ScoreBreakdown> ScoreSamples(std::span<const SampleRecord> samples,
                                         const ClassSpace& space,
                                         const ScoringConfig& config,
                                         std::size_t threads) {
  std::vector<ScoreBreakdown> out(samples.size());
  ParallelFor(samples.size(), threads, [&](std::size_t i) {
    out[i] = ScoreSample(samples[i], space, config);
  });
  return out;
}

}  // namespace mtal
