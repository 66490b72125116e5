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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mtal/error.hpp"
#include "mtal/kernels/kernels.hpp"

namespace mtal {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid argument";
    case ErrorKind::kDimensionMismatch:
      return "dimension mismatch";
    case ErrorKind::kMissingFile:
      return "missing file";
    case ErrorKind::kSyntax:
      return "malformed syntax";
    case ErrorKind::kVersionMismatch:
      return "unsupported version";
    case ErrorKind::kInvariant:
      return "invariant violation";
    case ErrorKind::kWrongMagic:
      return "wrong magic";
    case ErrorKind::kTruncated:
      return "truncated payload";
    case ErrorKind::kUnsupportedElement:
      return "unsupported element code";
    case ErrorKind::kIo:
      return "i/o error";
  }
  return "error";
}

ClassSpace::ClassSpace(std::vector<std::string> seg_classes,
                       std::vector<std::size_t> det_class_indices,
                       double epsilon)
    : seg_classes_(std::move(seg_classes)),
      det_class_indices_(std::move(det_class_indices)),
      epsilon_(epsilon) {
  if (seg_classes_.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "class space needs at least two segmentation classes");
  }
  std::set<std::string> names(seg_classes_.begin(), seg_classes_.end());
  if (names.size() != seg_classes_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "segmentation class names must be unique");
  }
  if (det_class_indices_.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "detection class list must not be empty");
  }
  for (std::size_t i = 0; i < det_class_indices_.size(); ++i) {
    if (det_class_indices_[i] >= seg_classes_.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "detection class index out of range");
    }
    if (i > 0 && det_class_indices_[i] <= det_class_indices_[i - 1]) {
      throw Error(ErrorKind::kInvalidArgument,
                  "detection class indices must be strictly increasing");
    }
  }
  if (!(epsilon_ > 0.0 && epsilon_ < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon must lie in (0,1)");
  }
  is_det_.assign(seg_classes_.size(), 0);
  for (std::size_t idx : det_class_indices_) is_det_[idx] = 1;
}

std::optional<std::size_t> ClassSpace::find_seg(const std::string& name) const {
  auto it = std::find(seg_classes_.begin(), seg_classes_.end(), name);
  if (it == seg_classes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - seg_classes_.begin());
}

std::size_t ClassDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

bool ClassDistribution::valid(double tolerance) const {
  if (probs.empty()) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

ProbabilityMap::ProbabilityMap(std::size_t height, std::size_t width,
                               std::size_t channels)
    : height_(height),
      width_(width),
      channels_(channels),
      data_(height * width * channels, 0.0f) {}

ProbabilityMap::ProbabilityMap(std::size_t height, std::size_t width,
                               std::size_t channels, std::vector<float> data)
    : height_(height),
      width_(width),
      channels_(channels),
      data_(std::move(data)) {
  if (data_.size() != height_ * width_ * channels_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "probability map payload does not match H*W*C");
  }
}

std::vector<double> ProbabilityMap::pixel(std::size_t row,
                                          std::size_t col) const {
  std::vector<double> out(channels_);
  for (std::size_t k = 0; k < channels_; ++k) out[k] = at(k, row, col);
  return out;
}

ProbabilityMap ProbabilityMap::slice(std::size_t row0, std::size_t col0,
                                     std::size_t rows, std::size_t cols) const {
  if (row0 + rows > height_ || col0 + cols > width_) {
    throw Error(ErrorKind::kInvalidArgument,
                "slice extends outside the probability map");
  }
  ProbabilityMap out(rows, cols, channels_);
  for (std::size_t k = 0; k < channels_; ++k) {
    const float* src = data_.data() + k * pixels();
    float* dst = out.data_.data() + k * rows * cols;
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(src + (row0 + r) * width_ + col0, cols, dst + r * cols);
    }
  }
  return out;
}

std::vector<Violation> ValidateSample(const SampleRecord& record,
                                      const ClassSpace& space) {
  std::vector<Violation> out;
  auto add = [&out](std::string field, std::string message) {
    out.push_back({std::move(field), std::move(message)});
  };

  if (record.sample_id.empty()) add("sample_id", "empty sample id");
  if (record.height == 0 || record.width == 0) {
    add("dims", "image dimensions must be positive");
  }

  const ProbabilityMap& seg = record.seg;
  if (seg.height() != record.height || seg.width() != record.width) {
    std::ostringstream msg;
    msg << "seg map is " << seg.height() << "x" << seg.width()
        << " but sample is " << record.height << "x" << record.width;
    add("seg", msg.str());
  }
  if (seg.channels() != space.num_seg()) {
    add("seg", "seg channel count differs from |C_seg|");
  } else {
    const std::size_t n = seg.pixels();
    std::size_t bad_range = 0;
    std::size_t bad_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < seg.channels(); ++k) {
        const float v = seg.data()[k * n + i];
        if (!(v >= 0.0f && v <= 1.0f)) ++bad_range;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-4) ++bad_sum;
    }
    if (bad_range > 0) {
      add("seg", std::to_string(bad_range) + " probabilities outside [0,1]");
    }
    if (bad_sum > 0) {
      add("seg", std::to_string(bad_sum) + " pixels do not sum to 1");
    }
  }

  const double w = static_cast<double>(record.width);
  const double h = static_cast<double>(record.height);
  for (std::size_t i = 0; i < record.detections.size(); ++i) {
    const DetectionBox& det = record.detections[i];
    const std::string field = "detections[" + std::to_string(i) + "]";
    if (!det.box.valid()) add(field + ".box", "degenerate or negative box");
    if (det.box.x_max > w || det.box.y_max > h) {
      add(field + ".box", "box extends outside the image");
    }
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
      add(field + ".confidence", "confidence outside [0,1]");
    }
    if (det.dist.size() != space.num_det()) {
      add(field + ".dist", "distribution length differs from |C_det|");
    } else if (!det.dist.valid()) {
      add(field + ".dist", "not a probability distribution");
    }
  }

  if (record.truth) {
    const GroundTruth& truth = *record.truth;
    if (truth.label_map.height != record.height ||
        truth.label_map.width != record.width ||
        truth.label_map.labels.size() != record.height * record.width) {
      add("truth.label_map", "label map dimensions differ from the sample");
    }
    const auto bad = std::count_if(
        truth.label_map.labels.begin(), truth.label_map.labels.end(),
        [&](std::int32_t v) {
          return v < 0 || static_cast<std::size_t>(v) >= space.num_seg();
        });
    if (bad > 0) {
      add("truth.label_map", std::to_string(bad) + " labels outside C_seg");
    }
    for (std::size_t i = 0; i < truth.boxes.size(); ++i) {
      const std::string field = "truth.boxes[" + std::to_string(i) + "]";
      const GroundTruthBox& gt = truth.boxes[i];
      if (!gt.box.valid() || gt.box.x_max > w || gt.box.y_max > h) {
        add(field, "invalid or out-of-bounds box");
      }
      if (gt.det_class >= space.num_det()) add(field, "class outside C_det");
    }
  }
  return out;
}

ClassDistribution TransformClassDistribution(const ClassDistribution& dist,
                                             const ClassSpace& space) {
  return TransformClassDistribution(dist, space, space.epsilon());
}

ClassDistribution TransformClassDistribution(const ClassDistribution& dist,
                                             const ClassSpace& space,
                                             double epsilon) {
  if (dist.size() != space.num_det()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "detection distribution has " + std::to_string(dist.size()) +
                    " entries, expected " + std::to_string(space.num_det()));
  }
  ClassDistribution out;
  out.probs.assign(space.num_seg(), epsilon);
  for (std::size_t d = 0; d < dist.size(); ++d) {
    out.probs[space.seg_index_of_det(d)] = dist.probs[d];
  }
  double sum = 0.0;
  for (double p : out.probs) sum += p;
  for (double& p : out.probs) p /= sum;
  return out;
}

LabelMap ArgmaxLabel(const ProbabilityMap& seg) {
  LabelMap out(seg.height(), seg.width());
  if (seg.pixels() == 0 || seg.channels() == 0) return out;
  kernels::Active().argmax_planes(seg.data().data(), seg.channels(),
                                  seg.pixels(), out.labels.data());
  return out;
}

}  // namespace mtal
