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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtal {

/// Segmentation class list and the detection subset that indexes into it.
///
/// Detection-class index `d` (position inside the detector's output) maps to
/// segmentation index `det_class_indices()[d]`.
class ClassSpace {
 public:
  static constexpr double kDefaultEpsilon = 1e-6;

  ClassSpace() = default;
  /// Throws Error(kInvalidArgument) when the subset relation or naming
  /// invariants do not hold.
  ClassSpace(std::vector<std::string> seg_classes,
             std::vector<std::size_t> det_class_indices,
             double epsilon = kDefaultEpsilon);

  const std::vector<std::string>& seg_classes() const { return seg_classes_; }
  const std::vector<std::size_t>& det_class_indices() const {
    return det_class_indices_;
  }
  double epsilon() const { return epsilon_; }

  std::size_t num_seg() const { return seg_classes_.size(); }
  std::size_t num_det() const { return det_class_indices_.size(); }

  std::size_t seg_index_of_det(std::size_t det_index) const {
    return det_class_indices_.at(det_index);
  }
  bool is_det_class(std::size_t seg_index) const {
    return seg_index < is_det_.size() && is_det_[seg_index] != 0;
  }
  /// One entry per segmentation class, 1 for detection classes.
  const std::vector<std::int32_t>& det_membership() const { return is_det_; }

  /// Index of `name` in the segmentation list, or nullopt.
  std::optional<std::size_t> find_seg(const std::string& name) const;

  bool operator==(const ClassSpace&) const = default;

 private:
  std::vector<std::string> seg_classes_;
  std::vector<std::size_t> det_class_indices_;
  double epsilon_ = kDefaultEpsilon;
  std::vector<std::int32_t> is_det_;
};

/// Axis-aligned box in continuous image coordinates, origin top-left.
/// Pixel (row r, col c) covers [c, c+1) x [r, r+1).
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const {
    return x_min < x_max && y_min < y_max && x_min >= 0.0 && y_min >= 0.0;
  }

  bool operator==(const Box&) const = default;
};

struct ClassDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  /// Index of the largest entry; ties resolve to the lowest index.
  std::size_t argmax() const;
  /// Entries in [0,1] and summing to 1 within `tolerance`.
  bool valid(double tolerance = 1e-4) const;

  bool operator==(const ClassDistribution&) const = default;
};

struct DetectionBox {
  Box box;
  double confidence = 0.0;
  ClassDistribution dist;  // over C_det

  std::size_t det_class() const { return dist.argmax(); }

  bool operator==(const DetectionBox&) const = default;
};

/// Per-pixel class probabilities in planar (channel-major) float32 layout:
/// element (k, r, c) lives at data[k*H*W + r*W + c].
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(std::size_t height, std::size_t width, std::size_t channels);
  ProbabilityMap(std::size_t height, std::size_t width, std::size_t channels,
                 std::vector<float> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t pixels() const { return height_ * width_; }

  float at(std::size_t channel, std::size_t row, std::size_t col) const {
    return data_[channel * pixels() + row * width_ + col];
  }
  float& at(std::size_t channel, std::size_t row, std::size_t col) {
    return data_[channel * pixels() + row * width_ + col];
  }
  std::span<const float> plane(std::size_t channel) const {
    return {data_.data() + channel * pixels(), pixels()};
  }
  std::span<float> plane(std::size_t channel) {
    return {data_.data() + channel * pixels(), pixels()};
  }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  /// Probability vector of one pixel, widened to double.
  std::vector<double> pixel(std::size_t row, std::size_t col) const;

  /// Copy of the rectangle [row0, row0+rows) x [col0, col0+cols).
  ProbabilityMap slice(std::size_t row0, std::size_t col0, std::size_t rows,
                       std::size_t cols) const;

  bool operator==(const ProbabilityMap&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

/// Row-major H x W grid of segmentation class indices.
struct LabelMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> labels;

  LabelMap() = default;
  LabelMap(std::size_t h, std::size_t w, std::int32_t fill = 0)
      : height(h), width(w), labels(h * w, fill) {}

  std::int32_t at(std::size_t row, std::size_t col) const {
    return labels[row * width + col];
  }
  std::int32_t& at(std::size_t row, std::size_t col) {
    return labels[row * width + col];
  }

  bool operator==(const LabelMap&) const = default;
};

struct GroundTruthBox {
  Box box;
  std::size_t det_class = 0;  // index into C_det

  bool operator==(const GroundTruthBox&) const = default;
};

struct GroundTruth {
  std::vector<GroundTruthBox> boxes;
  LabelMap label_map;

  bool operator==(const GroundTruth&) const = default;
};

struct SampleRecord {
  std::string sample_id;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<DetectionBox> detections;
  ProbabilityMap seg;
  std::optional<GroundTruth> truth;
  std::optional<std::string> image_ref;

  bool operator==(const SampleRecord&) const = default;
};

struct Violation {
  std::string field;
  std::string message;
};

/// Every invariant violation found in `record`; empty means valid.
std::vector<Violation> ValidateSample(const SampleRecord& record,
                                      const ClassSpace& space);

/// Lifts a C_det distribution into C_seg: detection positions keep their
/// probability, the rest get epsilon, then the vector is renormalized.
ClassDistribution TransformClassDistribution(const ClassDistribution& dist,
                                             const ClassSpace& space);
/// Same, with an explicit padding value instead of space.epsilon().
ClassDistribution TransformClassDistribution(const ClassDistribution& dist,
                                             const ClassSpace& space,
                                             double epsilon);

/// Per-pixel argmax over channels, ties to the lowest class index.
LabelMap ArgmaxLabel(const ProbabilityMap& seg);

}  // namespace mtal
