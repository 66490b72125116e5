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

#include "mtal/boxmask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtal/error.hpp"
#include "mtal/kernels/kernels.hpp"
#include "mtal/rng.hpp"

namespace mtal {
namespace {

// Rounding slack so that e.g. 20 + 0.1*10 does not ceil to 22.
constexpr double kRoundSlack = 1e-9;

}  // namespace

ResegmenterSpec ParseResegmenter(const std::string& text) {
  if (text == "identity") return ResegmenterSpec::Identity();
  const std::string prefix = "synthetic";
  if (text.rfind(prefix, 0) != 0) {
    throw Error(ErrorKind::kInvalidArgument, "unknown resegmenter: " + text);
  }
  std::string rest = text.substr(prefix.size());
  if (rest.empty()) return ResegmenterSpec::Synthetic(0.0, 0);
  try {
    if (rest.front() != ':') throw std::invalid_argument(text);
    rest.erase(0, 1);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw std::invalid_argument(text);
    return ResegmenterSpec::Synthetic(std::stod(rest.substr(0, colon)),
                                      std::stoull(rest.substr(colon + 1)));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kInvalidArgument,
                "expected synthetic:<noise>:<seed>, got " + text);
  }
}

void ScoringConfig::Validate() const {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon must lie in (0,1)");
  }
  if (!(margin_fraction >= 0.0) || !std::isfinite(margin_fraction)) {
    throw Error(ErrorKind::kInvalidArgument, "margin must be non-negative");
  }
  if (resegmenter.kind == ResegmenterKind::kSynthetic &&
      !(resegmenter.noise >= 0.0 && resegmenter.noise <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "synthetic resegmenter noise must lie in [0,1]");
  }
}

CropRegion ExpandCropRegion(const Box& det, double margin_fraction,
                            std::size_t image_height, std::size_t image_width) {
  const double mx = margin_fraction * det.width();
  const double my = margin_fraction * det.height();
  const double w = static_cast<double>(image_width);
  const double h = static_cast<double>(image_height);
  const double x0 =
      std::clamp(std::floor(det.x_min - mx + kRoundSlack), 0.0, w);
  const double y0 =
      std::clamp(std::floor(det.y_min - my + kRoundSlack), 0.0, h);
  const double x1 = std::clamp(std::ceil(det.x_max + mx - kRoundSlack), 0.0, w);
  const double y1 = std::clamp(std::ceil(det.y_max + my - kRoundSlack), 0.0, h);
  CropRegion region{static_cast<std::size_t>(x0), static_cast<std::size_t>(y0),
                    static_cast<std::size_t>(x1), static_cast<std::size_t>(y1)};
  // A box sitting on the far border can collapse after clamping.
  if (region.col1 <= region.col0) {
    region.col0 = region.col1 > 0 ? region.col1 - 1 : 0;
    region.col1 = region.col0 + 1;
  }
  if (region.row1 <= region.row0) {
    region.row0 = region.row1 > 0 ? region.row1 - 1 : 0;
    region.row1 = region.row0 + 1;
  }
  return region;
}

ProbabilityMap Resegment(const CropRegion& region, const SampleRecord& sample,
                         const ResegmenterSpec& spec) {
  if (region.col1 > sample.width || region.row1 > sample.height ||
      region.col0 >= region.col1 || region.row0 >= region.row1) {
    throw Error(ErrorKind::kInvalidArgument,
                "crop region lies outside sample " + sample.sample_id);
  }
  if (spec.kind == ResegmenterKind::kIdentity) {
    return sample.seg.slice(region.row0, region.col0, region.rows(),
                            region.cols());
  }

  if (!sample.truth) {
    throw Error(ErrorKind::kInvalidArgument,
                "synthetic resegmenter needs ground truth on sample " +
                    sample.sample_id);
  }
  const LabelMap& labels = sample.truth->label_map;
  const std::size_t channels = sample.seg.channels();
  ProbabilityMap out(region.rows(), region.cols(), channels);
  RandomStream rng(DeriveSeed(spec.seed, Fnv1a(sample.sample_id), region.row0,
                              region.col0, region.row1, region.col1));
  std::vector<double> noise(channels);
  for (std::size_t r = 0; r < region.rows(); ++r) {
    for (std::size_t c = 0; c < region.cols(); ++c) {
      const auto truth =
          static_cast<std::size_t>(labels.at(region.row0 + r, region.col0 + c));
      double noise_sum = 0.0;
      for (double& v : noise) {
        v = rng.uniform();
        noise_sum += v;
      }
      for (std::size_t k = 0; k < channels; ++k) {
        const double onehot = (k == truth) ? 1.0 : 0.0;
        const double p = (1.0 - spec.noise) * onehot +
                         spec.noise * (noise_sum > 0.0 ? noise[k] / noise_sum
                                                       : 1.0 / channels);
        out.at(k, r, c) = static_cast<float>(p);
      }
    }
  }
  return out;
}

float FloatThresholdBelow(double tau) {
  float t = static_cast<float>(tau);
  if (static_cast<double>(t) > tau) {
    t = std::nextafter(t, -std::numeric_limits<float>::infinity());
  }
  return t;
}

BinaryMask GenerateBoxMask(const DetectionBox& det, const SampleRecord& sample,
                           const ClassSpace& space,
                           const ScoringConfig& config) {
  const CropRegion region = ExpandCropRegion(det.box, config.margin_fraction,
                                             sample.height, sample.width);
  const ProbabilityMap crop = Resegment(region, sample, config.resegmenter);
  const std::size_t seg_class = space.seg_index_of_det(det.det_class());

  BinaryMask local(region.rows(), region.cols());
  kernels::Active().threshold_bits(crop.plane(seg_class).data(), crop.pixels(),
                                   FloatThresholdBelow(config.tau),
                                   local.mutable_words().data());
  return PasteIntoFrame(local, {region.row0, region.col0}, sample.height,
                        sample.width);
}

CombinedMasks CombineBoxMasks(std::span<const BinaryMask> masks,
                              std::size_t image_height,
                              std::size_t image_width) {
  BinaryMask combined(image_height, image_width);
  for (const BinaryMask& m : masks) combined = PixelwiseMax(combined, m);
  BinaryMask inverse = InvertMask(combined);
  return {std::move(combined), std::move(inverse)};
}

BoxMaskAccuracy MeasureBoxMaskAccuracy(std::span<const SampleRecord> samples,
                                       const ClassSpace& space,
                                       const ScoringConfig& config) {
  double sum = 0.0;
  std::size_t boxes = 0;
  for (const SampleRecord& sample : samples) {
    if (!sample.truth) continue;
    const LabelMap& truth = sample.truth->label_map;
    for (const DetectionBox& det : sample.detections) {
      const BinaryMask bm = GenerateBoxMask(det, sample, space, config);
      const auto c =
          static_cast<std::int32_t>(space.seg_index_of_det(det.det_class()));
      // pixel centers inside the box: col + 0.5 in [x_min, x_max)
      const auto c0 = static_cast<std::size_t>(
          std::max(0.0, std::ceil(det.box.x_min - 0.5)));
      const auto r0 = static_cast<std::size_t>(
          std::max(0.0, std::ceil(det.box.y_min - 0.5)));
      const auto c1 =
          std::min(sample.width, static_cast<std::size_t>(std::max(
                                     0.0, std::ceil(det.box.x_max - 0.5))));
      const auto r1 =
          std::min(sample.height, static_cast<std::size_t>(std::max(
                                      0.0, std::ceil(det.box.y_max - 0.5))));
      std::uint64_t inter = 0;
      std::uint64_t uni = 0;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t col = c0; col < c1; ++col) {
          const bool predicted = bm.get(r, col);
          const bool actual = truth.at(r, col) == c;
          inter += predicted && actual;
          uni += predicted || actual;
        }
      }
      if (uni == 0) continue;
      sum += static_cast<double>(inter) / static_cast<double>(uni);
      ++boxes;
    }
  }
  return {boxes == 0 ? 0.0 : sum / static_cast<double>(boxes), boxes};
}

}  // namespace mtal
