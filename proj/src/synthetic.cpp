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

// Synthetic scenes and the corruptible predictor.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "mtal/error.hpp"
#include "mtal/rng.hpp"
#include "mtal/simulator.hpp"

namespace mtal {
namespace {

constexpr std::int32_t kNoObject = -1;

// Fraction of the flattened mass that goes to the runner-up class; the
// predicted class keeps argmax as long as softness stays below 1/(1+share).
constexpr double kRunnerUpShare = 0.6;
constexpr double kMaxSoftness = 0.6;

std::vector<std::size_t> BackgroundClasses(const ClassSpace& space) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < space.num_seg(); ++k) {
    if (!space.is_det_class(k)) out.push_back(k);
  }
  return out;
}

struct IntRect {
  std::size_t col0, row0, col1, row1;  // half-open
};

bool Overlaps(const IntRect& a, const IntRect& b, std::size_t gap) {
  return a.col0 < b.col1 + gap && b.col0 < a.col1 + gap &&
         a.row0 < b.row1 + gap && b.row0 < a.row1 + gap;
}

// Distributes `mass` over every class except `keep`, giving `runner` the
// runner-up share.
void Flatten(std::vector<double>& probs, std::size_t keep, std::size_t runner,
             double mass) {
  const std::size_t k = probs.size();
  std::fill(probs.begin(), probs.end(), 0.0);
  probs[keep] = 1.0 - mass;
  if (k == 1) {
    probs[keep] = 1.0;
    return;
  }
  if (k == 2) {
    probs[runner] = mass;
    return;
  }
  const double others =
      (1.0 - kRunnerUpShare) * mass / static_cast<double>(k - 2);
  for (std::size_t i = 0; i < k; ++i) {
    if (i != keep) probs[i] = others;
  }
  probs[runner] = kRunnerUpShare * mass;
}

std::size_t OtherIndex(RandomStream& rng, std::size_t n, std::size_t exclude) {
  if (n < 2) return exclude;
  const std::size_t pick = rng.below(n - 1);
  return pick >= exclude ? pick + 1 : pick;
}

// Morphological boundary shift of one object's predicted region by `radius`
// pixels (Chebyshev metric). Positive grows, negative shrinks.
void ShiftBoundary(const SyntheticScene& scene, std::size_t object,
                   std::int32_t label, int radius, LabelMap& pred) {
  if (radius == 0) return;
  const auto id = static_cast<std::int32_t>(object);
  const std::size_t h = scene.height;
  const std::size_t w = scene.width;
  const int r = std::abs(radius);
  const Box& b = scene.objects[object].box;
  const auto lo_c = static_cast<std::size_t>(std::max(0.0, b.x_min - r));
  const auto lo_r = static_cast<std::size_t>(std::max(0.0, b.y_min - r));
  const auto hi_c = std::min(w, static_cast<std::size_t>(b.x_max) + r);
  const auto hi_r = std::min(h, static_cast<std::size_t>(b.y_max) + r);

  auto near = [&](std::size_t row, std::size_t col, bool want_object) {
    const std::size_t r0 = row >= static_cast<std::size_t>(r) ? row - r : 0;
    const std::size_t c0 = col >= static_cast<std::size_t>(r) ? col - r : 0;
    const std::size_t r1 = std::min(h - 1, row + r);
    const std::size_t c1 = std::min(w - 1, col + r);
    for (std::size_t y = r0; y <= r1; ++y) {
      for (std::size_t x = c0; x <= c1; ++x) {
        const bool is_obj = scene.object_index[y * w + x] == id;
        if (is_obj == want_object) return true;
      }
    }
    return false;
  };

  for (std::size_t row = lo_r; row < hi_r; ++row) {
    for (std::size_t col = lo_c; col < hi_c; ++col) {
      const std::int32_t owner = scene.object_index[row * w + col];
      if (radius < 0 && owner == id && near(row, col, false)) {
        pred.at(row, col) = scene.background.at(row, col);
      } else if (radius > 0 && owner == kNoObject && near(row, col, true)) {
        pred.at(row, col) = label;
      }
    }
  }
}

}  // namespace

ClassSpace DefaultWorldClassSpace() {
  return ClassSpace({"car", "truck", "bus", "pedestrian", "road", "sidewalk",
                     "building", "vegetation", "sky"},
                    {0, 1, 2, 3});
}

GroundTruth SyntheticScene::truth() const {
  GroundTruth out;
  for (const SceneObject& o : objects)
    out.boxes.push_back({o.box, o.det_class});
  out.label_map = labels;
  return out;
}

std::vector<SyntheticScene> GenerateWorld(std::size_t n_samples,
                                          const ClassSpace& space,
                                          std::uint64_t seed,
                                          const WorldOptions& options) {
  if (n_samples == 0) {
    throw Error(ErrorKind::kInvalidArgument, "world needs at least one sample");
  }
  if (options.height < 8 || options.width < 8) {
    throw Error(ErrorKind::kInvalidArgument, "scene dims must be at least 8x8");
  }
  const std::vector<std::size_t> background = BackgroundClasses(space);
  if (background.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "class space needs at least one non-detection class");
  }
  const std::size_t h = options.height;
  const std::size_t w = options.width;

  std::vector<SyntheticScene> world(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RandomStream rng(DeriveSeed(seed, 0x776f726c64ULL, i));
    SyntheticScene& scene = world[i];
    char id[32];
    std::snprintf(id, sizeof(id), "s%05zu", i);
    scene.sample_id = id;
    scene.height = h;
    scene.width = w;

    // Horizontal background bands, top to bottom.
    scene.background = LabelMap(h, w);
    const std::size_t n_bands =
        std::min<std::size_t>(background.size(), 2 + rng.below(3));
    std::vector<std::size_t> cuts;
    for (std::size_t b = 1; b < n_bands; ++b)
      cuts.push_back(1 + rng.below(h - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> band_classes = background;
    for (std::size_t b = band_classes.size(); b > 1; --b) {
      std::swap(band_classes[b - 1], band_classes[rng.below(b)]);
    }
    for (std::size_t row = 0; row < h; ++row) {
      const auto band = static_cast<std::size_t>(
          std::upper_bound(cuts.begin(), cuts.end(), row) - cuts.begin());
      for (std::size_t col = 0; col < w; ++col) {
        scene.background.at(row, col) =
            static_cast<std::int32_t>(band_classes[band]);
      }
    }
    scene.labels = scene.background;
    scene.object_index.assign(h * w, kNoObject);

    const std::size_t wanted =
        options.max_objects == 0 ? 0 : 1 + rng.below(options.max_objects);
    const std::size_t min_side = std::max<std::size_t>(4, std::min(h, w) / 10);
    const std::size_t span_side = std::max<std::size_t>(1, std::min(h, w) / 4);
    std::vector<IntRect> placed;
    for (std::size_t attempt = 0;
         attempt < wanted * 20 && placed.size() < wanted; ++attempt) {
      const std::size_t ow = std::min(w, min_side + rng.below(span_side));
      const std::size_t oh = std::min(h, min_side + rng.below(span_side));
      const std::size_t c0 = rng.below(w - ow + 1);
      const std::size_t r0 = rng.below(h - oh + 1);
      const IntRect rect{c0, r0, c0 + ow, r0 + oh};
      const ShapeKind shape =
          rng.bernoulli(0.5) ? ShapeKind::kEllipse : ShapeKind::kRectangle;
      const std::size_t det_class = rng.below(space.num_det());
      if (std::any_of(placed.begin(), placed.end(),
                      [&](const IntRect& o) { return Overlaps(rect, o, 1); })) {
        continue;
      }

      const auto obj_id = static_cast<std::int32_t>(scene.objects.size());
      const auto label =
          static_cast<std::int32_t>(space.seg_index_of_det(det_class));
      std::size_t min_c = w, min_r = h, max_c = 0, max_r = 0;
      const double cx = (rect.col0 + rect.col1) / 2.0;
      const double cy = (rect.row0 + rect.row1) / 2.0;
      for (std::size_t row = rect.row0; row < rect.row1; ++row) {
        for (std::size_t col = rect.col0; col < rect.col1; ++col) {
          if (shape == ShapeKind::kEllipse) {
            const double dx = (col + 0.5 - cx) / (ow / 2.0);
            const double dy = (row + 0.5 - cy) / (oh / 2.0);
            if (dx * dx + dy * dy > 1.0) continue;
          }
          scene.labels.at(row, col) = label;
          scene.object_index[row * w + col] = obj_id;
          min_c = std::min(min_c, col);
          min_r = std::min(min_r, row);
          max_c = std::max(max_c, col);
          max_r = std::max(max_r, row);
        }
      }
      placed.push_back(rect);
      scene.objects.push_back(
          {shape, det_class,
           Box{static_cast<double>(min_c), static_cast<double>(min_r),
               static_cast<double>(max_c + 1),
               static_cast<double>(max_r + 1)}});
    }
    scene.difficulty = rng.uniform();
  }
  return world;
}

void CorruptionParams::Validate() const {
  const double rates[] = {box_jitter,    class_confusion, drop_rate,
                          spurious_rate, label_flip,      softness};
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "corruption rates must lie in [0,1]");
    }
  }
  if (!(mask_erosion_dilation >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "mask_erosion_dilation must be non-negative");
  }
}

double EffectiveNoise(double difficulty, double labeled_fraction) {
  return std::clamp(difficulty * (1.0 - labeled_fraction), 0.0, 1.0);
}

SampleRecord PredictWithNoise(const SyntheticScene& scene,
                              const ClassSpace& space, double labeled_fraction,
                              const CorruptionParams& params,
                              std::uint64_t seed) {
  params.Validate();
  const double e = EffectiveNoise(scene.difficulty, labeled_fraction);
  RandomStream rng(DeriveSeed(seed, Fnv1a(scene.sample_id),
                              std::bit_cast<std::uint64_t>(labeled_fraction)));
  const std::size_t h = scene.height;
  const std::size_t w = scene.width;
  const std::size_t n_seg = space.num_seg();
  const std::size_t n_det = space.num_det();

  // Segmentation head: per-object class and boundary errors, hallucinated
  // blobs, then pixel noise.
  LabelMap pred = scene.labels;
  for (std::size_t j = 0; j < scene.objects.size(); ++j) {
    const SceneObject& obj = scene.objects[j];
    std::size_t seg_det = obj.det_class;
    if (rng.bernoulli(0.5 * params.class_confusion * e)) {
      seg_det = OtherIndex(rng, n_det, obj.det_class);
      const auto label =
          static_cast<std::int32_t>(space.seg_index_of_det(seg_det));
      for (std::size_t i = 0; i < h * w; ++i) {
        if (scene.object_index[i] == static_cast<std::int32_t>(j)) {
          pred.labels[i] = label;
        }
      }
    }
    const int radius = static_cast<int>(
        std::lround(params.mask_erosion_dilation * e * rng.uniform()));
    const int sign = rng.bernoulli(0.5) ? 1 : -1;
    ShiftBoundary(scene, j,
                  static_cast<std::int32_t>(space.seg_index_of_det(seg_det)),
                  sign * radius, pred);
  }
  for (int trial = 0; trial < 2; ++trial) {
    if (!rng.bernoulli(params.spurious_rate * e)) continue;
    const double cx = rng.uniform(0.0, static_cast<double>(w));
    const double cy = rng.uniform(0.0, static_cast<double>(h));
    const double radius = 2.0 + 3.0 * rng.uniform();
    const auto label =
        static_cast<std::int32_t>(space.seg_index_of_det(rng.below(n_det)));
    for (std::size_t row = 0; row < h; ++row) {
      for (std::size_t col = 0; col < w; ++col) {
        const double dx = col + 0.5 - cx;
        const double dy = row + 0.5 - cy;
        if (dx * dx + dy * dy <= radius * radius &&
            scene.object_index[row * w + col] == kNoObject) {
          pred.at(row, col) = label;
        }
      }
    }
  }
  const double flip = params.label_flip * e;
  for (std::int32_t& label : pred.labels) {
    if (rng.bernoulli(flip)) {
      label = static_cast<std::int32_t>(
          OtherIndex(rng, n_seg, static_cast<std::size_t>(label)));
    }
  }

  ProbabilityMap seg(h, w, n_seg);
  std::vector<double> probs(n_seg);
  for (std::size_t i = 0; i < h * w; ++i) {
    const auto keep = static_cast<std::size_t>(pred.labels[i]);
    const auto truth = static_cast<std::size_t>(scene.labels.labels[i]);
    const double mass =
        std::min(kMaxSoftness, params.softness * e * rng.uniform());
    const std::size_t runner =
        keep != truth ? truth : OtherIndex(rng, n_seg, keep);
    Flatten(probs, keep, runner, mass);
    for (std::size_t k = 0; k < n_seg; ++k) {
      seg.data()[k * h * w + i] = static_cast<float>(probs[k]);
    }
  }

  // Detection head.
  SampleRecord out;
  out.sample_id = scene.sample_id;
  out.height = h;
  out.width = w;
  out.truth = scene.truth();
  const double fw = static_cast<double>(w);
  const double fh = static_cast<double>(h);
  std::vector<double> dist(n_det);

  auto make_box = [&](double x0, double y0, double x1, double y1) {
    x0 = std::clamp(x0, 0.0, fw - 1.0);
    y0 = std::clamp(y0, 0.0, fh - 1.0);
    x1 = std::clamp(x1, x0 + 1.0, fw);
    y1 = std::clamp(y1, y0 + 1.0, fh);
    return Box{x0, y0, x1, y1};
  };

  for (const SceneObject& obj : scene.objects) {
    if (rng.bernoulli(params.drop_rate * e)) continue;
    const double jx = params.box_jitter * e * obj.box.width();
    const double jy = params.box_jitter * e * obj.box.height();
    const double x0 = obj.box.x_min + jx * rng.normal();
    const double y0 = obj.box.y_min + jy * rng.normal();
    const double x1 = obj.box.x_max + jx * rng.normal();
    const double y1 = obj.box.y_max + jy * rng.normal();

    std::size_t cls = obj.det_class;
    if (rng.bernoulli(params.class_confusion * e)) {
      cls = OtherIndex(rng, n_det, obj.det_class);
    }
    const double mass =
        std::min(kMaxSoftness, params.softness * e * rng.uniform());
    const std::size_t runner =
        cls != obj.det_class ? obj.det_class : OtherIndex(rng, n_det, cls);
    Flatten(dist, cls, runner, mass);

    DetectionBox det;
    det.box = make_box(std::min(x0, x1), std::min(y0, y1), std::max(x0, x1),
                       std::max(y0, y1));
    det.confidence = 1.0 - 0.5 * e * rng.uniform();
    det.dist.probs = dist;
    out.detections.push_back(std::move(det));
  }
  for (int trial = 0; trial < 2; ++trial) {
    if (!rng.bernoulli(params.spurious_rate * e)) continue;
    const double bw = 4.0 + rng.uniform() * fw / 4.0;
    const double bh = 4.0 + rng.uniform() * fh / 4.0;
    const double x0 = rng.uniform(0.0, std::max(1.0, fw - bw));
    const double y0 = rng.uniform(0.0, std::max(1.0, fh - bh));
    const std::size_t cls = rng.below(n_det);
    const double mass =
        std::min(kMaxSoftness, params.softness * e * rng.uniform());
    Flatten(dist, cls, OtherIndex(rng, n_det, cls), mass);

    DetectionBox det;
    det.box = make_box(x0, y0, x0 + bw, y0 + bh);
    det.confidence = 0.2 + 0.6 * rng.uniform();
    det.dist.probs = dist;
    out.detections.push_back(std::move(det));
  }
  out.seg = std::move(seg);
  return out;
}

double Competence(double difficulty, std::span<const double> labeled,
                  std::span<const double> corpus, double bandwidth) {
  if (labeled.size() == corpus.size()) return 1.0;
  auto weight = [&](double other) {
    const double z = (difficulty - other) / bandwidth;
    return std::exp(-0.5 * z * z);
  };
  double num = 0.0;
  for (double d : labeled) num += weight(d);
  double den = 0.0;
  for (double d : corpus) den += weight(d);
  if (den <= 0.0) return 0.0;
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace mtal
