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

#include "mtal/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "mtal/error.hpp"

namespace mtal {
namespace {

void RequireTruth(const SampleRecord& s) {
  if (!s.truth) {
    throw Error(ErrorKind::kInvalidArgument,
                "sample " + s.sample_id + " has no ground truth");
  }
}

}  // namespace

double BoxIou(const Box& a, const Box& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double PooledAveragePrecision(std::span<const PooledBox> preds,
                              std::span<const PooledBox> truths,
                              double iou_threshold) {
  if (truths.empty()) return preds.empty() ? 1.0 : 0.0;

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return preds[a].confidence > preds[b].confidence;
                   });

  std::vector<bool> matched(truths.size(), false);
  std::vector<bool> is_tp(order.size(), false);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const PooledBox& p = preds[order[rank]];
    double best_iou = iou_threshold;
    std::size_t best = truths.size();
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (matched[t] || truths[t].image != p.image) continue;
      const double iou = BoxIou(p.box, truths[t].box);
      if (iou >= best_iou && (best == truths.size() || iou > best_iou)) {
        best_iou = iou;
        best = t;
      }
    }
    if (best != truths.size()) {
      matched[best] = true;
      is_tp[rank] = true;
    }
  }

  // precision after each rank, then its running maximum from the right
  std::vector<double> precision(order.size());
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (is_tp[rank]) ++tp;
    precision[rank] = static_cast<double>(tp) / static_cast<double>(rank + 1);
  }
  for (std::size_t rank = order.size(); rank-- > 1;) {
    precision[rank - 1] = std::max(precision[rank - 1], precision[rank]);
  }
  const double recall_step = 1.0 / static_cast<double>(truths.size());
  double ap = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (is_tp[rank]) ap += recall_step * precision[rank];
  }
  return ap;
}

double AveragePrecision(std::span<const ScoredBox> preds,
                        std::span<const Box> truths, double iou_threshold) {
  std::vector<PooledBox> p;
  p.reserve(preds.size());
  for (const ScoredBox& s : preds) p.push_back({0, s.box, s.confidence});
  std::vector<PooledBox> t;
  t.reserve(truths.size());
  for (const Box& b : truths) t.push_back({0, b, 1.0});
  return PooledAveragePrecision(p, t, iou_threshold);
}

double MeanAveragePrecision(std::span<const SampleRecord> samples,
                            const ClassSpace& space, double iou_threshold) {
  std::vector<std::vector<PooledBox>> preds(space.num_det());
  std::vector<std::vector<PooledBox>> truths(space.num_det());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleRecord& s = samples[i];
    RequireTruth(s);
    for (const DetectionBox& d : s.detections) {
      preds.at(d.det_class()).push_back({i, d.box, d.confidence});
    }
    for (const GroundTruthBox& g : s.truth->boxes) {
      truths.at(g.det_class).push_back({i, g.box, 1.0});
    }
  }
  double sum = 0.0;
  std::size_t counted = 0;
  bool any_pred = false;
  for (std::size_t c = 0; c < space.num_det(); ++c) {
    any_pred = any_pred || !preds[c].empty();
    if (truths[c].empty()) continue;
    sum += PooledAveragePrecision(preds[c], truths[c], iou_threshold);
    ++counted;
  }
  if (counted == 0) return any_pred ? 0.0 : 1.0;
  return sum / static_cast<double>(counted);
}

double MeanIouOfLabels(std::span<const LabelMap> predictions,
                       std::span<const LabelMap> truths,
                       std::size_t num_classes) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "prediction and truth lists differ in length");
  }
  std::vector<std::uint64_t> inter(num_classes, 0);
  std::vector<std::uint64_t> pred_count(num_classes, 0);
  std::vector<std::uint64_t> truth_count(num_classes, 0);
  for (std::size_t s = 0; s < truths.size(); ++s) {
    const auto& p = predictions[s].labels;
    const auto& t = truths[s].labels;
    if (p.size() != t.size()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "prediction and truth label maps differ in size");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto pi = static_cast<std::size_t>(p[i]);
      const auto ti = static_cast<std::size_t>(t[i]);
      if (pi >= num_classes || ti >= num_classes) {
        throw Error(ErrorKind::kInvalidArgument, "label outside class range");
      }
      ++pred_count[pi];
      ++truth_count[ti];
      if (pi == ti) ++inter[ti];
    }
  }
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (truth_count[c] == 0) continue;
    const std::uint64_t uni = pred_count[c] + truth_count[c] - inter[c];
    sum += static_cast<double>(inter[c]) / static_cast<double>(uni);
    ++present;
  }
  return present == 0 ? 1.0 : sum / static_cast<double>(present);
}

double MeanIou(std::span<const SampleRecord> samples, const ClassSpace& space) {
  std::vector<LabelMap> preds;
  std::vector<LabelMap> truths;
  preds.reserve(samples.size());
  truths.reserve(samples.size());
  for (const SampleRecord& s : samples) {
    RequireTruth(s);
    preds.push_back(ArgmaxLabel(s.seg));
    truths.push_back(s.truth->label_map);
  }
  return MeanIouOfLabels(preds, truths, space.num_seg());
}

double Mdsq(double map, double miou, double map_fully, double miou_fully) {
  if (!(map_fully > 0.0) || !(miou_fully > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "fully-trained normalizers must be positive");
  }
  return (map / map_fully + miou / miou_fully) / 2.0;
}

MetricReport Evaluate(std::span<const SampleRecord> samples,
                      const ClassSpace& space, double map_fully,
                      double miou_fully, double iou_threshold) {
  MetricReport r;
  r.map = MeanAveragePrecision(samples, space, iou_threshold);
  r.miou = MeanIou(samples, space);
  r.map_fully = map_fully;
  r.miou_fully = miou_fully;
  r.mdsq = Mdsq(r.map, r.miou, map_fully, miou_fully);
  return r;
}

}  // namespace mtal
