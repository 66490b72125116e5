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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mtal/error.hpp"
#include "mtal/io.hpp"
#include "mtal/maskops.hpp"

namespace mtal::io {
namespace {

using nlohmann::json;

[[noreturn]] void SchemaError(const std::string& where,
                              const std::string& what) {
  throw Error(ErrorKind::kSyntax, where + ": " + what);
}

const json& Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    SchemaError(where, std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

template <typename T>
T As(const json& value, const std::string& where) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    SchemaError(where, e.what());
  }
}

Box BoxFrom(const json& value, const std::string& where) {
  const auto v = As<std::vector<double>>(value, where);
  if (v.size() != 4)
    SchemaError(where, "box needs [x_min, y_min, x_max, y_max]");
  return Box{v[0], v[1], v[2], v[3]};
}

json BoxTo(const Box& b) {
  return json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

// Per-class RLE masks must tile the image exactly once.
LabelMap LabelsFromClassMasks(const json& masks, std::size_t height,
                              std::size_t width, std::size_t num_classes,
                              const std::string& where) {
  LabelMap labels(height, width, -1);
  if (!masks.is_array()) SchemaError(where, "expected an array of class masks");
  for (std::size_t m = 0; m < masks.size(); ++m) {
    const std::string at = where + "[" + std::to_string(m) + "]";
    const auto cls =
        As<std::size_t>(Field(masks[m], "class", at), at + ".class");
    if (cls >= num_classes) {
      throw Error(ErrorKind::kInvariant, at + ": class index out of range");
    }
    Rle rle{height, width,
            As<std::vector<std::uint64_t>>(Field(masks[m], "counts", at),
                                           at + ".counts")};
    BinaryMask mask;
    try {
      mask = RleDecode(rle);
    } catch (const Error& e) {
      throw Error(ErrorKind::kInvariant, at + ": " + e.what());
    }
    for (std::size_t i = 0; i < height * width; ++i) {
      if (!mask.get_flat(i)) continue;
      if (labels.labels[i] != -1) {
        throw Error(ErrorKind::kInvariant, at + ": class masks overlap");
      }
      labels.labels[i] = static_cast<std::int32_t>(cls);
    }
  }
  for (std::int32_t v : labels.labels) {
    if (v == -1)
      throw Error(ErrorKind::kInvariant, where + ": pixels not covered");
  }
  return labels;
}

json ClassMasksFrom(const LabelMap& labels, std::size_t num_classes) {
  json out = json::array();
  for (std::size_t k = 0; k < num_classes; ++k) {
    BinaryMask mask(labels.height, labels.width);
    bool any = false;
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
      if (labels.labels[i] == static_cast<std::int32_t>(k)) {
        mask.set(i / labels.width, i % labels.width);
        any = true;
      }
    }
    if (any) out.push_back({{"class", k}, {"counts", RleEncode(mask).counts}});
  }
  return out;
}

ProbabilityMap SegFromArgmaxRle(const json& seg, std::size_t height,
                                std::size_t width, std::size_t num_classes,
                                const std::string& where) {
  const LabelMap labels =
      LabelsFromClassMasks(Field(seg, "rle_argmax", where), height, width,
                           num_classes, where + ".rle_argmax");
  const auto conf = As<std::vector<double>>(
      Field(seg, "mean_confidence", where), where + ".mean_confidence");
  if (conf.size() != num_classes) {
    throw Error(ErrorKind::kInvariant,
                where + ": mean_confidence needs one entry per class");
  }
  for (double c : conf) {
    if (!(c > 1.0 / static_cast<double>(num_classes) && c <= 1.0)) {
      throw Error(ErrorKind::kInvariant,
                  where +
                      ": mean_confidence must exceed 1/|C_seg| to keep the "
                      "argmax");
    }
  }
  ProbabilityMap map(height, width, num_classes);
  const std::size_t n = height * width;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(labels.labels[i]);
    const double rest = (1.0 - conf[k]) / static_cast<double>(num_classes - 1);
    for (std::size_t c = 0; c < num_classes; ++c) {
      map.data()[c * n + i] = static_cast<float>(c == k ? conf[k] : rest);
    }
  }
  return map;
}

std::string SafeFileStem(const std::string& id) {
  std::string out = id;
  for (char& ch : out) {
    if (ch == '/' || ch == '\\' || ch == ':') ch = '_';
  }
  return out;
}

}  // namespace

Manifest LoadManifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kMissingFile, "manifest " + path.string());
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSyntax, path.string() + ": " + e.what());
  }
  const std::filesystem::path base = path.parent_path();

  Manifest manifest;
  manifest.version = As<int>(Field(doc, "version", "manifest"), "version");
  if (manifest.version != kManifestVersion) {
    throw Error(ErrorKind::kVersionMismatch,
                "manifest version " + std::to_string(manifest.version) +
                    ", supported " + std::to_string(kManifestVersion));
  }

  const json& cs = Field(doc, "class_space", "manifest");
  try {
    manifest.space = ClassSpace(
        As<std::vector<std::string>>(Field(cs, "seg_classes", "class_space"),
                                     "class_space.seg_classes"),
        As<std::vector<std::size_t>>(
            Field(cs, "det_class_indices", "class_space"),
            "class_space.det_class_indices"),
        cs.contains("epsilon")
            ? As<double>(cs.at("epsilon"), "class_space.epsilon")
            : ClassSpace::kDefaultEpsilon);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSyntax) throw;
    throw Error(ErrorKind::kInvariant, std::string("class_space: ") + e.what());
  }
  const ClassSpace& space = manifest.space;

  const json& samples = Field(doc, "samples", "manifest");
  if (!samples.is_array())
    SchemaError("manifest", "'samples' must be an array");
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const json& js = samples[s];
    std::string where = "samples[" + std::to_string(s) + "]";
    SampleRecord rec;
    rec.sample_id = As<std::string>(Field(js, "sample_id", where), where);
    where = "sample " + rec.sample_id;
    rec.height = As<std::size_t>(Field(js, "height", where), where + ".height");
    rec.width = As<std::size_t>(Field(js, "width", where), where + ".width");
    if (js.contains("image"))
      rec.image_ref = As<std::string>(js.at("image"), where);

    if (js.contains("detections")) {
      const json& dets = js.at("detections");
      for (std::size_t d = 0; d < dets.size(); ++d) {
        const std::string at = where + ".detections[" + std::to_string(d) + "]";
        DetectionBox det;
        det.box = BoxFrom(Field(dets[d], "box", at), at + ".box");
        det.confidence = As<double>(Field(dets[d], "confidence", at), at);
        det.dist.probs =
            As<std::vector<double>>(Field(dets[d], "dist", at), at);
        rec.detections.push_back(std::move(det));
      }
    }

    const json& seg = Field(js, "seg", where);
    if (seg.contains("tensor")) {
      rec.seg = ReadTensor(base / As<std::string>(seg.at("tensor"), where));
    } else if (seg.contains("rle_argmax")) {
      if (rec.height == 0 || rec.width == 0) {
        throw Error(ErrorKind::kInvariant, where + ": zero image dimension");
      }
      rec.seg = SegFromArgmaxRle(seg, rec.height, rec.width, space.num_seg(),
                                 where + ".seg");
    } else {
      SchemaError(where + ".seg", "needs 'tensor' or 'rle_argmax'");
    }

    if (js.contains("truth")) {
      const json& jt = js.at("truth");
      GroundTruth truth;
      if (jt.contains("boxes")) {
        for (std::size_t b = 0; b < jt.at("boxes").size(); ++b) {
          const json& jb = jt.at("boxes")[b];
          const std::string at =
              where + ".truth.boxes[" + std::to_string(b) + "]";
          truth.boxes.push_back({BoxFrom(Field(jb, "box", at), at),
                                 As<std::size_t>(Field(jb, "class", at), at)});
        }
      }
      if (jt.contains("label_tensor")) {
        truth.label_map = TensorToLabelMap(
            ReadTensor(base / As<std::string>(jt.at("label_tensor"), where)));
      } else if (jt.contains("label_masks")) {
        if (rec.height == 0 || rec.width == 0) {
          throw Error(ErrorKind::kInvariant, where + ": zero image dimension");
        }
        truth.label_map =
            LabelsFromClassMasks(jt.at("label_masks"), rec.height, rec.width,
                                 space.num_seg(), where + ".truth.label_masks");
      } else {
        SchemaError(where + ".truth", "needs 'label_masks' or 'label_tensor'");
      }
      rec.truth = std::move(truth);
    }

    const auto violations = ValidateSample(rec, space);
    if (!violations.empty()) {
      std::ostringstream msg;
      msg << where << ":";
      for (const Violation& v : violations)
        msg << " [" << v.field << "] " << v.message << ";";
      throw Error(ErrorKind::kInvariant, msg.str());
    }
    manifest.samples.push_back(std::move(rec));
  }

  std::vector<std::string> ids;
  for (const SampleRecord& r : manifest.samples) ids.push_back(r.sample_id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw Error(ErrorKind::kInvariant, "duplicate sample_id " + *dup);
  }
  return manifest;
}

void SaveManifest(const Manifest& manifest, const std::filesystem::path& path) {
  const std::filesystem::path base = path.parent_path();
  if (!base.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create " + base.string());
  }
  const ClassSpace& space = manifest.space;
  json doc;
  doc["version"] = kManifestVersion;
  doc["class_space"] = {{"seg_classes", space.seg_classes()},
                        {"det_class_indices", space.det_class_indices()},
                        {"epsilon", space.epsilon()}};
  json samples = json::array();
  for (const SampleRecord& rec : manifest.samples) {
    json js;
    js["sample_id"] = rec.sample_id;
    js["height"] = rec.height;
    js["width"] = rec.width;
    if (rec.image_ref) js["image"] = *rec.image_ref;
    json dets = json::array();
    for (const DetectionBox& d : rec.detections) {
      dets.push_back({{"box", BoxTo(d.box)},
                      {"confidence", d.confidence},
                      {"dist", d.dist.probs}});
    }
    js["detections"] = std::move(dets);

    const std::string tensor_name = SafeFileStem(rec.sample_id) + ".seg.mtpr";
    WriteTensor(rec.seg, base / tensor_name);
    js["seg"] = {{"tensor", tensor_name}};

    if (rec.truth) {
      json boxes = json::array();
      for (const GroundTruthBox& b : rec.truth->boxes) {
        boxes.push_back({{"box", BoxTo(b.box)}, {"class", b.det_class}});
      }
      js["truth"] = {{"boxes", std::move(boxes)},
                     {"label_masks",
                      ClassMasksFrom(rec.truth->label_map, space.num_seg())}};
    }
    samples.push_back(std::move(js));
  }
  doc["samples"] = std::move(samples);
  WriteTextAtomically(path, doc.dump(1) + "\n");
}

}  // namespace mtal::io
