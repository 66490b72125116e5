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

// On-disk formats.
//
// Tensor file (little-endian throughout):
//   offset  size  field
//   0       4     magic "MTPR"
//   4       2     format version (u16, currently 1)
//   6       4     height (u32)
//   10      4     width (u32)
//   14      4     channels (u32)
//   18      2     element code (u16, 1 = IEEE-754 float32)
//   20      ...   channels planes of height*width float32, row-major
//
// Manifest: JSON, see README.md for the schema.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtal/domain.hpp"
#include "mtal/inconsistency.hpp"
#include "mtal/metrics.hpp"
#include "mtal/simulator.hpp"

namespace mtal::io {

inline constexpr char kTensorMagic[4] = {'M', 'T', 'P', 'R'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint16_t kElementFloat32 = 1;
inline constexpr std::size_t kTensorHeaderSize = 20;
inline constexpr int kManifestVersion = 1;

std::vector<std::uint8_t> EncodeTensor(const ProbabilityMap& map);
/// `source` names the origin in error messages.
ProbabilityMap DecodeTensor(std::span<const std::uint8_t> bytes,
                            const std::string& source = "<memory>");

void WriteTensor(const ProbabilityMap& map, const std::filesystem::path& path);
ProbabilityMap ReadTensor(const std::filesystem::path& path);

/// Label maps travel as single-channel tensors holding class indices.
ProbabilityMap LabelMapToTensor(const LabelMap& labels);
LabelMap TensorToLabelMap(const ProbabilityMap& tensor);

struct Manifest {
  int version = kManifestVersion;
  ClassSpace space;
  std::vector<SampleRecord> samples;
};

/// Parses and validates a manifest; relative tensor paths resolve against the
/// manifest's directory. Error kinds: kMissingFile, kSyntax,
/// kVersionMismatch, kInvariant, plus tensor decode kinds.
Manifest LoadManifest(const std::filesystem::path& path);

/// Writes the manifest and one "<sample_id>.seg.mtpr" tensor per sample next
/// to it. Ground-truth label maps are stored inline as per-class RLE.
void SaveManifest(const Manifest& manifest, const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void WriteFileAtomically(const std::filesystem::path& path,
                         std::span<const std::uint8_t> bytes);
void WriteTextAtomically(const std::filesystem::path& path,
                         const std::string& text);
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

/// Fixed-point rendering used in every CSV column.
std::string FormatNumber(double value);

struct ScoreRow {
  std::string sample_id;
  double s_seg = 0.0;
  double max_s_box = 0.0;
  double combined = 0.0;
  std::size_t n_detections = 0;
};

ScoreRow MakeScoreRow(const SampleRecord& sample, const ScoreBreakdown& score);

/// Rows come out in ascending sample_id order.
std::string ScoresCsv(std::vector<ScoreRow> rows);
std::vector<ScoreRow> ParseScoresCsv(const std::string& text);

std::string MetricCsv(const MetricReport& report);
std::string ReportCsv(std::span<const CycleReport> reports);

/// "key = value" lines; '#' starts a comment. Throws kSyntax on malformed
/// lines or duplicate keys.
std::map<std::string, std::string> ParseKeyValues(const std::string& text);

struct SimulationConfig {
  std::size_t n_samples = 200;
  WorldOptions world;
  SimulationOptions options;
};

/// Builds a simulation config from parsed key-values; unknown keys are an
/// error.
SimulationConfig SimulationConfigFrom(
    const std::map<std::string, std::string>& values);

}  // namespace mtal::io
