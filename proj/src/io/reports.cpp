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
#include <cstdio>
#include <sstream>

#include "mtal/error.hpp"
#include "mtal/io.hpp"

namespace mtal::io {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kSyntax, where + ": not a number: '" + text + "'");
  }
}

std::size_t ParseCount(const std::string& text, const std::string& where) {
  const double v = ParseDouble(text, where);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw Error(ErrorKind::kSyntax, where + ": not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string FormatNumber(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10f", value);
  return buf;
}

ScoreRow MakeScoreRow(const SampleRecord& sample, const ScoreBreakdown& score) {
  return {sample.sample_id, score.s_seg, score.max_s_box, score.combined,
          sample.detections.size()};
}

std::string ScoresCsv(std::vector<ScoreRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    return a.sample_id < b.sample_id;
  });
  std::string out = "sample_id,s_seg,max_s_box,combined,n_detections\n";
  for (const ScoreRow& r : rows) {
    out += r.sample_id + "," + FormatNumber(r.s_seg) + "," +
           FormatNumber(r.max_s_box) + "," + FormatNumber(r.combined) + "," +
           std::to_string(r.n_detections) + "\n";
  }
  return out;
}

std::vector<ScoreRow> ParseScoresCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::kSyntax, "empty scores CSV");
  const auto header = SplitCsvLine(line);
  const std::vector<std::string> expected{"sample_id", "s_seg", "max_s_box",
                                          "combined", "n_detections"};
  if (header != expected) {
    throw Error(ErrorKind::kSyntax, "unexpected scores CSV header: " + line);
  }
  std::vector<ScoreRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto f = SplitCsvLine(line);
    const std::string where = "scores line " + std::to_string(line_no);
    if (f.size() != expected.size()) {
      throw Error(ErrorKind::kSyntax, where + ": expected 5 fields");
    }
    if (f[0].empty())
      throw Error(ErrorKind::kSyntax, where + ": empty sample_id");
    rows.push_back({f[0], ParseDouble(f[1], where), ParseDouble(f[2], where),
                    ParseDouble(f[3], where), ParseCount(f[4], where)});
  }
  return rows;
}

std::string MetricCsv(const MetricReport& r) {
  return "map,miou,mdsq,map_fully,miou_fully\n" + FormatNumber(r.map) + "," +
         FormatNumber(r.miou) + "," + FormatNumber(r.mdsq) + "," +
         FormatNumber(r.map_fully) + "," + FormatNumber(r.miou_fully) + "\n";
}

std::string ReportCsv(std::span<const CycleReport> reports) {
  std::string out = "cycle,labeled_fraction,strategy,map,miou,mdsq\n";
  for (const CycleReport& r : reports) {
    out += std::to_string(r.cycle) + "," + FormatNumber(r.labeled_fraction) +
           "," + std::string(StrategyName(r.strategy)) + "," +
           FormatNumber(r.metrics.map) + "," + FormatNumber(r.metrics.miou) +
           "," + FormatNumber(r.metrics.mdsq) + "\n";
  }
  return out;
}

std::map<std::string, std::string> ParseKeyValues(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kSyntax, "config line " + std::to_string(line_no) +
                                          ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorKind::kSyntax, "config line " + std::to_string(line_no) +
                                          ": empty key or value");
    }
    if (!out.emplace(key, value).second) {
      throw Error(ErrorKind::kSyntax, "duplicate config key " + key);
    }
  }
  return out;
}

SimulationConfig SimulationConfigFrom(
    const std::map<std::string, std::string>& values) {
  SimulationConfig cfg;
  auto& opt = cfg.options;
  for (const auto& [key, value] : values) {
    const std::string where = "config key " + key;
    auto num = [&] { return ParseDouble(value, where); };
    auto count = [&] { return ParseCount(value, where); };
    if (key == "n_samples") {
      cfg.n_samples = count();
    } else if (key == "dims") {
      const auto x = value.find('x');
      if (x == std::string::npos) {
        cfg.world.height = cfg.world.width = count();
      } else {
        cfg.world.height = ParseCount(Trim(value.substr(0, x)), where);
        cfg.world.width = ParseCount(Trim(value.substr(x + 1)), where);
      }
    } else if (key == "max_objects") {
      cfg.world.max_objects = count();
    } else if (key == "init_fraction") {
      opt.protocol.init_fraction = num();
    } else if (key == "budget_fraction") {
      opt.protocol.budget_fraction = num();
    } else if (key == "cycles") {
      opt.protocol.cycles = count();
    } else if (key == "validation_fraction") {
      opt.protocol.validation_fraction = num();
    } else if (key == "competence_bandwidth") {
      opt.protocol.competence_bandwidth = num();
    } else if (key == "box_jitter") {
      opt.corruption.box_jitter = num();
    } else if (key == "class_confusion") {
      opt.corruption.class_confusion = num();
    } else if (key == "mask_erosion_dilation") {
      opt.corruption.mask_erosion_dilation = num();
    } else if (key == "drop_rate") {
      opt.corruption.drop_rate = num();
    } else if (key == "spurious_rate") {
      opt.corruption.spurious_rate = num();
    } else if (key == "label_flip") {
      opt.corruption.label_flip = num();
    } else if (key == "softness") {
      opt.corruption.softness = num();
    } else if (key == "tau") {
      opt.scoring.tau = num();
    } else if (key == "epsilon") {
      opt.scoring.epsilon = num();
    } else if (key == "margin") {
      opt.scoring.margin_fraction = num();
    } else if (key == "threads") {
      opt.threads = count();
    } else {
      throw Error(ErrorKind::kSyntax, "unknown config key " + key);
    }
  }
  if (cfg.n_samples == 0) {
    throw Error(ErrorKind::kInvalidArgument, "n_samples must be positive");
  }
  opt.protocol.Validate();
  opt.corruption.Validate();
  opt.scoring.Validate();
  return cfg;
}

}  // namespace mtal::io
