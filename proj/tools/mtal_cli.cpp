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

// Command-line front end: score, select, eval, simulate, ablate-tau, synth.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mtal/boxmask.hpp"
#include "mtal/error.hpp"
#include "mtal/inconsistency.hpp"
#include "mtal/io.hpp"
#include "mtal/kernels/kernels.hpp"
#include "mtal/metrics.hpp"
#include "mtal/simulator.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string ReadText(const std::string& path) {
  const auto bytes = mtal::io::ReadFileBytes(path);
  return {bytes.begin(), bytes.end()};
}

std::vector<double> ParseTaus(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw mtal::Error(mtal::ErrorKind::kInvalidArgument,
                        "bad tau value '" + item + "'");
    }
  }
  if (out.empty()) {
    throw mtal::Error(mtal::ErrorKind::kInvalidArgument, "no tau values given");
  }
  return out;
}

struct ScoreArgs {
  std::string manifest, out, resegmenter = "identity";
  double tau = 0.3, epsilon = 1e-6, margin = 0.1;
  std::size_t threads = 1;
};

struct SelectArgs {
  std::string scores, strategy = "inconsistency", out;
  double budget_frac = 0.10;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string manifest, out;
  double map_fully = 1.0, miou_fully = 1.0;
};

struct SimulateArgs {
  std::string config, strategy = "inconsistency", out, trace;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 keeps the config value
};

struct AblateArgs {
  std::string manifest, taus = "0.1,0.3,0.5,0.7", out, resegmenter = "identity";
  double epsilon = 1e-6, margin = 0.1;
};

struct SynthArgs {
  std::string out;
  std::size_t n = 20, size = 64;
  double labeled_fraction = 0.4;
  std::uint64_t seed = 0;
};

mtal::ScoringConfig MakeScoring(double tau, double epsilon, double margin,
                                const std::string& resegmenter) {
  mtal::ScoringConfig cfg;
  cfg.tau = tau;
  cfg.epsilon = epsilon;
  cfg.margin_fraction = margin;
  cfg.resegmenter = mtal::ParseResegmenter(resegmenter);
  cfg.Validate();
  return cfg;
}

int RunScore(const ScoreArgs& a) {
  const auto cfg = MakeScoring(a.tau, a.epsilon, a.margin, a.resegmenter);
  const auto manifest = mtal::io::LoadManifest(a.manifest);
  const auto scores =
      mtal::ScoreSamples(manifest.samples, manifest.space, cfg, a.threads);
  std::vector<mtal::io::ScoreRow> rows;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    rows.push_back(mtal::io::MakeScoreRow(manifest.samples[i], scores[i]));
  }
  mtal::io::WriteTextAtomically(a.out, mtal::io::ScoresCsv(std::move(rows)));
  return 0;
}

int RunSelect(const SelectArgs& a) {
  if (!(a.budget_frac >= 0.0 && a.budget_frac <= 1.0)) {
    throw mtal::Error(mtal::ErrorKind::kInvalidArgument,
                      "--budget-frac must lie in [0,1]");
  }
  const auto kind = mtal::ParseStrategy(a.strategy);
  const auto rows = mtal::io::ParseScoresCsv(ReadText(a.scores));
  std::vector<mtal::SampleScore> scores;
  for (const auto& r : rows) scores.push_back({r.sample_id, r.combined});
  const auto budget = static_cast<std::size_t>(
      std::llround(a.budget_frac * static_cast<double>(scores.size())));
  const auto batch = mtal::SelectBatch(scores, budget, {kind, a.seed});
  std::string text;
  for (const auto& id : batch) text += id + "\n";
  mtal::io::WriteTextAtomically(a.out, text);
  return 0;
}

int RunEval(const EvalArgs& a) {
  const auto manifest = mtal::io::LoadManifest(a.manifest);
  const auto report = mtal::Evaluate(manifest.samples, manifest.space,
                                     a.map_fully, a.miou_fully);
  mtal::io::WriteTextAtomically(a.out, mtal::io::MetricCsv(report));
  return 0;
}

int RunSimulate(const SimulateArgs& a) {
  const auto kind = mtal::ParseStrategy(a.strategy);
  auto cfg = mtal::io::SimulationConfigFrom(
      mtal::io::ParseKeyValues(ReadText(a.config)));
  if (a.threads != 0) cfg.options.threads = a.threads;
  const mtal::ClassSpace space = mtal::DefaultWorldClassSpace();
  const auto world =
      mtal::GenerateWorld(cfg.n_samples, space, a.seed, cfg.world);
  const auto result =
      mtal::RunSimulation(world, space, kind, a.seed, cfg.options);
  mtal::io::WriteTextAtomically(a.out, mtal::io::ReportCsv(result.reports));
  if (!a.trace.empty()) {
    std::string text = "cycle,sample_id,effective_noise,combined\n";
    for (std::size_t c = 0; c < result.candidates.size(); ++c) {
      for (const auto& t : result.candidates[c]) {
        text += std::to_string(c + 1) + "," + t.sample_id + "," +
                mtal::io::FormatNumber(t.effective_noise) + "," +
                mtal::io::FormatNumber(t.combined) + "\n";
      }
    }
    mtal::io::WriteTextAtomically(a.trace, text);
  }
  return 0;
}

int RunAblate(const AblateArgs& a) {
  const auto taus = ParseTaus(a.taus);
  const auto manifest = mtal::io::LoadManifest(a.manifest);
  std::string text = "tau,boxmask_miou,n_boxes\n";
  for (double tau : taus) {
    const auto cfg = MakeScoring(tau, a.epsilon, a.margin, a.resegmenter);
    const auto acc =
        mtal::MeasureBoxMaskAccuracy(manifest.samples, manifest.space, cfg);
    text += mtal::io::FormatNumber(tau) + "," +
            mtal::io::FormatNumber(acc.mean_iou) + "," +
            std::to_string(acc.boxes) + "\n";
  }
  mtal::io::WriteTextAtomically(a.out, text);
  return 0;
}

int RunSynth(const SynthArgs& a) {
  const mtal::ClassSpace space = mtal::DefaultWorldClassSpace();
  const auto world =
      mtal::GenerateWorld(a.n, space, a.seed, {a.size, a.size, 5});
  mtal::io::Manifest manifest;
  manifest.space = space;
  for (const auto& scene : world) {
    manifest.samples.push_back(
        mtal::PredictWithNoise(scene, space, a.labeled_fraction, {}, a.seed));
  }
  mtal::io::SaveManifest(manifest, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Detection/segmentation inconsistency scoring and active "
      "learning simulation"};
  app.require_subcommand(1);
  bool show_isa = false;
  app.add_flag("--print-isa", show_isa,
               "Print the selected kernel ISA to stderr");

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Score every sample of a manifest");
  sc->add_option("--manifest", score.manifest)->required();
  sc->add_option("--out", score.out)->required();
  sc->add_option("--tau", score.tau, "BoxMask threshold")
      ->capture_default_str();
  sc->add_option("--epsilon", score.epsilon)->capture_default_str();
  sc->add_option("--margin", score.margin, "Crop margin per side")
      ->capture_default_str();
  sc->add_option("--resegmenter", score.resegmenter,
                 "identity | synthetic:<noise>:<seed>")
      ->capture_default_str();
  sc->add_option("--threads", score.threads)->capture_default_str();

  SelectArgs select;
  auto* se = app.add_subcommand("select", "Pick the next batch to label");
  se->add_option("--scores", select.scores)->required();
  se->add_option("--budget-frac", select.budget_frac)->capture_default_str();
  se->add_option("--strategy", select.strategy)
      ->check(CLI::IsMember({"inconsistency", "random"}))
      ->capture_default_str();
  se->add_option("--seed", select.seed)->capture_default_str();
  se->add_option("--out", select.out)->required();

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "mAP / mIoU / mDSQ of a manifest");
  ev->add_option("--manifest", eval.manifest)->required();
  ev->add_option("--map-fully", eval.map_fully)->required();
  ev->add_option("--miou-fully", eval.miou_fully)->required();
  ev->add_option("--out", eval.out)->required();

  SimulateArgs sim;
  auto* si =
      app.add_subcommand("simulate", "Run the synthetic active-learning loop");
  si->add_option("--config", sim.config)->required();
  si->add_option("--strategy", sim.strategy)
      ->check(CLI::IsMember({"inconsistency", "random"}))
      ->capture_default_str();
  si->add_option("--seed", sim.seed)->required();
  si->add_option("--out", sim.out)->required();
  si->add_option("--threads", sim.threads, "Override the config thread count");
  si->add_option("--trace", sim.trace,
                 "Also write per-candidate noise/score CSV");

  AblateArgs ablate;
  auto* ab =
      app.add_subcommand("ablate-tau", "BoxMask accuracy across thresholds");
  ab->add_option("--manifest", ablate.manifest)->required();
  ab->add_option("--taus", ablate.taus)->capture_default_str();
  ab->add_option("--out", ablate.out)->required();
  ab->add_option("--epsilon", ablate.epsilon)->capture_default_str();
  ab->add_option("--margin", ablate.margin)->capture_default_str();
  ab->add_option("--resegmenter", ablate.resegmenter)->capture_default_str();

  SynthArgs synth;
  auto* sy = app.add_subcommand(
      "synth", "Write a synthetic manifest for trying the tools");
  sy->add_option("--out", synth.out, "Manifest path")->required();
  sy->add_option("--n", synth.n)->capture_default_str();
  sy->add_option("--size", synth.size, "Square scene side in pixels")
      ->capture_default_str();
  sy->add_option("--labeled-fraction", synth.labeled_fraction)
      ->capture_default_str();
  sy->add_option("--seed", synth.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (show_isa) {
    std::cerr << "kernels: "
              << mtal::kernels::IsaName(mtal::kernels::Active().isa) << "\n";
  }
  try {
    if (*sc) return RunScore(score);
    if (*se) return RunSelect(select);
    if (*ev) return RunEval(eval);
    if (*si) return RunSimulate(sim);
    if (*ab) return RunAblate(ablate);
    if (*sy) return RunSynth(synth);
  } catch (const mtal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == mtal::ErrorKind::kInvalidArgument ? kExitUsage
                                                         : kExitData;
  }
  return kExitUsage;
}
