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

#include "mtal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mtal/error.hpp"
#include "mtal/inconsistency.hpp"
#include "mtal/parallel.hpp"
#include "mtal/rng.hpp"

namespace mtal {
namespace {

constexpr double kFractionSlack = 1e-9;

// Seeded permutation of [0, n): sort by a per-index hash.
std::vector<std::size_t> SeededOrder(std::size_t n, std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) keyed[i] = {DeriveSeed(seed, i), i};
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = keyed[i].second;
  return out;
}

}  // namespace

StrategyKind ParseStrategy(const std::string& text) {
  if (text == "inconsistency") return StrategyKind::kInconsistency;
  if (text == "random") return StrategyKind::kRandom;
  throw Error(ErrorKind::kInvalidArgument, "unknown strategy: " + text);
}

std::string_view StrategyName(StrategyKind kind) {
  return kind == StrategyKind::kRandom ? "random" : "inconsistency";
}

std::vector<std::string> SelectBatch(std::span<const SampleScore> scores,
                                     std::size_t budget,
                                     const Strategy& strategy) {
  if (budget > scores.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "budget " + std::to_string(budget) + " exceeds pool of " +
                    std::to_string(scores.size()));
  }
  std::vector<SampleScore> ranked(scores.begin(), scores.end());
  if (strategy.kind == StrategyKind::kRandom) {
    for (SampleScore& s : ranked) {
      s.score =
          RandomStream(DeriveSeed(strategy.seed, Fnv1a(s.sample_id))).uniform();
    }
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const SampleScore& a, const SampleScore& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.sample_id < b.sample_id;
            });
  std::vector<std::string> out;
  out.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) out.push_back(ranked[i].sample_id);
  return out;
}

PoolState::PoolState(std::vector<std::string> labeled,
                     std::vector<std::string> unlabeled)
    : labeled_(std::move(labeled)), unlabeled_(std::move(unlabeled)) {
  std::sort(labeled_.begin(), labeled_.end());
  std::sort(unlabeled_.begin(), unlabeled_.end());
  std::vector<std::string> both;
  std::set_intersection(labeled_.begin(), labeled_.end(), unlabeled_.begin(),
                        unlabeled_.end(), std::back_inserter(both));
  if (!both.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "id " + both.front() + " is both labeled and unlabeled");
  }
}

double PoolState::labeled_fraction() const {
  const std::size_t n = corpus_size();
  return n == 0 ? 0.0
                : static_cast<double>(labeled_.size()) / static_cast<double>(n);
}

bool PoolState::is_labeled(const std::string& id) const {
  return std::binary_search(labeled_.begin(), labeled_.end(), id);
}

void PoolState::Advance(const std::vector<std::string>& selected) {
  std::vector<std::string> sorted = selected;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kInvalidArgument, "selection contains duplicates");
  }
  for (const std::string& id : sorted) {
    if (!std::binary_search(unlabeled_.begin(), unlabeled_.end(), id)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "selected id " + id + " is not in the unlabeled pool");
    }
  }
  std::vector<std::string> remaining;
  std::set_difference(unlabeled_.begin(), unlabeled_.end(), sorted.begin(),
                      sorted.end(), std::back_inserter(remaining));
  unlabeled_ = std::move(remaining);
  std::vector<std::string> merged;
  std::merge(labeled_.begin(), labeled_.end(), sorted.begin(), sorted.end(),
             std::back_inserter(merged));
  labeled_ = std::move(merged);
  history_.push_back(selected);
  ++cycle_;
}

void Protocol::Validate() const {
  if (!(init_fraction > 0.0 && init_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "init_fraction must lie in (0,1]");
  }
  if (!(budget_fraction >= 0.0 && budget_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "budget_fraction must lie in [0,1]");
  }
  if (init_fraction + static_cast<double>(cycles) * budget_fraction >
      1.0 + kFractionSlack) {
    throw Error(ErrorKind::kInvalidArgument,
                "init_fraction + cycles * budget_fraction exceeds 1");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "validation_fraction must lie in [0,1)");
  }
  if (!(competence_bandwidth > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "competence_bandwidth must be positive");
  }
}

std::size_t Protocol::LabeledCountAt(std::size_t cycle,
                                     std::size_t corpus) const {
  const double f = init_fraction + static_cast<double>(cycle) * budget_fraction;
  if (f >= 1.0 - kFractionSlack) return corpus;
  return static_cast<std::size_t>(
      std::llround(f * static_cast<double>(corpus)));
}

SimulationResult RunSimulation(std::span<const SyntheticScene> world,
                               const ClassSpace& space, StrategyKind strategy,
                               std::uint64_t seed,
                               const SimulationOptions& options) {
  const Protocol& protocol = options.protocol;
  protocol.Validate();
  options.scoring.Validate();
  options.corruption.Validate();

  // Validation split, then the initial labeled pool, both seeded.
  const std::vector<std::size_t> order =
      SeededOrder(world.size(), DeriveSeed(seed, 1));
  const auto n_val = static_cast<std::size_t>(std::llround(
      protocol.validation_fraction * static_cast<double>(world.size())));
  if (n_val >= world.size()) {
    throw Error(ErrorKind::kInvalidArgument, "no training samples left");
  }
  std::vector<std::size_t> validation(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> training(order.begin() + n_val, order.end());
  std::sort(validation.begin(), validation.end());

  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < world.size(); ++i) {
    if (!index_of.emplace(world[i].sample_id, i).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate sample id " + world[i].sample_id);
    }
  }

  const std::size_t corpus = training.size();
  const std::vector<std::size_t> init_order =
      SeededOrder(corpus, DeriveSeed(seed, 2));
  const std::size_t n_init = protocol.LabeledCountAt(0, corpus);
  std::vector<std::string> labeled, unlabeled;
  for (std::size_t k = 0; k < corpus; ++k) {
    const std::string& id = world[training[init_order[k]]].sample_id;
    (k < n_init ? labeled : unlabeled).push_back(id);
  }

  SimulationResult result;
  result.pool = PoolState(std::move(labeled), std::move(unlabeled));

  std::vector<double> corpus_difficulty;
  for (std::size_t idx : training)
    corpus_difficulty.push_back(world[idx].difficulty);

  auto labeled_difficulty = [&] {
    std::vector<double> out;
    for (const std::string& id : result.pool.labeled()) {
      out.push_back(world[index_of.at(id)].difficulty);
    }
    return out;
  };

  auto predict = [&](const std::vector<std::size_t>& indices,
                     std::span<const double> labeled_diff, bool fully) {
    std::vector<SampleRecord> records(indices.size());
    std::vector<double> noise(indices.size());
    ParallelFor(indices.size(), options.threads, [&](std::size_t k) {
      const SyntheticScene& scene = world[indices[k]];
      const double progress =
          fully ? 1.0
                : Competence(scene.difficulty, labeled_diff, corpus_difficulty,
                             protocol.competence_bandwidth);
      noise[k] = EffectiveNoise(scene.difficulty, progress);
      records[k] =
          PredictWithNoise(scene, space, progress, options.corruption, seed);
    });
    return std::make_pair(std::move(records), std::move(noise));
  };

  const auto fully = predict(validation, {}, true).first;
  const double map_fully = MeanAveragePrecision(fully, space);
  const double miou_fully = MeanIou(fully, space);

  auto evaluate = [&](std::size_t cycle) {
    const std::vector<double> labeled_diff = labeled_difficulty();
    const auto records = predict(validation, labeled_diff, false).first;
    CycleReport report;
    report.cycle = cycle;
    report.labeled_fraction = result.pool.labeled_fraction();
    report.strategy = strategy;
    report.metrics = Evaluate(records, space, map_fully, miou_fully);
    result.reports.push_back(report);
  };

  evaluate(0);
  for (std::size_t cycle = 1; cycle <= protocol.cycles; ++cycle) {
    const std::size_t budget = protocol.LabeledCountAt(cycle, corpus) -
                               protocol.LabeledCountAt(cycle - 1, corpus);
    std::vector<std::size_t> candidates;
    for (const std::string& id : result.pool.unlabeled()) {
      candidates.push_back(index_of.at(id));
    }
    const std::vector<double> labeled_diff = labeled_difficulty();
    auto [records, noise] = predict(candidates, labeled_diff, false);

    std::vector<double> combined(records.size(), 0.0);
    if (strategy == StrategyKind::kInconsistency) {
      const auto scores =
          ScoreSamples(records, space, options.scoring, options.threads);
      for (std::size_t k = 0; k < scores.size(); ++k)
        combined[k] = scores[k].combined;
    }
    std::vector<SampleScore> scored;
    std::vector<CandidateTrace> trace;
    for (std::size_t k = 0; k < records.size(); ++k) {
      scored.push_back({records[k].sample_id, combined[k]});
      trace.push_back({records[k].sample_id, noise[k], combined[k]});
    }
    result.candidates.push_back(std::move(trace));

    const Strategy chosen{strategy, DeriveSeed(seed, 3, cycle)};
    result.pool.Advance(SelectBatch(scored, budget, chosen));
    evaluate(cycle);
  }
  return result;
}

double FractionReaching(std::span<const CycleReport> reports, double target) {
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double m = reports[i].metrics.mdsq;
    if (m < target) continue;
    if (i == 0) return reports[0].labeled_fraction;
    const double m0 = reports[i - 1].metrics.mdsq;
    const double f0 = reports[i - 1].labeled_fraction;
    const double f1 = reports[i].labeled_fraction;
    return f0 + (target - m0) / (m - m0) * (f1 - f0);
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace mtal
