// Copyright 2026 The DPSynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpsynth/mia/attack.h"

#include <cmath>
#include <fstream>
#include <numeric>

#include "absl/strings/str_format.h"
#include "dpsynth/base/random.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/transforms/histogram_featurizer.h"
#include "dpsynth/trees/forest.h"

namespace dpsynth {
namespace {

// Seed streams of one attack run.
constexpr uint64_t kSplitStream = 1;
constexpr uint64_t kFeaturizerStream = 2;
constexpr uint64_t kVictimStream = 3;
constexpr uint64_t kShadowStreamBase = 100;
constexpr uint64_t kDiscriminatorStreamBase = 1000;

DataTable WithRecord(const DataTable& base, const std::vector<double>& record) {
  std::vector<double> cells = base.cells();
  cells.insert(cells.end(), record.begin(), record.end());
  return *DataTable::Create(base.schema(), std::move(cells));
}

struct ModelPair {
  SampleFn without;
  SampleFn with;
};

absl::StatusOr<ModelPair> FitPair(const GeneratorFactory& factory,
                                  const DataTable& rows, const Canary& canary,
                                  uint64_t seed, const std::string& what) {
  ModelPair pair;
  // Each model draws its own training randomness; coupling the two would let
  // any deterministic dependence on the table size masquerade as membership.
  auto without = factory(rows, DeriveSeed(seed, 0));
  if (!without.ok()) {
    return absl::Status(without.status().code(),
                        absl::StrFormat("%s (without canary): %s", what,
                                        std::string(without.status().message())));
  }
  auto with = factory(WithRecord(rows, canary.record), DeriveSeed(seed, 1));
  if (!with.ok()) {
    return absl::Status(with.status().code(),
                        absl::StrFormat("%s (with canary): %s", what,
                                        std::string(with.status().message())));
  }
  pair.without = *std::move(without);
  pair.with = *std::move(with);
  return pair;
}

absl::StatusOr<Eigen::VectorXd> SampleFeatures(const ModelPair& pair,
                                               int member, int rows,
                                               uint64_t seed,
                                               const HistogramFeaturizer& f) {
  const SampleFn& fn = member ? pair.with : pair.without;
  ASSIGN_OR_RETURN(DataTable sample, fn(rows, seed));
  if (sample.num_rows() != rows) {
    return absl::InternalError("generator returned the wrong row count");
  }
  return f.Featurize(sample);
}

}  // namespace

GeneratorFactory SynthesizerFactory(SynthesizerFit fit) {
  return [fit = std::move(fit)](const DataTable& train,
                                uint64_t seed) -> absl::StatusOr<SampleFn> {
    ASSIGN_OR_RETURN(std::unique_ptr<Synthesizer> model, fit(train, seed));
    std::shared_ptr<const Synthesizer> shared = std::move(model);
    return SampleFn([shared](int rows, uint64_t s) {
      return shared->Sample(rows, s);
    });
  };
}

GeneratorFactory LeakyGeneratorFactory() {
  return [](const DataTable& train, uint64_t) -> absl::StatusOr<SampleFn> {
    if (train.empty()) {
      return absl::InvalidArgumentError("leaky generator needs rows");
    }
    auto table = std::make_shared<const DataTable>(train);
    return SampleFn([table](int rows, uint64_t seed) -> absl::StatusOr<DataTable> {
      RETURN_IF_ERROR(ValidateSampleCount(rows));
      Rng rng = MakeRng(seed);
      const int n = table->num_rows();
      const int offset = UniformInt(rng, 0, n - 1);
      std::vector<int> picks(rows);
      for (int i = 0; i < rows; ++i) picks[i] = (offset + i) % n;
      return table->SelectRows(picks);
    });
  };
}

absl::StatusOr<int> SelectCanaryRow(const DataTable& train, uint64_t seed) {
  std::vector<int> order(train.num_rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = MakeRng(seed, kSplitStream);
  Shuffle(order, rng);
  for (int r : order) {
    if (train.label(r) == 1) return r;
  }
  return absl::InvalidArgumentError("training table has no minority row");
}

absl::StatusOr<Canary> MakeCanary(const DataTable& train, uint64_t seed) {
  Canary canary;
  ASSIGN_OR_RETURN(canary.source_row, SelectCanaryRow(train, seed));
  const auto row = train.row(canary.source_row);
  canary.record.assign(row.begin(), row.end());
  const int target = train.schema().target_index();
  canary.record[target] = 1.0 - canary.record[target];
  return canary;
}

absl::Status AttackConfig::Validate() const {
  if (shadow_pairs < 1 || train_datasets < 2 || eval_datasets < 1 ||
      eval_rows < 1 || discriminators < 1 || forest_trees < 1 ||
      histogram_components < 1) {
    return absl::InvalidArgumentError("attack counts must be positive");
  }
  if (!(shadow_subset_fraction > 0.0 && shadow_subset_fraction < 1.0) ||
      !(reference_fraction > 0.0 && reference_fraction < 1.0)) {
    return absl::InvalidArgumentError("attack fractions must lie in (0, 1)");
  }
  return absl::OkStatus();
}

nlohmann::json AttackConfig::ToJson() const {
  static const char* kNames[] = {"forest", "fair_coin", "constant"};
  return {{"shadow_pairs", shadow_pairs},
          {"shadow_subset_fraction", shadow_subset_fraction},
          {"reference_fraction", reference_fraction},
          {"train_datasets", train_datasets},
          {"eval_datasets", eval_datasets},
          {"eval_rows", eval_rows},
          {"discriminators", discriminators},
          {"forest_trees", forest_trees},
          {"histogram_components", histogram_components},
          {"discriminator", kNames[static_cast<int>(discriminator)]}};
}

nlohmann::json AttackResult::ToJson() const {
  nlohmann::json trials_json = nlohmann::json::array();
  for (const AttackTrial& t : transcript) {
    trials_json.push_back({{"discriminator", t.discriminator},
                           {"dataset", t.dataset},
                           {"sample_seed", t.sample_seed},
                           {"member", t.member},
                           {"predicted", t.predicted}});
  }
  return {{"seed", seed},
          {"canary_source_row", canary.source_row},
          {"canary_record", canary.record},
          {"success_rate", success_rate},
          {"trials", trials},
          {"correct", correct},
          {"discriminator_rates", discriminator_rates},
          {"reference_rows", reference_rows},
          {"victim_rows", victim_rows},
          {"transcript", trials_json}};
}

absl::Status AttackResult::WriteTranscript(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError("cannot write " + path);
  out << ToJson().dump(1) << "\n";
  return out ? absl::OkStatus() : absl::DataLossError("write failed: " + path);
}

absl::StatusOr<AttackResult> RunAttack(const GeneratorFactory& factory,
                                       const DataTable& train,
                                       const AttackConfig& config,
                                       uint64_t seed) {
  RETURN_IF_ERROR(config.Validate());
  AttackResult result;
  result.seed = seed;
  ASSIGN_OR_RETURN(result.canary, MakeCanary(train, seed));

  // Split the remaining rows into the attacker's reference half and the
  // pool the victim's training rows come from.
  std::vector<int> rest;
  for (int r = 0; r < train.num_rows(); ++r) {
    if (r != result.canary.source_row) rest.push_back(r);
  }
  Rng split_rng = MakeRng(seed, kSplitStream);
  Shuffle(rest, split_rng);
  const int reference_size = static_cast<int>(
      std::floor(config.reference_fraction * rest.size()));
  const int subset_size = static_cast<int>(
      std::lround(config.shadow_subset_fraction * train.num_rows()));
  const int pool_size = static_cast<int>(rest.size()) - reference_size;
  if (subset_size < 2 || subset_size > reference_size ||
      subset_size > pool_size) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "training table of %d rows is too small for subsets of %d rows",
        train.num_rows(), subset_size));
  }
  std::vector<int> reference(rest.begin(), rest.begin() + reference_size);
  std::vector<int> pool(rest.begin() + reference_size, rest.end());
  result.reference_rows = reference;

  const DataTable reference_table = train.SelectRows(reference);
  ASSIGN_OR_RETURN(HistogramFeaturizer featurizer,
                   HistogramFeaturizer::Fit(reference_table,
                                            config.histogram_components,
                                            DeriveSeed(seed, kFeaturizerStream)));

  const bool needs_shadows = config.discriminator == DiscriminatorKind::kForest;
  std::vector<ModelPair> shadows;
  if (needs_shadows) {
    for (int p = 0; p < config.shadow_pairs; ++p) {
      const uint64_t pair_seed = DeriveSeed(seed, kShadowStreamBase + p);
      Rng rng = MakeRng(pair_seed);
      std::vector<int> picks = reference;
      Shuffle(picks, rng);
      picks.resize(subset_size);
      ASSIGN_OR_RETURN(
          ModelPair pair,
          FitPair(factory, train.SelectRows(picks), result.canary, pair_seed,
                  absl::StrFormat("shadow pair %d", p)));
      shadows.push_back(std::move(pair));
    }
  }

  const uint64_t victim_seed = DeriveSeed(seed, kVictimStream);
  {
    Rng rng = MakeRng(victim_seed);
    Shuffle(pool, rng);
    pool.resize(subset_size);
    result.victim_rows = pool;
  }
  ASSIGN_OR_RETURN(ModelPair victim,
                   FitPair(factory, train.SelectRows(result.victim_rows),
                           result.canary, victim_seed, "victim pair"));

  for (int d = 0; d < config.discriminators; ++d) {
    const uint64_t d_seed = DeriveSeed(seed, kDiscriminatorStreamBase + d);
    std::optional<RandomForest> forest;
    if (needs_shadows) {
      // Balanced labels: datasets alternate between pair members in blocks
      // that visit every shadow pair.
      Eigen::MatrixXd x(config.train_datasets, featurizer.feature_dim());
      std::vector<int> labels(config.train_datasets);
      for (int j = 0; j < config.train_datasets; ++j) {
        const int pair = j % config.shadow_pairs;
        labels[j] = (j / config.shadow_pairs) % 2;
        ASSIGN_OR_RETURN(Eigen::VectorXd features,
                         SampleFeatures(shadows[pair], labels[j],
                                        config.eval_rows,
                                        DeriveSeed(d_seed, 2 * j), featurizer));
        x.row(j) = features.transpose();
      }
      ForestOptions options;
      options.n_trees = config.forest_trees;
      ASSIGN_OR_RETURN(RandomForest fitted,
                       RandomForest::Fit(DenseFeatures(x), labels, options,
                                         DeriveSeed(d_seed, 1)));
      forest = std::move(fitted);
    }

    Rng coin_rng = MakeRng(d_seed, 2);
    int correct = 0;
    for (int j = 0; j < config.eval_datasets; ++j) {
      AttackTrial trial;
      trial.discriminator = d;
      trial.dataset = j;
      trial.member = UniformInt(coin_rng, 0, 1);
      trial.sample_seed = DeriveSeed(d_seed, 2 * j + 1);
      switch (config.discriminator) {
        case DiscriminatorKind::kForest: {
          ASSIGN_OR_RETURN(Eigen::VectorXd features,
                           SampleFeatures(victim, trial.member, config.eval_rows,
                                          trial.sample_seed, featurizer));
          trial.predicted = forest->Predict(
              std::span<const double>(features.data(), features.size()));
          break;
        }
        case DiscriminatorKind::kFairCoin:
          trial.predicted = UniformInt(coin_rng, 0, 1);
          break;
        case DiscriminatorKind::kConstant:
          trial.predicted = 0;
          break;
      }
      correct += trial.predicted == trial.member;
      result.transcript.push_back(trial);
    }
    result.discriminator_rates.push_back(static_cast<double>(correct) /
                                         config.eval_datasets);
    result.correct += correct;
    result.trials += config.eval_datasets;
  }
  result.success_rate = static_cast<double>(result.correct) / result.trials;
  return result;
}

absl::StatusOr<Dispersion> SuccessDispersion(const std::vector<double>& rates,
                                             int trials) {
  if (rates.size() < 2) {
    return absl::InvalidArgumentError("dispersion needs at least two rates");
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be positive");
  const double n = static_cast<double>(rates.size());
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rates) ss += (r - mean) * (r - mean);
  Dispersion out;
  out.observed = std::sqrt(ss / (n - 1.0));
  out.reference = std::sqrt(0.25 / trials);
  return out;
}

}  // namespace dpsynth
