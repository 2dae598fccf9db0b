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

#ifndef DPSYNTH_MIA_ATTACK_H_
#define DPSYNTH_MIA_ATTACK_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "dpsynth/synth/synthesizer.h"
#include "json.hpp"

namespace dpsynth {

// A fitted generator: draws `rows` synthetic rows for a sampling seed.
using SampleFn =
    std::function<absl::StatusOr<DataTable>(int rows, uint64_t seed)>;
// Fits a generator on a training table with a training seed.
using GeneratorFactory =
    std::function<absl::StatusOr<SampleFn>(const DataTable& train,
                                           uint64_t seed)>;
using SynthesizerFit =
    std::function<absl::StatusOr<std::unique_ptr<Synthesizer>>(
        const DataTable& train, uint64_t seed)>;

// Adapts a synthesizer training routine to a GeneratorFactory.
GeneratorFactory SynthesizerFactory(SynthesizerFit fit);

// A generator that memorizes its training table and emits its rows
// verbatim, cycling from a seed-dependent offset so that every training row
// appears once `rows` reaches the training size.
GeneratorFactory LeakyGeneratorFactory();

struct Canary {
  int source_row = -1;         // row of the training table it was built from
  std::vector<double> record;  // that row with the target label flipped
};

// The first minority-class row in the seed-shuffled row order.
absl::StatusOr<int> SelectCanaryRow(const DataTable& train, uint64_t seed);
absl::StatusOr<Canary> MakeCanary(const DataTable& train, uint64_t seed);

enum class DiscriminatorKind {
  kForest,    // random forest on histogram features
  kFairCoin,  // ignores the data and flips a coin
  kConstant,  // always answers "canary absent"
};

struct AttackConfig {
  int shadow_pairs = 10;
  double shadow_subset_fraction = 0.2;  // shadow and victim sets: |train| / 5
  double reference_fraction = 0.5;      // attacker reference: half the rest
  int train_datasets = 100;  // featurized shadow datasets per discriminator
  int eval_datasets = 100;   // scored datasets per discriminator
  int eval_rows = 1000;      // rows in every sampled dataset
  int discriminators = 10;
  int forest_trees = 100;
  int histogram_components = 10;
  DiscriminatorKind discriminator = DiscriminatorKind::kForest;

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
};

struct AttackTrial {
  int discriminator = 0;
  int dataset = 0;
  uint64_t sample_seed = 0;
  int member = 0;     // 1 if drawn from the model trained with the canary
  int predicted = 0;
};

struct AttackResult {
  double success_rate = 0.0;  // correct / trials
  int trials = 0;
  int correct = 0;
  std::vector<double> discriminator_rates;
  Canary canary;
  uint64_t seed = 0;
  std::vector<int> reference_rows;  // indices into the training table
  std::vector<int> victim_rows;     // victim pair's rows, canary excluded
  std::vector<AttackTrial> transcript;

  nlohmann::json ToJson() const;
  absl::Status WriteTranscript(const std::string& path) const;
};

// Shadow-model membership inference against a canary. Shadow pairs are fit
// on subsets of the attacker's reference half (with and without the
// canary), a discriminator learns to tell their sampled datasets apart from
// histogram features, and it is then scored on datasets from a victim pair
// fit on rows disjoint from the reference half. The two models of a pair are
// trained with independent seeds.
absl::StatusOr<AttackResult> RunAttack(const GeneratorFactory& factory,
                                       const DataTable& train,
                                       const AttackConfig& config,
                                       uint64_t seed);

struct Dispersion {
  double observed = 0.0;   // sample standard deviation of the rates
  double reference = 0.0;  // sqrt(0.25 / trials)
};

// Spread of success rates across conditions against the binomial spread
// of a fair coin. Needs at least two rates.
absl::StatusOr<Dispersion> SuccessDispersion(const std::vector<double>& rates,
                                             int trials);

}  // namespace dpsynth

#endif  // DPSYNTH_MIA_ATTACK_H_
