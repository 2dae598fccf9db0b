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

#ifndef DPSYNTH_BENCH_EXPERIMENT_H_
#define DPSYNTH_BENCH_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "dpsynth/mia/attack.h"
#include "dpsynth/synth/ctgan.h"
#include "dpsynth/synth/synthesizer.h"
#include "dpsynth/synth/tvae.h"
#include "dpsynth/trees/gbdt.h"
#include "json.hpp"

namespace dpsynth {

// Pseudo-generator that returns the real training rows; gives the
// real-data reference row of every table.
inline constexpr char kOriginalGenerator[] = "original";

// One grid of experiments. Read from a JSON file; every field is optional
// and defaults to the full-scale setup.
struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::string> datasets = {"ad", "bc", "bm", "cc", "cr", "gm"};
  // CSV + schema sidecar per dataset; empty selects the toy stand-ins.
  std::string data_dir;
  int toy_rows = 0;  // toy stand-in rows; 0 keeps the preset size
  std::vector<std::string> generators = {"gaussian_copula", "ctgan",
                                         "dp_ctgan", "tvae", "dp_tvae"};
  // Privacy levels for private generators; kInfiniteEpsilon disables noise.
  std::vector<double> epsilons = {1.0, 5.0, 10.0, kInfiniteEpsilon};
  std::vector<uint64_t> seeds = {0, 1, 2};  // training seeds
  uint64_t split_seed = 0;
  bool balanced = false;  // train generators on a 50/50 downsample
  // CTGAN ablation variants ("base", "no_penalty", "uni_trans+grad_clip").
  std::vector<std::string> ablations = {"base"};
  double delta = 1e-5;
  double clip_norm = 1.0;
  CtganConfig ctgan;
  TvaeConfig tvae;
  int hpo_trials = 20;
  SearchSpace search_space;
  int sample_rows = 0;  // synthetic rows per cell; 0 matches |train|
  AttackConfig attack;

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<ExperimentConfig> FromJson(const nlohmann::json& json);
  static absl::StatusOr<ExperimentConfig> Load(const std::string& path);
};

// "inf" for kInfiniteEpsilon, otherwise the shortest round-trip decimal.
std::string FormatEpsilon(double epsilon);
absl::StatusOr<double> ParseEpsilon(const std::string& text);

// What to fit in one cell.
struct GeneratorSpec {
  std::string kind;  // SynthKindName(...) or kOriginalGenerator
  double epsilon = kInfiniteEpsilon;
  AblationFlags flags;

  // "ctgan", "ctgan+no_penalty", ...; the privacy level is kept separate.
  std::string Label() const;
};

// Every generator spec of the grid: private kinds once per epsilon, CTGAN
// once per ablation variant, the rest once.
absl::StatusOr<std::vector<GeneratorSpec>> ExpandGenerators(
    const ExperimentConfig& config);

// Fits the spec's synthesizer. Not defined for kOriginalGenerator.
absl::StatusOr<std::unique_ptr<Synthesizer>> FitGenerator(
    const GeneratorSpec& spec, const DataTable& train,
    const ExperimentConfig& config, uint64_t seed);

// Loads `id` from config.data_dir (<id>.csv and <id>.schema.json), or builds
// its toy stand-in when data_dir is empty. The target is canonicalized so
// that code 1 is the minority class.
absl::StatusOr<DataTable> LoadDataset(const std::string& id,
                                      const ExperimentConfig& config);

}  // namespace dpsynth

#endif  // DPSYNTH_BENCH_EXPERIMENT_H_
