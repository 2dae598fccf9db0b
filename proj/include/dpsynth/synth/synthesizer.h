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

#ifndef DPSYNTH_SYNTH_SYNTHESIZER_H_
#define DPSYNTH_SYNTH_SYNTHESIZER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "dpsynth/privacy/accountant.h"
#include "json.hpp"

namespace dpsynth {

enum class SynthKind { kGaussianCopula, kCtgan, kDpCtgan, kTvae, kDpTvae };

// "gaussian_copula", "ctgan", "dp_ctgan", "tvae", "dp_tvae".
std::string SynthKindName(SynthKind kind);
absl::StatusOr<SynthKind> ParseSynthKind(const std::string& name);
bool IsPrivate(SynthKind kind);
const std::vector<SynthKind>& AllSynthKinds();

// Per-epoch training curves, written as CSV next to a checkpoint.
struct TrainingLog {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void WriteCsv(std::ostream& out) const;
  absl::Status WriteCsv(const std::string& path) const;
  nlohmann::json ToJson() const;
  static TrainingLog FromJson(const nlohmann::json& json);
};

class Synthesizer {
 public:
  virtual ~Synthesizer() = default;

  virtual SynthKind kind() const = 0;
  virtual const TableSchema& schema() const = 0;

  // Exactly n schema-valid rows; deterministic per seed.
  virtual absl::StatusOr<DataTable> Sample(int n, uint64_t seed) const = 0;

  // Model state (without the common envelope).
  virtual nlohmann::json ToJson() const = 0;

  virtual std::optional<DpLedger> ledger() const { return std::nullopt; }
  virtual const TrainingLog& training_log() const;
};

// Versioned envelope {format, version, kind, schema, model}.
nlohmann::json CheckpointToJson(const Synthesizer& model);
absl::StatusOr<std::unique_ptr<Synthesizer>> CheckpointFromJson(
    const nlohmann::json& json);

absl::Status SaveCheckpoint(const Synthesizer& model, const std::string& path);
absl::StatusOr<std::unique_ptr<Synthesizer>> LoadCheckpoint(
    const std::string& path);

absl::Status ValidateSampleCount(int n);

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_SYNTHESIZER_H_
