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

#include "dpsynth/synth/synthesizer.h"

#include <fstream>
#include <iomanip>
#include <limits>

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/data/csv_io.h"
#include "dpsynth/synth/ctgan.h"
#include "dpsynth/synth/gaussian_copula.h"
#include "dpsynth/synth/tvae.h"

namespace dpsynth {
namespace {

constexpr char kCheckpointFormat[] = "dpsynth-checkpoint";
constexpr int kCheckpointVersion = 1;

}  // namespace

std::string SynthKindName(SynthKind kind) {
  switch (kind) {
    case SynthKind::kGaussianCopula:
      return "gaussian_copula";
    case SynthKind::kCtgan:
      return "ctgan";
    case SynthKind::kDpCtgan:
      return "dp_ctgan";
    case SynthKind::kTvae:
      return "tvae";
    case SynthKind::kDpTvae:
      return "dp_tvae";
  }
  return "unknown";
}

absl::StatusOr<SynthKind> ParseSynthKind(const std::string& name) {
  for (SynthKind kind : AllSynthKinds()) {
    if (SynthKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown synthesizer '%s' (expected gaussian_copula, ctgan, dp_ctgan, "
      "tvae or dp_tvae)",
      name));
}

bool IsPrivate(SynthKind kind) {
  return kind == SynthKind::kDpCtgan || kind == SynthKind::kDpTvae;
}

const std::vector<SynthKind>& AllSynthKinds() {
  static const std::vector<SynthKind>* kinds = new std::vector<SynthKind>{
      SynthKind::kGaussianCopula, SynthKind::kCtgan, SynthKind::kDpCtgan,
      SynthKind::kTvae, SynthKind::kDpTvae};
  return *kinds;
}

void TrainingLog::WriteCsv(std::ostream& out) const {
  for (size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "," : "") << columns[c];
  }
  out << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const std::vector<double>& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
}

absl::Status TrainingLog::WriteCsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    return absl::UnavailableError(
        absl::StrFormat("cannot write training log '%s'", path));
  }
  WriteCsv(out);
  return out.good() ? absl::OkStatus()
                    : absl::DataLossError("training log write failed");
}

nlohmann::json TrainingLog::ToJson() const {
  return {{"columns", columns}, {"rows", rows}};
}

TrainingLog TrainingLog::FromJson(const nlohmann::json& json) {
  TrainingLog log;
  if (json.is_object()) {
    log.columns = json.value("columns", std::vector<std::string>{});
    log.rows = json.value("rows", std::vector<std::vector<double>>{});
  }
  return log;
}

const TrainingLog& Synthesizer::training_log() const {
  static const TrainingLog* empty = new TrainingLog();
  return *empty;
}

nlohmann::json CheckpointToJson(const Synthesizer& model) {
  nlohmann::json json;
  json["format"] = kCheckpointFormat;
  json["version"] = kCheckpointVersion;
  json["kind"] = SynthKindName(model.kind());
  json["schema"] = SchemaToJson(model.schema());
  json["model"] = model.ToJson();
  return json;
}

absl::StatusOr<std::unique_ptr<Synthesizer>> CheckpointFromJson(
    const nlohmann::json& json) {
  if (!json.is_object() || json.value("format", "") != kCheckpointFormat) {
    return absl::InvalidArgumentError("not a synthesizer checkpoint");
  }
  if (json.value("version", 0) != kCheckpointVersion) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "unsupported checkpoint version %d", json.value("version", 0)));
  }
  ASSIGN_OR_RETURN(SynthKind kind, ParseSynthKind(json.value("kind", "")));
  ASSIGN_OR_RETURN(TableSchema schema, SchemaFromJson(json.at("schema")));
  const nlohmann::json& model = json.at("model");
  switch (kind) {
    case SynthKind::kGaussianCopula: {
      ASSIGN_OR_RETURN(auto m, GaussianCopula::FromJson(schema, model));
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
    case SynthKind::kCtgan:
    case SynthKind::kDpCtgan: {
      ASSIGN_OR_RETURN(auto m, CtganModel::FromJson(schema, model));
      if (m->kind() != kind) {
        return absl::InvalidArgumentError("checkpoint kind/ledger mismatch");
      }
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
    case SynthKind::kTvae:
    case SynthKind::kDpTvae: {
      ASSIGN_OR_RETURN(auto m, TvaeModel::FromJson(schema, model));
      if (m->kind() != kind) {
        return absl::InvalidArgumentError("checkpoint kind/ledger mismatch");
      }
      return std::unique_ptr<Synthesizer>(std::move(m));
    }
  }
  return absl::InternalError("unhandled synthesizer kind");
}

absl::Status SaveCheckpoint(const Synthesizer& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    return absl::UnavailableError(
        absl::StrFormat("cannot write checkpoint '%s'", path));
  }
  // Round-trip precision keeps reloaded models bit-identical.
  out << CheckpointToJson(model).dump();
  return out.good() ? absl::OkStatus()
                    : absl::DataLossError("checkpoint write failed");
}

absl::StatusOr<std::unique_ptr<Synthesizer>> LoadCheckpoint(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot read checkpoint '%s'", path));
  }
  nlohmann::json json = nlohmann::json::parse(in, nullptr, false);
  if (json.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("checkpoint '%s' is not valid JSON", path));
  }
  return CheckpointFromJson(json);
}

absl::Status ValidateSampleCount(int n) {
  if (n <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sample count must be positive, got %d", n));
  }
  return absl::OkStatus();
}

}  // namespace dpsynth
