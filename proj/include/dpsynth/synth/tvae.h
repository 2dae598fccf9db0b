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

#ifndef DPSYNTH_SYNTH_TVAE_H_
#define DPSYNTH_SYNTH_TVAE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/nn/network.h"
#include "dpsynth/synth/ctgan.h"
#include "dpsynth/synth/synthesizer.h"
#include "dpsynth/transforms/data_transformer.h"

namespace dpsynth {

struct TvaeConfig {
  int epochs = 300;
  int batch_size = 500;  // expected lot size when private
  int embedding_dim = 128;
  std::vector<int> encoder_dims = {128, 128};
  std::vector<int> decoder_dims = {128, 128};
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  double offset_sigma = 0.1;  // fixed decoder noise on offsets
  int gmm_components = 10;
  int uniform_bins = 10;
  int chunk_rows = 128;
  // Private training only: discriminator steps per epoch. 0 derives it from
  // the table size as ceil(n / batch_size), which makes the step count (and
  // so the release) depend on n; a positive value fixes a public schedule.
  int dp_steps_per_epoch = 0;

  nlohmann::json ToJson() const;
  static absl::StatusOr<TvaeConfig> FromJson(const nlohmann::json& json);
};

// Variational autoencoder over the encoded rows: cross-entropy on one-hot
// spans, Gaussian likelihood on offsets and a standard-normal prior.
class TvaeModel : public Synthesizer {
 public:
  static absl::StatusOr<std::unique_ptr<TvaeModel>> Fit(
      const DataTable& train, const TvaeConfig& config, uint64_t seed);
  // DP-Adam on Poisson lots; continuous columns use uniform binning.
  static absl::StatusOr<std::unique_ptr<TvaeModel>> FitPrivate(
      const DataTable& train, const TvaeConfig& config,
      const PrivacyTarget& privacy, uint64_t seed);
  static absl::StatusOr<std::unique_ptr<TvaeModel>> FromJson(
      const TableSchema& schema, const nlohmann::json& json);

  SynthKind kind() const override {
    return ledger_.has_value() ? SynthKind::kDpTvae : SynthKind::kTvae;
  }
  const TableSchema& schema() const override { return transformer_.schema(); }
  absl::StatusOr<DataTable> Sample(int n, uint64_t seed) const override;
  nlohmann::json ToJson() const override;
  std::optional<DpLedger> ledger() const override { return ledger_; }
  const TrainingLog& training_log() const override { return log_; }

  const TvaeConfig& config() const { return config_; }
  const DataTransformer& transformer() const { return transformer_; }

  // Per-row negative ELBO (B x 1) of encoded rows under `params`.
  absl::StatusOr<nn::Var> RowLosses(const nn::BoundParams& params,
                                    const Eigen::MatrixXd& encoded,
                                    Rng& rng) const;

 private:
  TvaeModel() = default;
  absl::Status BuildNetworks();
  absl::Status Train(const DataTable& train, uint64_t seed,
                     const std::optional<PrivacyTarget>& privacy);

  TvaeConfig config_;
  DataTransformer transformer_;
  nn::ParamLayout layout_;
  nn::Mlp encoder_;
  nn::Mlp decoder_;
  nn::ParamVector params_;
  std::optional<DpLedger> ledger_;
  TrainingLog log_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_TVAE_H_
