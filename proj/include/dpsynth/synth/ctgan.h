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

#ifndef DPSYNTH_SYNTH_CTGAN_H_
#define DPSYNTH_SYNTH_CTGAN_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/nn/network.h"
#include "dpsynth/privacy/accountant.h"
#include "dpsynth/synth/conditions.h"
#include "dpsynth/synth/synthesizer.h"
#include "dpsynth/transforms/data_transformer.h"

namespace dpsynth {

// CTGAN components that can be switched off or replaced (non-private only).
struct AblationFlags {
  bool uni_samp = false;    // conditions by raw frequency
  bool batch_samp = false;  // real rows drawn independently of conditions
  bool no_penalty = false;  // no gradient penalty
  bool uni_trans = false;   // uniform binning instead of mixtures
  bool grad_clip = false;   // discriminator gradient clipped to norm 1

  bool any() const {
    return uni_samp || batch_samp || no_penalty || uni_trans || grad_clip;
  }
  // "base", or the enabled flags joined by '+'.
  std::string Name() const;
  static absl::StatusOr<AblationFlags> Parse(const std::string& name);
  bool operator==(const AblationFlags&) const = default;
};

struct PrivacyTarget {
  double epsilon = kInfiniteEpsilon;
  double delta = 1e-5;
  double clip_norm = 1.0;
};

struct CtganConfig {
  int epochs = 300;
  int batch_size = 500;  // expected lot size when private
  int embedding_dim = 128;
  std::vector<int> generator_dims = {256, 256};
  std::vector<int> discriminator_dims = {256, 256};
  double generator_lr = 1e-3;
  double discriminator_lr = 1e-3;
  double gp_lambda = 10.0;
  double gumbel_tau = 0.2;
  int gmm_components = 10;
  int uniform_bins = 10;
  int chunk_rows = 128;  // rows per per-sample gradient pass
  // Private training only: discriminator steps per epoch. 0 derives it from
  // the table size as ceil(n / batch_size), which makes the step count (and
  // so the release) depend on n; a positive value fixes a public schedule.
  int dp_steps_per_epoch = 0;

  nlohmann::json ToJson() const;
  static absl::StatusOr<CtganConfig> FromJson(const nlohmann::json& json);
};

struct DiscriminatorStepInfo {
  int64_t step = 0;
  int epoch = 0;
  std::vector<int> real_rows;         // training-row indices used
  std::vector<Condition> conditions;  // paired with real_rows
  std::vector<double> clipped_norms;  // per-sample, private training only
  double clip_norm = 0.0;
  bool noised = false;
  double loss = 0.0;
};

struct GeneratorStepInfo {
  int64_t step = 0;
  int epoch = 0;
  // Whether any value derived from training rows reached the loss.
  bool touched_private_data = false;
  double loss = 0.0;
};

// Instrumentation hooks called from the training loop.
class TrainingObserver {
 public:
  virtual ~TrainingObserver() = default;
  virtual void OnDiscriminatorStep(const DiscriminatorStepInfo&) {}
  virtual void OnGeneratorStep(const GeneratorStepInfo&) {}
};

class CtganModel : public Synthesizer {
 public:
  // Conditional WGAN-GP with training-by-sampling.
  static absl::StatusOr<std::unique_ptr<CtganModel>> Fit(
      const DataTable& train, const CtganConfig& config,
      const AblationFlags& flags, uint64_t seed,
      TrainingObserver* observer = nullptr);

  // Poisson lots, conditions taken from the sampled rows, per-sample
  // clipped and noised discriminator updates; the generator only sees the
  // discriminator. Continuous columns always use uniform binning.
  static absl::StatusOr<std::unique_ptr<CtganModel>> FitPrivate(
      const DataTable& train, const CtganConfig& config,
      const PrivacyTarget& privacy, uint64_t seed,
      TrainingObserver* observer = nullptr);

  static absl::StatusOr<std::unique_ptr<CtganModel>> FromJson(
      const TableSchema& schema, const nlohmann::json& json);

  SynthKind kind() const override {
    return ledger_.has_value() ? SynthKind::kDpCtgan : SynthKind::kCtgan;
  }
  const TableSchema& schema() const override { return transformer_.schema(); }
  absl::StatusOr<DataTable> Sample(int n, uint64_t seed) const override;
  nlohmann::json ToJson() const override;
  std::optional<DpLedger> ledger() const override { return ledger_; }
  const TrainingLog& training_log() const override { return log_; }

  const CtganConfig& config() const { return config_; }
  const AblationFlags& flags() const { return flags_; }
  const DataTransformer& transformer() const { return transformer_; }
  // Conditions used at sampling time.
  const ConditionSampler& sampling_conditions() const {
    return sampling_conditions_;
  }
  const nn::ParamVector& generator_params() const { return generator_; }
  const nn::ParamVector& discriminator_params() const { return discriminator_; }

 private:
  friend class CtganTrainer;
  CtganModel() = default;
  absl::Status BuildNetworks();
  // Encoded rows (gumbel-softmax heads) for one-hot conditions.
  absl::StatusOr<Eigen::MatrixXd> GenerateEncoded(
      const Eigen::MatrixXd& conditions, Rng& rng) const;
  // Category frequencies implied by the generator, estimated by iterated
  // pilot sampling; uses no training data.
  absl::StatusOr<ConditionSampler> EstimateConditionMarginals(
      uint64_t seed) const;

  CtganConfig config_;
  AblationFlags flags_;
  DataTransformer transformer_;
  ConditionSpace space_;
  nn::ParamLayout generator_layout_;
  nn::ParamLayout discriminator_layout_;
  nn::Mlp generator_net_;
  nn::Mlp discriminator_net_;
  nn::ParamVector generator_;
  nn::ParamVector discriminator_;
  ConditionSampler sampling_conditions_;
  std::optional<DpLedger> ledger_;
  TrainingLog log_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_CTGAN_H_
