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

#include "dpsynth/synth/tvae.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/data/sampling.h"
#include "dpsynth/nn/optimizer.h"
#include "dpsynth/synth/neural_util.h"

namespace dpsynth {
namespace {

using nn::Var;

constexpr uint64_t kInitStream = 1;
constexpr uint64_t kDataStream = 3;
constexpr uint64_t kLatentStream = 4;
constexpr uint64_t kNoiseStream = 5;
constexpr uint64_t kTransformStream = 7;
constexpr int kSampleChunk = 1000;

absl::Status ValidateConfig(const TvaeConfig& c) {
  if (c.epochs < 1 || c.batch_size < 1 || c.embedding_dim < 1 ||
      c.chunk_rows < 1 || c.gmm_components < 1 || c.uniform_bins < 1) {
    return absl::InvalidArgumentError(
        "tvae epochs, batch size, dims, chunk rows, components and bins must "
        "be >= 1");
  }
  if (c.dp_steps_per_epoch < 0) {
    return absl::InvalidArgumentError("dp_steps_per_epoch must be >= 0");
  }
  if (!(c.learning_rate > 0.0) || c.weight_decay < 0.0 ||
      !(c.offset_sigma > 0.0)) {
    return absl::InvalidArgumentError(
        "tvae learning rate and offset sigma must be positive");
  }
  return absl::OkStatus();
}

nn::AdamOptions TvaeAdam(const TvaeConfig& c) {
  return {.learning_rate = c.learning_rate,
          .beta1 = 0.9,
          .beta2 = 0.999,
          .epsilon = 1e-8,
          .weight_decay = c.weight_decay};
}

}  // namespace

nlohmann::json TvaeConfig::ToJson() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"embedding_dim", embedding_dim},
          {"encoder_dims", encoder_dims},
          {"decoder_dims", decoder_dims},
          {"learning_rate", learning_rate},
          {"weight_decay", weight_decay},
          {"offset_sigma", offset_sigma},
          {"gmm_components", gmm_components},
          {"uniform_bins", uniform_bins},
          {"chunk_rows", chunk_rows},
          {"dp_steps_per_epoch", dp_steps_per_epoch}};
}

absl::StatusOr<TvaeConfig> TvaeConfig::FromJson(const nlohmann::json& json) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError("tvae config must be an object");
  }
  TvaeConfig c;
  c.epochs = json.value("epochs", c.epochs);
  c.batch_size = json.value("batch_size", c.batch_size);
  c.embedding_dim = json.value("embedding_dim", c.embedding_dim);
  c.encoder_dims = json.value("encoder_dims", c.encoder_dims);
  c.decoder_dims = json.value("decoder_dims", c.decoder_dims);
  c.learning_rate = json.value("learning_rate", c.learning_rate);
  c.weight_decay = json.value("weight_decay", c.weight_decay);
  c.offset_sigma = json.value("offset_sigma", c.offset_sigma);
  c.gmm_components = json.value("gmm_components", c.gmm_components);
  c.uniform_bins = json.value("uniform_bins", c.uniform_bins);
  c.chunk_rows = json.value("chunk_rows", c.chunk_rows);
  c.dp_steps_per_epoch = json.value("dp_steps_per_epoch", c.dp_steps_per_epoch);
  RETURN_IF_ERROR(ValidateConfig(c));
  return c;
}

absl::Status TvaeModel::BuildNetworks() {
  layout_ = nn::ParamLayout();
  const int width = transformer_.output_dim();
  nn::NetSpec enc;
  enc.input_dim = width;
  enc.hidden = HiddenLayers(config_.encoder_dims, nn::Activation::kRelu,
                            /*residual=*/false);
  enc.output_dim = 2 * config_.embedding_dim;  // mean and log-variance
  RETURN_IF_ERROR(enc.Validate());
  nn::NetSpec dec;
  dec.input_dim = config_.embedding_dim;
  dec.hidden = HiddenLayers(config_.decoder_dims, nn::Activation::kRelu,
                            /*residual=*/false);
  dec.output_dim = width;
  RETURN_IF_ERROR(dec.Validate());
  encoder_ = nn::Mlp(enc, "encoder", layout_);
  decoder_ = nn::Mlp(dec, "decoder", layout_);
  return absl::OkStatus();
}

absl::StatusOr<Var> TvaeModel::RowLosses(const nn::BoundParams& params,
                                         const Eigen::MatrixXd& encoded,
                                         Rng& rng) const {
  const int rows = static_cast<int>(encoded.rows());
  const int k = config_.embedding_dim;
  const Var x = nn::Input(encoded, /*private_data=*/true);
  ASSIGN_OR_RETURN(Var stats, encoder_.Forward(params, x));
  const Var mu = nn::SliceCols(stats, 0, k);
  const Var logvar = nn::SliceCols(stats, k, k);
  const Var z = nn::Add(
      mu, nn::Mul(nn::Exp(nn::Scale(logvar, 0.5)),
                  nn::Constant(GaussianNoise(rows, k, rng), true)));
  ASSIGN_OR_RETURN(Var raw, decoder_.Forward(params, z));

  const double offset_scale =
      1.0 / (2.0 * config_.offset_sigma * config_.offset_sigma);
  Var loss;
  for (const EncodedSpan& span : transformer_.layout().spans) {
    const Var target =
        nn::Input(encoded.middleCols(span.start, span.width), true);
    const Var logits = nn::SliceCols(raw, span.start, span.width);
    Var term;
    if (span.kind == SpanKind::kOneHot) {
      term = nn::Scale(nn::RowSum(nn::Mul(nn::LogSoftmax(logits), target)),
                       -1.0);
    } else {
      const Var unit = nn::Scale(nn::AddScalar(nn::Tanh(logits), 1.0), 0.5);
      term = nn::Scale(nn::RowSum(nn::Square(nn::Sub(unit, target))),
                       offset_scale);
    }
    loss = loss ? nn::Add(loss, term) : term;
  }
  // KL(N(mu, exp(logvar)) || N(0, I)).
  const Var kl = nn::Scale(
      nn::RowSum(nn::Sub(nn::Add(nn::Square(mu), nn::Exp(logvar)),
                         nn::AddScalar(logvar, 1.0))),
      0.5);
  return nn::Add(loss, kl);
}

absl::Status TvaeModel::Train(const DataTable& train, uint64_t seed,
                              const std::optional<PrivacyTarget>& privacy) {
  RETURN_IF_ERROR(BuildNetworks());
  Rng init_rng = MakeRng(seed, kInitStream);
  nn::ParamVector params{layout_, Eigen::VectorXd::Zero(layout_.size())};
  encoder_.Initialize(params.values, layout_, init_rng);
  decoder_.Initialize(params.values, layout_, init_rng);
  params_ = std::move(params);
  ASSIGN_OR_RETURN(EncodedMatrix encoded, transformer_.Encode(train));
  const Eigen::MatrixXd& data = encoded.values;
  Rng data_rng = MakeRng(seed, kDataStream);
  Rng latent_rng = MakeRng(seed, kLatentStream);
  Rng noise_rng = MakeRng(seed, kNoiseStream);
  nn::Adam adam(layout_.size(), TvaeAdam(config_));
  log_.columns = {"epoch", "loss"};
  log_.rows.clear();
  const int n = train.num_rows();

  auto step_failed = [](int epoch, const absl::Status& st) {
    return absl::InternalError(absl::StrFormat(
        "tvae update diverged at epoch %d: %s", epoch,
        std::string(st.message())));
  };

  if (!privacy.has_value()) {
    const int batch = std::min(config_.batch_size, n);
    const int steps = std::max(1, n / batch);
    std::vector<int> order(n);
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      Shuffle(order, data_rng);
      double total = 0.0;
      for (int s = 0; s < steps; ++s) {
        Eigen::MatrixXd rows(batch, data.cols());
        for (int i = 0; i < batch; ++i) rows.row(i) = data.row(order[s * batch + i]);
        const nn::BoundParams bound(params_);
        ASSIGN_OR_RETURN(Var losses, RowLosses(bound, rows, latent_rng));
        const Var loss = nn::Mean(losses);
        if (absl::Status st = adam.Step(params_.values, bound.Gradient(loss));
            !st.ok()) {
          return step_failed(epoch, st);
        }
        total += loss->value()(0, 0);
      }
      log_.rows.push_back({static_cast<double>(epoch), total / steps});
    }
    return absl::OkStatus();
  }

  const double q = std::min(1.0, static_cast<double>(config_.batch_size) / n);
  const int64_t steps_per_epoch = config_.dp_steps_per_epoch > 0
                                      ? config_.dp_steps_per_epoch
                                      : StepsPerEpoch(n, q * n);
  const int64_t total_steps = config_.epochs * steps_per_epoch;
  ASSIGN_OR_RETURN(NoiseCalibration noise,
                   CalibrateSigma({privacy->epsilon, privacy->delta, q,
                                   total_steps}));
  DpLedger ledger;
  ledger.sigma = noise.sigma;
  ledger.clip_norm = privacy->clip_norm;
  ledger.q = q;
  ledger.steps = total_steps;
  ledger.delta = privacy->delta;
  ledger.target_epsilon = privacy->epsilon;
  ledger.achieved_epsilon = noise.achieved_epsilon;
  const nn::DpConfig dp{privacy->clip_norm, noise.sigma, q * n};
  double total = 0.0;
  int64_t seen = 0;
  for (int64_t step = 0; step < total_steps; ++step) {
    const int epoch = static_cast<int>(step / steps_per_epoch);
    const std::vector<int> lot = PoissonSampleIndices(n, q, data_rng);
    nn::ClippedSum clipped(layout_.size(), privacy->clip_norm);
    for (const auto& [begin, end] :
         Chunks(static_cast<int>(lot.size()), config_.chunk_rows)) {
      Eigen::MatrixXd rows(end - begin, data.cols());
      for (int i = begin; i < end; ++i) rows.row(i - begin) = data.row(lot[i]);
      const nn::BoundParams bound(params_);
      ASSIGN_OR_RETURN(Var losses, RowLosses(bound, rows, latent_rng));
      ASSIGN_OR_RETURN(nn::RowMatrix grads, bound.PerSampleGradients(losses));
      clipped.Add(std::move(grads));
      total += losses->value().sum();
      seen += end - begin;
    }
    if (absl::Status st =
            nn::DpAdamStep(adam, params_.values, clipped, dp, noise_rng);
        !st.ok()) {
      return step_failed(epoch, st);
    }
    if ((step + 1) % steps_per_epoch == 0) {
      log_.rows.push_back({static_cast<double>(epoch),
                           seen > 0 ? total / seen : 0.0});
      total = 0.0;
      seen = 0;
    }
  }
  ledger_ = ledger;
  return absl::OkStatus();
}

absl::StatusOr<std::unique_ptr<TvaeModel>> TvaeModel::Fit(
    const DataTable& train, const TvaeConfig& config, uint64_t seed) {
  RETURN_IF_ERROR(ValidateConfig(config));
  if (train.num_rows() < 2) {
    return absl::FailedPreconditionError("tvae needs at least 2 rows");
  }
  std::unique_ptr<TvaeModel> model(new TvaeModel());
  model->config_ = config;
  ASSIGN_OR_RETURN(model->transformer_,
                   DataTransformer::FitGaussianMixture(
                       train, config.gmm_components,
                       DeriveSeed(seed, kTransformStream)));
  RETURN_IF_ERROR(model->Train(train, seed, std::nullopt));
  return model;
}

absl::StatusOr<std::unique_ptr<TvaeModel>> TvaeModel::FitPrivate(
    const DataTable& train, const TvaeConfig& config,
    const PrivacyTarget& privacy, uint64_t seed) {
  RETURN_IF_ERROR(ValidateConfig(config));
  if (train.num_rows() < 2) {
    return absl::FailedPreconditionError("dp-tvae needs at least 2 rows");
  }
  if (!(privacy.clip_norm > 0.0) || !(privacy.delta > 0.0) ||
      !(privacy.delta < 1.0) || !(privacy.epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        "privacy target needs epsilon > 0, 0 < delta < 1 and clip norm > 0");
  }
  std::unique_ptr<TvaeModel> model(new TvaeModel());
  model->config_ = config;
  ASSIGN_OR_RETURN(model->transformer_,
                   DataTransformer::FitUniform(train.schema(),
                                               config.uniform_bins));
  RETURN_IF_ERROR(model->Train(train, seed, privacy));
  return model;
}

absl::StatusOr<DataTable> TvaeModel::Sample(int n, uint64_t seed) const {
  RETURN_IF_ERROR(ValidateSampleCount(n));
  Rng rng = MakeRng(seed);
  const nn::BoundParams bound(params_, /*trainable=*/false);
  const std::vector<nn::HeadSpec> heads = HeadsForLayout(transformer_.layout());
  Eigen::MatrixXd encoded(n, transformer_.output_dim());
  for (const auto& [begin, end] : Chunks(n, kSampleChunk)) {
    const Var z = nn::Constant(
        GaussianNoise(end - begin, config_.embedding_dim, rng), true);
    ASSIGN_OR_RETURN(Var raw, decoder_.Forward(bound, z));
    // Blocks are decoded by argmax, so a plain softmax suffices.
    encoded.middleRows(begin, end - begin) =
        nn::ApplyHeads(raw, heads, 1.0, nullptr)->value();
  }
  return transformer_.Decode(encoded);
}

nlohmann::json TvaeModel::ToJson() const {
  nlohmann::json json = {{"config", config_.ToJson()},
                         {"transformer", transformer_.ToJson()},
                         {"params", nn::ParamVectorToJson(params_)},
                         {"training_log", log_.ToJson()}};
  if (ledger_.has_value()) json["ledger"] = DpLedgerToJson(*ledger_);
  return json;
}

absl::StatusOr<std::unique_ptr<TvaeModel>> TvaeModel::FromJson(
    const TableSchema& schema, const nlohmann::json& json) {
  for (const char* key : {"config", "transformer", "params"}) {
    if (!json.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("tvae state is missing '%s'", key));
    }
  }
  std::unique_ptr<TvaeModel> model(new TvaeModel());
  ASSIGN_OR_RETURN(model->config_, TvaeConfig::FromJson(json["config"]));
  ASSIGN_OR_RETURN(model->transformer_,
                   DataTransformer::FromJson(json["transformer"]));
  if (!(model->transformer_.schema() == schema)) {
    return absl::InvalidArgumentError("tvae transformer schema mismatch");
  }
  RETURN_IF_ERROR(model->BuildNetworks());
  ASSIGN_OR_RETURN(model->params_, nn::ParamVectorFromJson(json["params"]));
  if (!(model->params_.layout == model->layout_)) {
    return absl::InvalidArgumentError("tvae parameters do not match config");
  }
  if (json.contains("ledger")) {
    ASSIGN_OR_RETURN(model->ledger_, DpLedgerFromJson(json["ledger"]));
  }
  model->log_ =
      TrainingLog::FromJson(json.value("training_log", nlohmann::json()));
  return model;
}

}  // namespace dpsynth
