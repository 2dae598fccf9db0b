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

#include "dpsynth/synth/ctgan.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dpsynth/base/check.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/data/sampling.h"
#include "dpsynth/nn/optimizer.h"
#include "dpsynth/synth/neural_util.h"

namespace dpsynth {
namespace {

using nn::Var;

constexpr uint64_t kGeneratorInitStream = 1;
constexpr uint64_t kDiscriminatorInitStream = 2;
constexpr uint64_t kDataStream = 3;
constexpr uint64_t kLatentStream = 4;
constexpr uint64_t kNoiseStream = 5;
constexpr uint64_t kPilotStream = 6;
constexpr uint64_t kTransformStream = 7;

constexpr double kGpEpsilon = 1e-12;
constexpr int kSampleChunk = 1000;
constexpr int kPilotRows = 2000;
constexpr int kPilotRounds = 3;
constexpr double kPilotSmoothing = 0.5;

absl::Status ValidateConfig(const CtganConfig& c) {
  if (c.epochs < 1 || c.batch_size < 1 || c.embedding_dim < 1 ||
      c.chunk_rows < 1) {
    return absl::InvalidArgumentError(
        "epochs, batch size, embedding dim and chunk rows must be >= 1");
  }
  if (c.dp_steps_per_epoch < 0) {
    return absl::InvalidArgumentError("dp_steps_per_epoch must be >= 0");
  }
  if (!(c.generator_lr > 0.0) || !(c.discriminator_lr > 0.0) ||
      c.gp_lambda < 0.0 || !(c.gumbel_tau > 0.0)) {
    return absl::InvalidArgumentError(
        "learning rates and gumbel temperature must be positive, penalty "
        "weight non-negative");
  }
  if (c.gmm_components < 1 || c.uniform_bins < 1) {
    return absl::InvalidArgumentError("component and bin counts must be >= 1");
  }
  return absl::OkStatus();
}

absl::Status Diverged(const char* network, int epoch,
                      const absl::Status& status) {
  return absl::InternalError(absl::StrFormat(
      "%s update diverged at epoch %d: %s", network, epoch,
      std::string(status.message())));
}

Eigen::MatrixXd RowsOf(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                       int begin, int end) {
  Eigen::MatrixXd out(end - begin, m.cols());
  for (int i = begin; i < end; ++i) out.row(i - begin) = m.row(rows[i]);
  return out;
}

}  // namespace

std::string AblationFlags::Name() const {
  std::vector<std::string> parts;
  if (uni_samp) parts.push_back("uni_samp");
  if (batch_samp) parts.push_back("batch_samp");
  if (no_penalty) parts.push_back("no_penalty");
  if (uni_trans) parts.push_back("uni_trans");
  if (grad_clip) parts.push_back("grad_clip");
  return parts.empty() ? "base" : absl::StrJoin(parts, "+");
}

absl::StatusOr<AblationFlags> AblationFlags::Parse(const std::string& name) {
  AblationFlags flags;
  if (name == "base") return flags;
  for (absl::string_view part : absl::StrSplit(name, '+')) {
    const std::string token(part);
    if (token == "uni_samp") {
      flags.uni_samp = true;
    } else if (token == "batch_samp") {
      flags.batch_samp = true;
    } else if (token == "no_penalty") {
      flags.no_penalty = true;
    } else if (token == "uni_trans") {
      flags.uni_trans = true;
    } else if (token == "grad_clip") {
      flags.grad_clip = true;
    } else {
      return absl::InvalidArgumentError(absl::StrFormat(
          "unknown ablation '%s' (expected base, uni_samp, batch_samp, "
          "no_penalty, uni_trans or grad_clip)",
          token));
    }
  }
  return flags;
}

nlohmann::json CtganConfig::ToJson() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"embedding_dim", embedding_dim},
          {"generator_dims", generator_dims},
          {"discriminator_dims", discriminator_dims},
          {"generator_lr", generator_lr},
          {"discriminator_lr", discriminator_lr},
          {"gp_lambda", gp_lambda},
          {"gumbel_tau", gumbel_tau},
          {"gmm_components", gmm_components},
          {"uniform_bins", uniform_bins},
          {"chunk_rows", chunk_rows},
          {"dp_steps_per_epoch", dp_steps_per_epoch}};
}

absl::StatusOr<CtganConfig> CtganConfig::FromJson(const nlohmann::json& json) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError("ctgan config must be an object");
  }
  CtganConfig c;
  c.epochs = json.value("epochs", c.epochs);
  c.batch_size = json.value("batch_size", c.batch_size);
  c.embedding_dim = json.value("embedding_dim", c.embedding_dim);
  c.generator_dims = json.value("generator_dims", c.generator_dims);
  c.discriminator_dims = json.value("discriminator_dims", c.discriminator_dims);
  c.generator_lr = json.value("generator_lr", c.generator_lr);
  c.discriminator_lr = json.value("discriminator_lr", c.discriminator_lr);
  c.gp_lambda = json.value("gp_lambda", c.gp_lambda);
  c.gumbel_tau = json.value("gumbel_tau", c.gumbel_tau);
  c.gmm_components = json.value("gmm_components", c.gmm_components);
  c.uniform_bins = json.value("uniform_bins", c.uniform_bins);
  c.chunk_rows = json.value("chunk_rows", c.chunk_rows);
  c.dp_steps_per_epoch = json.value("dp_steps_per_epoch", c.dp_steps_per_epoch);
  RETURN_IF_ERROR(ValidateConfig(c));
  return c;
}

absl::Status CtganModel::BuildNetworks() {
  space_ = ConditionSpace(schema());
  generator_layout_ = nn::ParamLayout();
  discriminator_layout_ = nn::ParamLayout();
  nn::NetSpec g;
  g.input_dim = config_.embedding_dim + space_.width();
  g.hidden = HiddenLayers(config_.generator_dims, nn::Activation::kRelu,
                          /*residual=*/true);
  g.output_dim = transformer_.output_dim();
  RETURN_IF_ERROR(g.Validate());
  nn::NetSpec d;
  d.input_dim = transformer_.output_dim() + space_.width();
  d.hidden = HiddenLayers(config_.discriminator_dims,
                          nn::Activation::kLeakyRelu, /*residual=*/false);
  d.output_dim = 1;
  d.leaky_slope = 0.2;
  RETURN_IF_ERROR(d.Validate());
  generator_net_ = nn::Mlp(g, "generator", generator_layout_);
  discriminator_net_ = nn::Mlp(d, "discriminator", discriminator_layout_);
  return absl::OkStatus();
}

absl::StatusOr<Eigen::MatrixXd> CtganModel::GenerateEncoded(
    const Eigen::MatrixXd& conditions, Rng& rng) const {
  const int rows = static_cast<int>(conditions.rows());
  const nn::BoundParams g(generator_, /*trainable=*/false);
  const Var input =
      nn::ConcatCols({nn::Constant(GaussianNoise(rows, config_.embedding_dim,
                                                 rng),
                                   true),
                      nn::Constant(conditions, true)});
  ASSIGN_OR_RETURN(Var raw, generator_net_.Forward(g, input));
  return nn::ApplyHeads(raw, HeadsForLayout(transformer_.layout()),
                        config_.gumbel_tau, &rng)
      ->value();
}

absl::StatusOr<ConditionSampler> CtganModel::EstimateConditionMarginals(
    uint64_t seed) const {
  ConditionSampler current = ConditionSampler::Uniform(schema());
  const int slots = static_cast<int>(space_.columns().size());
  // With a single categorical column every generated row is conditioned on
  // it, so the generator carries no unconditioned signal to estimate from.
  if (slots < 2) return current;
  const std::vector<int> span_of = transformer_.layout().CategoricalSpans(schema());
  Rng rng = MakeRng(seed, kPilotStream);
  for (int round = 0; round < kPilotRounds; ++round) {
    const std::vector<Condition> conds = current.DrawBatch(kPilotRows, rng);
    ASSIGN_OR_RETURN(Eigen::MatrixXd encoded,
                     GenerateEncoded(space_.OneHot(conds), rng));
    std::vector<std::vector<double>> counts(slots);
    for (int s = 0; s < slots; ++s) {
      counts[s].assign(space_.num_values(s), kPilotSmoothing);
    }
    for (int i = 0; i < kPilotRows; ++i) {
      const int fixed = space_.slot_of(conds[i].column);
      for (int s = 0; s < slots; ++s) {
        if (s == fixed) continue;
        const EncodedSpan& span = transformer_.layout().spans[span_of[s]];
        Eigen::Index best = 0;
        encoded.row(i).segment(span.start, span.width).maxCoeff(&best);
        counts[s][best] += 1.0;
      }
    }
    current = ConditionSampler(schema(), std::move(counts));
  }
  return current;
}

// Owns the optimizers and random streams of one training run.
class CtganTrainer {
 public:
  CtganTrainer(CtganModel& model, const DataTable& train, uint64_t seed,
               TrainingObserver* observer)
      : model_(model),
        train_(train),
        observer_(observer),
        data_rng_(MakeRng(seed, kDataStream)),
        latent_rng_(MakeRng(seed, kLatentStream)),
        noise_rng_(MakeRng(seed, kNoiseStream)) {}

  absl::Status Initialize(uint64_t seed) {
    RETURN_IF_ERROR(model_.BuildNetworks());
    Rng g_rng = MakeRng(seed, kGeneratorInitStream);
    Rng d_rng = MakeRng(seed, kDiscriminatorInitStream);
    model_.generator_ =
        InitializeParams(model_.generator_net_, model_.generator_layout_, g_rng);
    model_.discriminator_ = InitializeParams(
        model_.discriminator_net_, model_.discriminator_layout_, d_rng);
    adam_g_ = nn::Adam(model_.generator_layout_.size(),
                       {.learning_rate = model_.config_.generator_lr});
    adam_d_ = nn::Adam(model_.discriminator_layout_.size(),
                       {.learning_rate = model_.config_.discriminator_lr});
    ASSIGN_OR_RETURN(EncodedMatrix encoded, model_.transformer_.Encode(train_));
    encoded_ = std::move(encoded.values);
    model_.log_.columns = {"epoch", "discriminator_loss", "generator_loss"};
    model_.log_.rows.clear();
    return absl::OkStatus();
  }

  absl::Status RunStandard() {
    const CtganConfig& config = model_.config_;
    const AblationFlags& flags = model_.flags_;
    const int n = train_.num_rows();
    const int batch = std::min(config.batch_size, n);
    const int steps_per_epoch = std::max(1, n / batch);
    const ConditionSampler sampler = ConditionSampler::FromData(
        train_, flags.uni_samp ? ConditionWeighting::kFrequency
                               : ConditionWeighting::kLogFrequency);
    const RowIndex index(train_, model_.space_);
    const double lambda = flags.no_penalty ? 0.0 : config.gp_lambda;
    int64_t step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      double d_total = 0.0, g_total = 0.0;
      for (int s = 0; s < steps_per_epoch; ++s, ++step) {
        DiscriminatorStepInfo info;
        info.step = step;
        info.epoch = epoch;
        info.conditions = sampler.DrawBatch(batch, data_rng_);
        info.real_rows.resize(batch);
        for (int i = 0; i < batch; ++i) {
          Condition& cond = info.conditions[i];
          if (flags.batch_samp) {
            // Any row; the condition then describes that row.
            info.real_rows[i] = UniformInt(data_rng_, 0, n - 1);
            cond.value =
                static_cast<int>(train_.at(info.real_rows[i], cond.column));
          } else {
            info.real_rows[i] = index.Pick(cond, data_rng_);
            DPSYNTH_CHECK(info.real_rows[i] >= 0);
          }
        }
        const Eigen::MatrixXd cond = model_.space_.OneHot(info.conditions);
        ASSIGN_OR_RETURN(Eigen::MatrixXd fake,
                         model_.GenerateEncoded(cond, latent_rng_));
        const nn::BoundParams d(model_.discriminator_);
        ASSIGN_OR_RETURN(
            Var losses,
            DiscriminatorLosses(d, RowsOf(encoded_, info.real_rows, 0, batch),
                                fake, cond, lambda));
        const Var loss = nn::Mean(losses);
        Eigen::VectorXd grad = d.Gradient(loss);
        if (flags.grad_clip) {
          const double norm = grad.norm();
          if (norm > 1.0) grad /= norm;
        }
        if (absl::Status st = adam_d_.Step(model_.discriminator_.values, grad);
            !st.ok()) {
          return Diverged("discriminator", epoch, st);
        }
        info.loss = loss->value()(0, 0);
        d_total += info.loss;
        if (observer_) observer_->OnDiscriminatorStep(info);
        ASSIGN_OR_RETURN(double g_loss,
                         GeneratorStep(sampler, batch, step, epoch));
        g_total += g_loss;
      }
      model_.log_.rows.push_back({static_cast<double>(epoch),
                                  d_total / steps_per_epoch,
                                  g_total / steps_per_epoch});
    }
    model_.sampling_conditions_ = sampler;
    return absl::OkStatus();
  }

  absl::Status RunPrivate(const PrivacyTarget& privacy) {
    const CtganConfig& config = model_.config_;
    const int n = train_.num_rows();
    const double q = std::min(1.0, static_cast<double>(config.batch_size) / n);
    const int64_t steps_per_epoch = config.dp_steps_per_epoch > 0
                                        ? config.dp_steps_per_epoch
                                        : StepsPerEpoch(n, q * n);
    const int64_t total_steps = config.epochs * steps_per_epoch;
    ASSIGN_OR_RETURN(NoiseCalibration noise,
                     CalibrateSigma({privacy.epsilon, privacy.delta, q,
                                     total_steps}));
    DpLedger ledger;
    ledger.sigma = noise.sigma;
    ledger.clip_norm = privacy.clip_norm;
    ledger.q = q;
    ledger.steps = total_steps;
    ledger.delta = privacy.delta;
    ledger.target_epsilon = privacy.epsilon;
    ledger.achieved_epsilon = noise.achieved_epsilon;
    const nn::DpConfig dp{privacy.clip_norm, noise.sigma, q * n};

    // Generator conditions never look at the data.
    const ConditionSampler uniform = ConditionSampler::Uniform(model_.schema());
    const std::vector<int>& cat_columns = model_.space_.columns();
    const int batch = std::max(1, static_cast<int>(std::lround(q * n)));
    double d_total = 0.0, g_total = 0.0;
    for (int64_t step = 0; step < total_steps; ++step) {
      const int epoch = static_cast<int>(step / steps_per_epoch);
      DiscriminatorStepInfo info;
      info.step = step;
      info.epoch = epoch;
      info.clip_norm = privacy.clip_norm;
      info.noised = noise.sigma > 0.0;
      info.real_rows = PoissonSampleIndices(n, q, data_rng_);
      const int lot = static_cast<int>(info.real_rows.size());
      for (int row : info.real_rows) {
        const int column = cat_columns[UniformInt(
            data_rng_, 0, static_cast<int>(cat_columns.size()) - 1)];
        info.conditions.push_back(
            {column, static_cast<int>(train_.at(row, column))});
      }
      nn::ClippedSum clipped(model_.discriminator_layout_.size(),
                             privacy.clip_norm);
      double loss_sum = 0.0;
      for (const auto& [begin, end] : Chunks(lot, config.chunk_rows)) {
        const std::vector<Condition> chunk_conds(
            info.conditions.begin() + begin, info.conditions.begin() + end);
        const Eigen::MatrixXd cond = model_.space_.OneHot(chunk_conds);
        ASSIGN_OR_RETURN(Eigen::MatrixXd fake,
                         model_.GenerateEncoded(cond, latent_rng_));
        const nn::BoundParams d(model_.discriminator_);
        ASSIGN_OR_RETURN(
            Var losses,
            DiscriminatorLosses(d, RowsOf(encoded_, info.real_rows, begin, end),
                                fake, cond, config.gp_lambda));
        ASSIGN_OR_RETURN(nn::RowMatrix grads, d.PerSampleGradients(losses));
        clipped.Add(std::move(grads));
        loss_sum += losses->value().sum();
      }
      info.clipped_norms = clipped.clipped_norms();
      if (absl::Status st = nn::DpAdamStep(
              adam_d_, model_.discriminator_.values, clipped, dp, noise_rng_);
          !st.ok()) {
        return Diverged("discriminator", epoch, st);
      }
      info.loss = lot > 0 ? loss_sum / lot : 0.0;
      d_total += info.loss;
      if (observer_) observer_->OnDiscriminatorStep(info);
      ASSIGN_OR_RETURN(double g_loss, GeneratorStep(uniform, batch, step, epoch,
                                                    /*require_public=*/true));
      g_total += g_loss;
      if ((step + 1) % steps_per_epoch == 0) {
        model_.log_.rows.push_back(
            {static_cast<double>(epoch), d_total / steps_per_epoch,
             g_total / steps_per_epoch});
        d_total = g_total = 0.0;
      }
    }
    model_.ledger_ = ledger;
    return absl::OkStatus();
  }

 private:
  // Per-row critic loss D(fake) - D(real) + lambda * (||grad D(x_hat)|| - 1)^2.
  absl::StatusOr<Var> DiscriminatorLosses(const nn::BoundParams& d,
                                          const Eigen::MatrixXd& real,
                                          const Eigen::MatrixXd& fake,
                                          const Eigen::MatrixXd& cond,
                                          double lambda) {
    const nn::Mlp& net = model_.discriminator_net_;
    const int rows = static_cast<int>(real.rows());
    // Real rows and their conditions are training data; generated rows were
    // conditioned on them.
    const Var cond_in = nn::Input(cond, /*private_data=*/true);
    ASSIGN_OR_RETURN(Var d_real,
                     net.Forward(d, nn::ConcatCols(
                                        {nn::Input(real, true), cond_in})));
    ASSIGN_OR_RETURN(Var d_fake,
                     net.Forward(d, nn::ConcatCols(
                                        {nn::Input(fake, true), cond_in})));
    Var loss = nn::Sub(d_fake, d_real);
    if (lambda > 0.0) {
      Eigen::MatrixXd mixed(rows, real.cols());
      for (int i = 0; i < rows; ++i) {
        const double alpha = UniformDouble(latent_rng_);
        mixed.row(i) = alpha * real.row(i) + (1.0 - alpha) * fake.row(i);
      }
      const Var x = nn::Input(mixed, true, /*requires_grad=*/true);
      ASSIGN_OR_RETURN(Var critic,
                       net.Forward(d, nn::ConcatCols({x, cond_in})));
      const Var grad = nn::Grad(
          critic, nn::Constant(Eigen::MatrixXd::Ones(rows, 1), true), {x})[0];
      const Var norm =
          nn::Sqrt(nn::AddScalar(nn::RowSum(nn::Square(grad)), kGpEpsilon));
      loss = nn::Add(loss,
                     nn::Scale(nn::Square(nn::AddScalar(norm, -1.0)), lambda));
    }
    return loss;
  }

  // -mean D(G(z, c)) plus cross-entropy of the conditioned column.
  absl::StatusOr<double> GeneratorStep(const ConditionSampler& sampler,
                                       int batch, int64_t step, int epoch,
                                       bool require_public = false) {
    const std::vector<Condition> conds = sampler.DrawBatch(batch, data_rng_);
    const Eigen::MatrixXd cond_values = model_.space_.OneHot(conds);
    const EncodingLayout& layout = model_.transformer_.layout();
    const std::vector<int> span_of =
        layout.CategoricalSpans(model_.schema());
    // Target one-hots over the full encoded width.
    Eigen::MatrixXd target = Eigen::MatrixXd::Zero(batch, layout.width);
    std::vector<bool> used(span_of.size(), false);
    for (int i = 0; i < batch; ++i) {
      const int slot = model_.space_.slot_of(conds[i].column);
      target(i, layout.spans[span_of[slot]].start + conds[i].value) = 1.0;
      used[slot] = true;
    }

    const nn::BoundParams g(model_.generator_);
    const nn::BoundParams d(model_.discriminator_, /*trainable=*/false);
    const Var cond = nn::Constant(cond_values, true);
    const Var input = nn::ConcatCols(
        {nn::Constant(GaussianNoise(batch, model_.config_.embedding_dim,
                                    latent_rng_),
                      true),
         cond});
    ASSIGN_OR_RETURN(Var raw, model_.generator_net_.Forward(g, input));
    const Var fake = nn::ApplyHeads(raw, HeadsForLayout(layout),
                                    model_.config_.gumbel_tau, &latent_rng_);
    ASSIGN_OR_RETURN(Var critic, model_.discriminator_net_.Forward(
                                     d, nn::ConcatCols({fake, cond})));
    Var loss = nn::Scale(nn::Mean(critic), -1.0);
    Var cross_entropy;
    for (size_t slot = 0; slot < span_of.size(); ++slot) {
      if (!used[slot]) continue;
      const EncodedSpan& span = layout.spans[span_of[slot]];
      const Var term = nn::RowSum(nn::Mul(
          nn::LogSoftmax(nn::SliceCols(raw, span.start, span.width)),
          nn::Constant(target.middleCols(span.start, span.width), true)));
      cross_entropy = cross_entropy ? nn::Add(cross_entropy, term) : term;
    }
    loss = nn::Sub(loss, nn::Mean(cross_entropy));

    GeneratorStepInfo info;
    info.step = step;
    info.epoch = epoch;
    info.touched_private_data = nn::DependsOnPrivateData(loss);
    info.loss = loss->value()(0, 0);
    if (require_public && info.touched_private_data) {
      return absl::InternalError("generator loss depends on training rows");
    }
    if (absl::Status st =
            adam_g_.Step(model_.generator_.values, g.Gradient(loss));
        !st.ok()) {
      return Diverged("generator", epoch, st);
    }
    if (observer_) observer_->OnGeneratorStep(info);
    return info.loss;
  }

  CtganModel& model_;
  const DataTable& train_;
  TrainingObserver* observer_;
  Rng data_rng_;
  Rng latent_rng_;
  Rng noise_rng_;
  nn::Adam adam_g_;
  nn::Adam adam_d_;
  Eigen::MatrixXd encoded_;
};

absl::StatusOr<std::unique_ptr<CtganModel>> CtganModel::Fit(
    const DataTable& train, const CtganConfig& config,
    const AblationFlags& flags, uint64_t seed, TrainingObserver* observer) {
  RETURN_IF_ERROR(ValidateConfig(config));
  if (train.num_rows() < 2) {
    return absl::FailedPreconditionError("ctgan needs at least 2 rows");
  }
  std::unique_ptr<CtganModel> model(new CtganModel());
  model->config_ = config;
  model->flags_ = flags;
  if (flags.uni_trans) {
    ASSIGN_OR_RETURN(model->transformer_,
                     DataTransformer::FitUniform(train.schema(),
                                                 config.uniform_bins));
  } else {
    ASSIGN_OR_RETURN(model->transformer_,
                     DataTransformer::FitGaussianMixture(
                         train, config.gmm_components,
                         DeriveSeed(seed, kTransformStream)));
  }
  CtganTrainer trainer(*model, train, seed, observer);
  RETURN_IF_ERROR(trainer.Initialize(seed));
  RETURN_IF_ERROR(trainer.RunStandard());
  return model;
}

absl::StatusOr<std::unique_ptr<CtganModel>> CtganModel::FitPrivate(
    const DataTable& train, const CtganConfig& config,
    const PrivacyTarget& privacy, uint64_t seed, TrainingObserver* observer) {
  RETURN_IF_ERROR(ValidateConfig(config));
  if (train.num_rows() < 2) {
    return absl::FailedPreconditionError("dp-ctgan needs at least 2 rows");
  }
  if (!(privacy.clip_norm > 0.0) || !(privacy.delta > 0.0) ||
      !(privacy.delta < 1.0) || !(privacy.epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        "privacy target needs epsilon > 0, 0 < delta < 1 and clip norm > 0");
  }
  std::unique_ptr<CtganModel> model(new CtganModel());
  model->config_ = config;
  ASSIGN_OR_RETURN(model->transformer_,
                   DataTransformer::FitUniform(train.schema(),
                                               config.uniform_bins));
  CtganTrainer trainer(*model, train, seed, observer);
  RETURN_IF_ERROR(trainer.Initialize(seed));
  RETURN_IF_ERROR(trainer.RunPrivate(privacy));
  ASSIGN_OR_RETURN(model->sampling_conditions_,
                   model->EstimateConditionMarginals(seed));
  return model;
}

absl::StatusOr<DataTable> CtganModel::Sample(int n, uint64_t seed) const {
  RETURN_IF_ERROR(ValidateSampleCount(n));
  Rng rng = MakeRng(seed);
  Eigen::MatrixXd encoded(n, transformer_.output_dim());
  for (const auto& [begin, end] : Chunks(n, kSampleChunk)) {
    const std::vector<Condition> conds =
        sampling_conditions_.DrawBatch(end - begin, rng);
    ASSIGN_OR_RETURN(Eigen::MatrixXd chunk,
                     GenerateEncoded(space_.OneHot(conds), rng));
    encoded.middleRows(begin, end - begin) = chunk;
  }
  return transformer_.Decode(encoded);
}

nlohmann::json CtganModel::ToJson() const {
  nlohmann::json json = {
      {"config", config_.ToJson()},
      {"ablation", flags_.Name()},
      {"transformer", transformer_.ToJson()},
      {"generator", nn::ParamVectorToJson(generator_)},
      {"discriminator", nn::ParamVectorToJson(discriminator_)},
      {"sampling_conditions", sampling_conditions_.ToJson()},
      {"training_log", log_.ToJson()}};
  if (ledger_.has_value()) json["ledger"] = DpLedgerToJson(*ledger_);
  return json;
}

absl::StatusOr<std::unique_ptr<CtganModel>> CtganModel::FromJson(
    const TableSchema& schema, const nlohmann::json& json) {
  for (const char* key : {"config", "ablation", "transformer", "generator",
                          "discriminator", "sampling_conditions"}) {
    if (!json.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("ctgan state is missing '%s'", key));
    }
  }
  std::unique_ptr<CtganModel> model(new CtganModel());
  ASSIGN_OR_RETURN(model->config_, CtganConfig::FromJson(json["config"]));
  ASSIGN_OR_RETURN(model->flags_,
                   AblationFlags::Parse(json["ablation"].get<std::string>()));
  ASSIGN_OR_RETURN(model->transformer_,
                   DataTransformer::FromJson(json["transformer"]));
  if (!(model->transformer_.schema() == schema)) {
    return absl::InvalidArgumentError("ctgan transformer schema mismatch");
  }
  RETURN_IF_ERROR(model->BuildNetworks());
  ASSIGN_OR_RETURN(model->generator_,
                   nn::ParamVectorFromJson(json["generator"]));
  ASSIGN_OR_RETURN(model->discriminator_,
                   nn::ParamVectorFromJson(json["discriminator"]));
  if (!(model->generator_.layout == model->generator_layout_) ||
      !(model->discriminator_.layout == model->discriminator_layout_)) {
    return absl::InvalidArgumentError("ctgan parameters do not match config");
  }
  ASSIGN_OR_RETURN(model->sampling_conditions_,
                   ConditionSampler::FromJson(schema,
                                              json["sampling_conditions"]));
  if (json.contains("ledger")) {
    ASSIGN_OR_RETURN(model->ledger_, DpLedgerFromJson(json["ledger"]));
  }
  model->log_ = TrainingLog::FromJson(json.value("training_log",
                                                 nlohmann::json()));
  return model;
}

}  // namespace dpsynth
