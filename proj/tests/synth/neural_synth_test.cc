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

#include <cmath>
#include <vector>

#include "dpsynth/data/sampling.h"
#include "dpsynth/data/toy_data.h"
#include "dpsynth/synth/ctgan.h"
#include "dpsynth/synth/synthesizer.h"
#include "dpsynth/synth/tvae.h"
#include "gtest/gtest.h"
#include "testing/test_tables.h"

namespace dpsynth {
namespace {

using testing::CellsFitSchema;

CtganConfig TinyCtgan() {
  CtganConfig c;
  c.epochs = 2;
  c.batch_size = 64;
  c.embedding_dim = 8;
  c.generator_dims = {16};
  c.discriminator_dims = {16};
  c.gmm_components = 3;
  c.uniform_bins = 4;
  c.chunk_rows = 32;
  return c;
}

TvaeConfig TinyTvae() {
  TvaeConfig c;
  c.epochs = 2;
  c.batch_size = 64;
  c.embedding_dim = 8;
  c.encoder_dims = {16};
  c.decoder_dims = {16};
  c.gmm_components = 3;
  c.uniform_bins = 4;
  c.chunk_rows = 32;
  return c;
}

DataTable SmallTable(int rows, uint64_t seed) {
  return MakeToyDataset({.rows = rows, .categorical_features = 2,
                         .continuous_features = 2, .max_categories = 3},
                        seed);
}

// Records every training step.
class Recorder : public TrainingObserver {
 public:
  void OnDiscriminatorStep(const DiscriminatorStepInfo& info) override {
    d_steps.push_back(info);
  }
  void OnGeneratorStep(const GeneratorStepInfo& info) override {
    g_steps.push_back(info);
  }
  std::vector<DiscriminatorStepInfo> d_steps;
  std::vector<GeneratorStepInfo> g_steps;
};

TEST(AblationFlagsTest, NameRoundTrips) {
  AblationFlags flags;
  EXPECT_EQ(flags.Name(), "base");
  flags.no_penalty = flags.grad_clip = true;
  EXPECT_EQ(flags.Name(), "no_penalty+grad_clip");
  EXPECT_EQ(*AblationFlags::Parse(flags.Name()), flags);
  EXPECT_FALSE(AblationFlags::Parse("nope").ok());
}

TEST(CtganTest, SamplesExactCountOfValidRows) {
  const DataTable train = SmallTable(200, 1);
  auto model = CtganModel::Fit(train, TinyCtgan(), {}, 3);
  ASSERT_TRUE(model.ok()) << model.status();
  auto synth = (*model)->Sample(123, 4);
  ASSERT_TRUE(synth.ok());
  EXPECT_EQ(synth->num_rows(), 123);
  EXPECT_EQ(synth->schema(), train.schema());
  EXPECT_TRUE(CellsFitSchema(*synth));
  EXPECT_EQ((*model)->kind(), SynthKind::kCtgan);
  EXPECT_FALSE((*model)->ledger().has_value());
  EXPECT_EQ((*model)->training_log().rows.size(), 2u);
}

TEST(CtganTest, RealRowsMatchTheirConditions) {
  const DataTable train = SmallTable(200, 2);
  Recorder recorder;
  ASSERT_TRUE(CtganModel::Fit(train, TinyCtgan(), {}, 3, &recorder).ok());
  ASSERT_FALSE(recorder.d_steps.empty());
  for (const DiscriminatorStepInfo& step : recorder.d_steps) {
    ASSERT_EQ(step.real_rows.size(), step.conditions.size());
    for (size_t i = 0; i < step.real_rows.size(); ++i) {
      EXPECT_EQ(train.at(step.real_rows[i], step.conditions[i].column),
                step.conditions[i].value);
    }
  }
}

TEST(CtganTest, TrainingIsDeterministic) {
  const DataTable train = SmallTable(150, 3);
  auto a = CtganModel::Fit(train, TinyCtgan(), {}, 9);
  auto b = CtganModel::Fit(train, TinyCtgan(), {}, 9);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ((*a)->generator_params().values, (*b)->generator_params().values);
  EXPECT_EQ(*(*a)->Sample(50, 1), *(*b)->Sample(50, 1));
  EXPECT_NE(*(*a)->Sample(50, 1), *(*a)->Sample(50, 2));
}

TEST(CtganTest, AblationsTrain) {
  const DataTable train = SmallTable(150, 4);
  for (const char* name : {"uni_samp", "batch_samp", "no_penalty",
                           "uni_trans", "grad_clip"}) {
    auto model =
        CtganModel::Fit(train, TinyCtgan(), *AblationFlags::Parse(name), 1);
    ASSERT_TRUE(model.ok()) << name << ": " << model.status();
    EXPECT_TRUE(CellsFitSchema(*(*model)->Sample(40, 1))) << name;
  }
}

TEST(DpCtganTest, StructuralPrivacyInvariants) {
  const DataTable train = SmallTable(300, 5);
  PrivacyTarget privacy{.epsilon = 1.0, .delta = 1e-5, .clip_norm = 1.0};
  Recorder recorder;
  auto model = CtganModel::FitPrivate(train, TinyCtgan(), privacy, 7,
                                      &recorder);
  ASSERT_TRUE(model.ok()) << model.status();
  const DpLedger ledger = *(*model)->ledger();
  EXPECT_EQ(ledger.steps, static_cast<int64_t>(recorder.d_steps.size()));
  EXPECT_EQ(ledger.steps, 2 * 5);  // 2 epochs of ceil(300 / 64) lots
  EXPECT_GT(ledger.sigma, 0.0);
  EXPECT_LE(ledger.achieved_epsilon, 1.0);
  for (const DiscriminatorStepInfo& step : recorder.d_steps) {
    EXPECT_TRUE(step.noised);
    EXPECT_EQ(step.clipped_norms.size(), step.real_rows.size());
    for (double norm : step.clipped_norms) EXPECT_LE(norm, 1.0 + 1e-9);
    for (size_t i = 0; i < step.real_rows.size(); ++i) {
      EXPECT_EQ(train.at(step.real_rows[i], step.conditions[i].column),
                step.conditions[i].value);
    }
  }
  ASSERT_EQ(recorder.g_steps.size(), recorder.d_steps.size());
  for (const GeneratorStepInfo& step : recorder.g_steps) {
    EXPECT_FALSE(step.touched_private_data);
  }
  EXPECT_EQ((*model)->kind(), SynthKind::kDpCtgan);
  EXPECT_TRUE(CellsFitSchema(*(*model)->Sample(100, 1)));
}

TEST(DpCtganTest, InfiniteEpsilonDisablesNoise) {
  const DataTable train = SmallTable(120, 6);
  Recorder recorder;
  auto model = CtganModel::FitPrivate(train, TinyCtgan(), {}, 1, &recorder);
  ASSERT_TRUE(model.ok());
  EXPECT_EQ((*model)->ledger()->sigma, 0.0);
  EXPECT_EQ((*model)->ledger()->achieved_epsilon, kInfiniteEpsilon);
  for (const auto& step : recorder.d_steps) EXPECT_FALSE(step.noised);
}

TEST(DpCtganTest, StepScheduleFollowsTableSizeUnlessFixed) {
  // 128 rows at lots of 64 is an exact multiple: one more row adds a step.
  const DataTable train = SmallTable(129, 6);
  std::vector<int> rows(128);
  for (int i = 0; i < 128; ++i) rows[i] = i;
  const DataTable smaller = train.SelectRows(rows);
  auto steps = [](const DataTable& t, const CtganConfig& c) {
    auto model = CtganModel::FitPrivate(t, c, {.epsilon = 1.0}, 3);
    return model.ok() ? (*model)->ledger()->steps : -1;
  };
  EXPECT_EQ(steps(smaller, TinyCtgan()), 2 * 2);
  EXPECT_EQ(steps(train, TinyCtgan()), 2 * 3);
  CtganConfig fixed = TinyCtgan();
  fixed.dp_steps_per_epoch = 2;
  EXPECT_EQ(steps(smaller, fixed), 2 * 2);
  EXPECT_EQ(steps(train, fixed), 2 * 2);
  fixed.dp_steps_per_epoch = -1;
  EXPECT_FALSE(CtganConfig::FromJson(fixed.ToJson()).ok());
}

TEST(DpTvaeTest, FixedStepSchedule) {
  TvaeConfig config = TinyTvae();
  config.dp_steps_per_epoch = 3;
  auto model = TvaeModel::FitPrivate(SmallTable(129, 7), config,
                                     {.epsilon = 2.0}, 5);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_EQ((*model)->ledger()->steps, 2 * 3);
  auto round_trip = TvaeConfig::FromJson(config.ToJson());
  ASSERT_TRUE(round_trip.ok());
  EXPECT_EQ(round_trip->dp_steps_per_epoch, 3);
}

TEST(DpCtganTest, SamplingConditionsAreDistributions) {
  const DataTable train = SmallTable(200, 7);
  auto model = CtganModel::FitPrivate(train, TinyCtgan(), {}, 2);
  ASSERT_TRUE(model.ok());
  const ConditionSampler& conds = (*model)->sampling_conditions();
  for (size_t s = 0; s < conds.space().columns().size(); ++s) {
    double total = 0.0;
    for (double p : conds.probabilities(s)) {
      EXPECT_GT(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(DpCtganTest, RejectsBadPrivacyTarget) {
  const DataTable train = SmallTable(50, 8);
  EXPECT_FALSE(
      CtganModel::FitPrivate(train, TinyCtgan(), {.clip_norm = 0.0}, 1).ok());
  EXPECT_FALSE(
      CtganModel::FitPrivate(train, TinyCtgan(), {.delta = 1.0}, 1).ok());
}

TEST(CheckpointTest, NeuralModelsRoundTripBitExact) {
  const DataTable train = SmallTable(150, 9);
  std::vector<std::unique_ptr<Synthesizer>> models;
  models.push_back(*CtganModel::Fit(train, TinyCtgan(), {}, 1));
  models.push_back(
      *CtganModel::FitPrivate(train, TinyCtgan(), {.epsilon = 5.0}, 1));
  models.push_back(*TvaeModel::Fit(train, TinyTvae(), 1));
  models.push_back(
      *TvaeModel::FitPrivate(train, TinyTvae(), {.epsilon = 5.0}, 1));
  for (const auto& model : models) {
    const std::string text = CheckpointToJson(*model).dump();
    auto restored = CheckpointFromJson(nlohmann::json::parse(text));
    ASSERT_TRUE(restored.ok()) << restored.status();
    EXPECT_EQ((*restored)->kind(), model->kind());
    EXPECT_EQ(CheckpointToJson(**restored).dump(), text);
    EXPECT_EQ(*(*restored)->Sample(80, 5), *model->Sample(80, 5));
  }
}

TEST(CheckpointTest, RejectsForeignJson) {
  EXPECT_FALSE(CheckpointFromJson(nlohmann::json{{"format", "x"}}).ok());
  EXPECT_FALSE(LoadCheckpoint("/nonexistent/model.json").ok());
}

TEST(TvaeTest, LossDropsByHalf) {
  const DataTable train = SmallTable(400, 10);
  TvaeConfig config = TinyTvae();
  config.epochs = 40;
  auto model = TvaeModel::Fit(train, config, 2);
  ASSERT_TRUE(model.ok()) << model.status();
  const auto& rows = (*model)->training_log().rows;
  ASSERT_EQ(rows.size(), 40u);
  EXPECT_LT(rows.back()[1], 0.5 * rows.front()[1]);
  EXPECT_TRUE(CellsFitSchema(*(*model)->Sample(100, 3)));
}

TEST(TvaeTest, DeterministicAndSeedSensitive) {
  const DataTable train = SmallTable(120, 11);
  auto a = TvaeModel::Fit(train, TinyTvae(), 4);
  auto b = TvaeModel::Fit(train, TinyTvae(), 4);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(*(*a)->Sample(60, 1), *(*b)->Sample(60, 1));
  EXPECT_NE(*(*a)->Sample(60, 1), *(*a)->Sample(60, 2));
}

TEST(DpTvaeTest, LedgerAndPerSampleTraining) {
  const DataTable train = SmallTable(200, 12);
  auto model = TvaeModel::FitPrivate(train, TinyTvae(), {.epsilon = 2.0}, 5);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_EQ((*model)->kind(), SynthKind::kDpTvae);
  EXPECT_EQ((*model)->ledger()->steps, 2 * 4);
  EXPECT_LE((*model)->ledger()->achieved_epsilon, 2.0);
  auto inf = TvaeModel::FitPrivate(train, TinyTvae(), {}, 5);
  ASSERT_TRUE(inf.ok());
  EXPECT_EQ((*inf)->ledger()->sigma, 0.0);
  EXPECT_EQ((*inf)->ledger()->achieved_epsilon, kInfiniteEpsilon);
}

}  // namespace
}  // namespace dpsynth
