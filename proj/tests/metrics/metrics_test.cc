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

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpsynth/base/random.h"
#include "dpsynth/data/toy_data.h"
#include "dpsynth/metrics/classification.h"
#include "dpsynth/metrics/privacy.h"
#include "dpsynth/metrics/quality.h"
#include "gtest/gtest.h"
#include "testing/test_tables.h"

namespace dpsynth {
namespace {

constexpr double kExact = 1e-12;

// Continuous x in [0, 10] and a binary target c.
TableSchema MixedSchema() {
  return *TableSchema::Create({ColumnMeta::Continuous("x", 0, 10),
                               ColumnMeta::Categorical("c", {"a", "b"})},
                              "c");
}

DataTable Rows(const TableSchema& schema, std::vector<double> cells) {
  return *DataTable::Create(schema, std::move(cells));
}

TEST(BalancedAccuracyTest, ClosedFormExamples) {
  EXPECT_EQ(*BalancedAccuracy(ConfusionCounts{50, 50, 0, 0}), 1.0);
  EXPECT_EQ(*BalancedAccuracy(ConfusionCounts{0, 50, 0, 50}), 0.5);
  EXPECT_NEAR(*BalancedAccuracy(ConfusionCounts{30, 40, 20, 10}),
              0.5 * (30.0 / 40.0 + 40.0 / 60.0), kExact);
  EXPECT_NEAR(*BalancedAccuracy(ConfusionCounts{30, 40, 20, 10}),
              0.7083333333333333, kExact);
}

TEST(BalancedAccuracyTest, SwapInvariantAndUndefinedWithoutAClass) {
  const ConfusionCounts c{7, 11, 3, 5};
  const ConfusionCounts swapped{c.tn, c.tp, c.fn, c.fp};
  EXPECT_EQ(*BalancedAccuracy(c), *BalancedAccuracy(swapped));
  EXPECT_FALSE(BalancedAccuracy(ConfusionCounts{0, 10, 5, 0}).ok());
}

TEST(BalancedAccuracyTest, ConfusionFromLabels) {
  const std::vector<int> truth = {1, 1, 0, 0, 0};
  const std::vector<int> pred = {1, 0, 0, 1, 0};
  const ConfusionCounts c = *Confusion(truth, pred);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fn, 1);
  EXPECT_EQ(c.tn, 2);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.total(), 5);
  EXPECT_FALSE(Confusion(truth, std::vector<int>{1}).ok());
}

TEST(ColumnShapesTest, SixPointSamplesMatchHandEcdf) {
  const TableSchema schema = MixedSchema();
  const DataTable real =
      Rows(schema, {1, 0, 2, 0, 3, 0, 4, 0, 5, 0, 6, 0});
  const DataTable synth =
      Rows(schema, {3.5, 0, 4.5, 0, 5.5, 0, 6.5, 0, 7.5, 0, 8.5, 0});
  // At x = 3 the real ECDF is 3/6 and the synthetic one 0.
  const std::vector<double> shapes = *ColumnShapes(real, synth);
  EXPECT_NEAR(shapes[0], 0.5, kExact);
  EXPECT_NEAR(shapes[0], 1.0 - testing::KsStatistic(real.ColumnValues(0),
                                                    synth.ColumnValues(0)),
              kExact);
  EXPECT_NEAR(shapes[1], 1.0, kExact);
}

TEST(ColumnShapesTest, CategoricalTotalVariation) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Categorical("u", {"a", "b", "c"}),
       ColumnMeta::Categorical("t", {"n", "y"})},
      "t");
  const DataTable real = Rows(schema, {0, 0, 0, 0, 1, 0, 2, 0});
  const DataTable synth = Rows(schema, {1, 0, 1, 0, 1, 0, 1, 0});
  // Frequencies (1/2, 1/4, 1/4) vs (0, 1, 0): TVD = (1/2 + 3/4 + 1/4) / 2.
  EXPECT_NEAR((*ColumnShapes(real, synth))[0], 1.0 - 0.75, kExact);
  const DataTable disjoint = Rows(schema, {2, 0, 2, 0, 2, 0, 2, 0});
  EXPECT_NEAR((*ColumnShapes(Rows(schema, {0, 0, 1, 0}), disjoint))[0], 0.0,
              kExact);
}

TEST(ColumnShapesTest, KsAgreesWithBruteForceOnRandomSamples) {
  Rng rng = MakeRng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 7; ++i) a.push_back(UniformInt(rng, 0, 5));
    for (int i = 0; i < 9; ++i) b.push_back(UniformInt(rng, 0, 5));
    EXPECT_NEAR(KsStatistic(a, b), testing::KsStatistic(a, b), kExact);
  }
}

TEST(PairTrendsTest, ContingencyHandExample) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Categorical("u", {"0", "1"}),
       ColumnMeta::Categorical("v", {"0", "1"})},
      "v");
  const DataTable real = Rows(schema, {0, 0, 0, 1, 1, 1, 1, 1});
  const DataTable synth = Rows(schema, {0, 0, 0, 0, 1, 1, 1, 0});
  // Joint frequencies (1/4, 1/4, 0, 1/2) vs (1/2, 0, 1/4, 1/4): TVD = 1/2.
  const std::vector<PairTrend> trends = *ColumnPairTrends(real, synth);
  ASSERT_EQ(trends.size(), 1u);
  EXPECT_NEAR(trends[0].score, 0.5, kExact);
}

TEST(PairTrendsTest, OppositeCorrelationScoresZero) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Continuous("x", 0, 10), ColumnMeta::Continuous("y", 0, 10),
       ColumnMeta::Categorical("t", {"a", "b"})},
      "t");
  const DataTable real = Rows(schema, {1, 1, 0, 2, 2, 0, 3, 3, 0});
  const DataTable synth = Rows(schema, {1, 3, 0, 2, 2, 0, 3, 1, 0});
  EXPECT_NEAR((*ColumnPairTrends(real, synth))[0].score, 0.0, kExact);
}

TEST(PairTrendsTest, ConstantColumnConventions) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Continuous("x", 0, 10), ColumnMeta::Continuous("y", 0, 10),
       ColumnMeta::Categorical("t", {"a", "b"})},
      "t");
  const DataTable constant = Rows(schema, {1, 5, 0, 2, 5, 0, 3, 5, 0});
  EXPECT_NEAR((*ColumnPairTrends(constant, constant))[0].score, 1.0, kExact);
  // Constant real pair against a perfectly correlated synthetic pair: the
  // real correlation counts as 0.
  const DataTable synth = Rows(schema, {1, 1, 0, 2, 2, 0, 3, 3, 0});
  EXPECT_NEAR((*ColumnPairTrends(constant, synth))[0].score, 0.5, kExact);
}

TEST(PairTrendsTest, NumericColumnIsBinnedAgainstCategorical) {
  const TableSchema schema = MixedSchema();
  const DataTable real = Rows(schema, {0.5, 0, 9.5, 1});
  const DataTable synth = Rows(schema, {9.5, 0, 0.5, 1});
  EXPECT_NEAR((*ColumnPairTrends(real, synth))[0].score, 0.0, kExact);
  const DataTable same_bins = Rows(schema, {0.7, 0, 9.1, 1});
  EXPECT_NEAR((*ColumnPairTrends(real, same_bins))[0].score, 1.0, kExact);
}

TEST(QualityTest, IdentityScoresOne) {
  const DataTable t = MakeToyDataset({.rows = 60}, 5);
  const QualityReport report = *EvaluateQuality(t, t);
  EXPECT_NEAR(report.column_shape_mean, 1.0, kExact);
  EXPECT_NEAR(report.pair_trend_mean, 1.0, kExact);
  for (double s : report.column_shapes) EXPECT_EQ(s, 1.0);
}

TEST(QualityTest, SchemaMismatchIsAnError) {
  const DataTable a = MakeToyDataset({.rows = 10}, 1);
  EXPECT_FALSE(ColumnShapes(a, testing::LabelOnlyTable(2, 2)).ok());
}

TEST(MixedDistanceTest, HandExample) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Continuous("x", 0, 4), ColumnMeta::Continuous("y", -1, 1),
       ColumnMeta::Categorical("c", {"p", "q", "r"}),
       ColumnMeta::Categorical("t", {"n", "y"})},
      "t");
  const std::vector<double> a = {1, 0, 0, 1};
  const std::vector<double> b = {3, 1, 2, 1};
  EXPECT_NEAR(MixedDistance(a, b, schema), (0.5 + 0.5 + 1.0 + 0.0) / 4.0,
              kExact);
  EXPECT_EQ(MixedDistance(a, a, schema), 0.0);
}

TEST(MixedDistanceTest, AllCategoricalMismatchIsOne) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Categorical("u", {"0", "1"}),
       ColumnMeta::Categorical("v", {"0", "1"})},
      "v");
  EXPECT_EQ(MixedDistance(std::vector<double>{0, 1},
                          std::vector<double>{1, 0}, schema),
            1.0);
}

// All-pairs oracle written independently of the library scan.
double OracleMedianDcr(const DataTable& queries, const DataTable& pool) {
  const TableSchema& s = queries.schema();
  std::vector<double> best;
  for (int q = 0; q < queries.num_rows(); ++q) {
    double m = 1e300;
    for (int p = 0; p < pool.num_rows(); ++p) {
      double d = 0.0;
      for (int c = 0; c < s.num_columns(); ++c) {
        const ColumnMeta& meta = s.column(c);
        d += meta.is_categorical()
                 ? (queries.at(q, c) != pool.at(p, c))
                 : std::abs(queries.at(q, c) - pool.at(p, c)) /
                       (meta.range_max - meta.range_min);
      }
      m = std::min(m, d / s.num_columns());
    }
    best.push_back(m);
  }
  std::sort(best.begin(), best.end());
  const size_t n = best.size();
  return n % 2 ? best[n / 2] : (best[n / 2 - 1] + best[n / 2]) / 2;
}

TEST(DcrBaselineTest, FiveRowInstanceMatchesBruteForce) {
  const TableSchema schema = MixedSchema();
  const DataTable train = Rows(schema, {1, 0, 4, 1, 7, 1, 9, 0, 2, 1});
  const DataTable synth = Rows(schema, {1.5, 0, 4, 0, 8, 1, 6, 1, 0, 0});
  const DcrBaseline got = *ComputeDcrBaseline(train, synth, 17);
  const double m_syn = OracleMedianDcr(synth, train);
  const double m_ran =
      OracleMedianDcr(UniformRandomTable(schema, 5, 17), train);
  EXPECT_NEAR(got.median_synthetic, m_syn, kExact);
  EXPECT_NEAR(got.median_random, m_ran, kExact);
  EXPECT_NEAR(got.score, std::min(1.0, m_syn / m_ran), kExact);
}

TEST(DcrBaselineTest, CopyOfTrainScoresZero) {
  const DataTable train = MakeToyDataset({.rows = 40}, 6);
  EXPECT_EQ(ComputeDcrBaseline(train, train, 1)->score, 0.0);
}

TEST(DcrBaselineTest, UniformBaselineScoresNearOne) {
  const DataTable train = MakeToyDataset({.rows = 200}, 7);
  const DataTable random = UniformRandomTable(train.schema(), 200, 99);
  EXPECT_GT(ComputeDcrBaseline(train, random, 1)->score, 0.9);
}

TEST(DcrBaselineTest, InvariantUnderAffineRescaling) {
  const TableSchema schema = MixedSchema();
  const DataTable train = Rows(schema, {1, 0, 4, 1, 7, 1});
  const DataTable synth = Rows(schema, {2, 0, 5, 1, 9, 1});
  TableSchema scaled_schema = *TableSchema::Create(
      {ColumnMeta::Continuous("x", 5, 35),
       ColumnMeta::Categorical("c", {"a", "b"})},
      "c");
  auto rescale = [&](const DataTable& t) {
    std::vector<double> cells = t.cells();
    for (size_t i = 0; i < cells.size(); i += 2) cells[i] = 3 * cells[i] + 5;
    return Rows(scaled_schema, cells);
  };
  EXPECT_NEAR(ComputeDcrBaseline(train, synth, 4)->score,
              ComputeDcrBaseline(rescale(train), rescale(synth), 4)->score,
              kExact);
}

TEST(DcrOverfitTest, FourRowHandInstance) {
  TableSchema schema = *TableSchema::Create(
      {ColumnMeta::Continuous("x", 0, 10),
       ColumnMeta::Categorical("c", {"a", "b"})},
      "c");
  const DataTable train = Rows(schema, {0, 0, 10, 0});
  const DataTable holdout = Rows(schema, {5, 0, 5, 1});
  // Closer to train, closer to holdout, tie, closer to train: f = 2.5 / 4.
  const DataTable synth = Rows(schema, {1, 0, 5, 1, 2.5, 0, 9, 0});
  EXPECT_NEAR(*ComputeDcrOverfit(train, holdout, synth), 2.0 * (1 - 0.625),
              kExact);
}

TEST(DcrOverfitTest, CopyOfTrainScoresZeroAndEmptyHoldoutFails) {
  const DataTable train = MakeToyDataset({.rows = 40}, 8);
  const DataTable holdout = MakeToyDataset({.rows = 40}, 9);
  EXPECT_EQ(*ComputeDcrOverfit(train, holdout, train), 0.0);
  EXPECT_FALSE(
      ComputeDcrOverfit(train, train.SelectRows(std::vector<int>{}), train)
          .ok());
}

TEST(DcrOverfitTest, IndependentSynthScoresNearOne) {
  const ToyDatasetSpec spec{.rows = 300};
  const DataTable train = MakeToyDataset(spec, 10);
  const DataTable holdout = MakeToyDataset(spec, 11);
  const DataTable synth = MakeToyDataset(spec, 12);
  EXPECT_GT(*ComputeDcrOverfit(train, holdout, synth), 0.85);
}

}  // namespace
}  // namespace dpsynth
