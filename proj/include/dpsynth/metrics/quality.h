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

#ifndef DPSYNTH_METRICS_QUALITY_H_
#define DPSYNTH_METRICS_QUALITY_H_

#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"

namespace dpsynth {

inline constexpr int kPairTrendBins = 10;

struct PairTrend {
  int first = 0;
  int second = 0;
  double score = 0.0;
};

struct QualityReport {
  std::vector<double> column_shapes;  // by column
  double column_shape_mean = 0.0;
  std::vector<PairTrend> pair_trends;  // unordered pairs, i < j
  double pair_trend_mean = 0.0;
  double minority_fraction = 0.0;  // of the synthetic table, in percent
};

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double KsStatistic(std::vector<double> a, std::vector<double> b);

// Total-variation distance between two count vectors after normalizing
// each to sum 1.
double TotalVariation(const std::vector<double>& a,
                      const std::vector<double>& b);

// Per column: 1 - KS for continuous, 1 - TVD of category frequencies for
// categorical. Tables must share a schema and be non-empty.
absl::StatusOr<std::vector<double>> ColumnShapes(const DataTable& real,
                                                 const DataTable& synth);

// Per unordered pair: 1 - |rho_real - rho_synth| / 2 (Pearson) for two
// continuous columns, otherwise 1 - TVD of the joint contingency tables
// with continuous columns binned into `bins` equal-width range bins.
absl::StatusOr<std::vector<PairTrend>> ColumnPairTrends(
    const DataTable& real, const DataTable& synth, int bins = kPairTrendBins);

absl::StatusOr<QualityReport> EvaluateQuality(const DataTable& real,
                                              const DataTable& synth);

}  // namespace dpsynth

#endif  // DPSYNTH_METRICS_QUALITY_H_
