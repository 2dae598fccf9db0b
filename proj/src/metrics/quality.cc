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

#include "dpsynth/metrics/quality.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/data/sampling.h"
#include "dpsynth/transforms/uniform_binner.h"

namespace dpsynth {
namespace {

absl::Status CheckComparable(const DataTable& real, const DataTable& synth) {
  if (!(real.schema() == synth.schema())) {
    return absl::InvalidArgumentError("tables have different schemas");
  }
  if (real.empty() || synth.empty()) {
    return absl::InvalidArgumentError("quality metrics need non-empty tables");
  }
  return absl::OkStatus();
}

// Pearson correlation; nullopt for a constant column.
std::optional<double> Pearson(const std::vector<double>& a,
                              const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

bool IsConstant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

// Category code, or equal-width bin index for continuous columns.
std::vector<int> Discretize(const DataTable& t, int column,
                            const UniformBinner& binner) {
  std::vector<int> codes(t.num_rows());
  const bool categorical = t.schema().column(column).is_categorical();
  for (int r = 0; r < t.num_rows(); ++r) {
    codes[r] = categorical ? static_cast<int>(t.at(r, column))
                           : binner.Bin(column, t.at(r, column)).bin;
  }
  return codes;
}

int Cardinality(const TableSchema& schema, int column, int bins) {
  return schema.column(column).is_categorical()
             ? schema.column(column).num_categories()
             : bins;
}

std::vector<double> Contingency(const std::vector<int>& a,
                                const std::vector<int>& b, int b_size,
                                int cells) {
  std::vector<double> counts(cells, 0.0);
  for (size_t r = 0; r < a.size(); ++r) counts[a[r] * b_size + b[r]] += 1.0;
  return counts;
}

}  // namespace

double KsStatistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() || j < b.size()) {
    // Step both CDFs past the next distinct value.
    const double x = j == b.size() || (i < a.size() && a[i] <= b[j]) ? a[i]
                                                                      : b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    worst = std::max(worst, std::abs(i / na - j / nb));
  }
  return worst;
}

double TotalVariation(const std::vector<double>& a,
                      const std::vector<double>& b) {
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  double total = 0.0;
  for (size_t k = 0; k < a.size(); ++k) total += std::abs(a[k] / sa - b[k] / sb);
  return 0.5 * total;
}

absl::StatusOr<std::vector<double>> ColumnShapes(const DataTable& real,
                                                 const DataTable& synth) {
  RETURN_IF_ERROR(CheckComparable(real, synth));
  const TableSchema& schema = real.schema();
  std::vector<double> scores(schema.num_columns());
  for (int c = 0; c < schema.num_columns(); ++c) {
    const ColumnMeta& meta = schema.column(c);
    if (meta.is_categorical()) {
      std::vector<double> fr(meta.num_categories(), 0.0);
      std::vector<double> fs(meta.num_categories(), 0.0);
      for (int r = 0; r < real.num_rows(); ++r) fr[static_cast<int>(real.at(r, c))] += 1;
      for (int r = 0; r < synth.num_rows(); ++r) fs[static_cast<int>(synth.at(r, c))] += 1;
      scores[c] = 1.0 - TotalVariation(fr, fs);
    } else {
      scores[c] = 1.0 - KsStatistic(real.ColumnValues(c), synth.ColumnValues(c));
    }
  }
  return scores;
}

absl::StatusOr<std::vector<PairTrend>> ColumnPairTrends(const DataTable& real,
                                                        const DataTable& synth,
                                                        int bins) {
  RETURN_IF_ERROR(CheckComparable(real, synth));
  const TableSchema& schema = real.schema();
  const int d = schema.num_columns();
  if (d < 2) {
    return absl::InvalidArgumentError("pair trends need at least two columns");
  }
  ASSIGN_OR_RETURN(UniformBinner binner, UniformBinner::Fit(schema, bins));
  std::vector<std::vector<int>> real_codes(d), synth_codes(d);
  for (int c = 0; c < d; ++c) {
    real_codes[c] = Discretize(real, c, binner);
    synth_codes[c] = Discretize(synth, c, binner);
  }
  std::vector<PairTrend> out;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      PairTrend pair{i, j, 0.0};
      if (!schema.column(i).is_categorical() &&
          !schema.column(j).is_categorical()) {
        const std::vector<double> ri = real.ColumnValues(i);
        const std::vector<double> rj = real.ColumnValues(j);
        const std::vector<double> si = synth.ColumnValues(i);
        const std::vector<double> sj = synth.ColumnValues(j);
        const bool real_constant = IsConstant(ri) || IsConstant(rj);
        const bool synth_constant = IsConstant(si) || IsConstant(sj);
        if (real_constant && synth_constant) {
          pair.score = 1.0;
        } else {
          const double rho_r = Pearson(ri, rj).value_or(0.0);
          const double rho_s = Pearson(si, sj).value_or(0.0);
          pair.score = 1.0 - std::abs(rho_r - rho_s) / 2.0;
        }
      } else {
        const int bi = Cardinality(schema, i, bins);
        const int bj = Cardinality(schema, j, bins);
        pair.score =
            1.0 - TotalVariation(
                      Contingency(real_codes[i], real_codes[j], bj, bi * bj),
                      Contingency(synth_codes[i], synth_codes[j], bj, bi * bj));
      }
      out.push_back(pair);
    }
  }
  return out;
}

absl::StatusOr<QualityReport> EvaluateQuality(const DataTable& real,
                                              const DataTable& synth) {
  QualityReport report;
  ASSIGN_OR_RETURN(report.column_shapes, ColumnShapes(real, synth));
  report.column_shape_mean =
      std::accumulate(report.column_shapes.begin(), report.column_shapes.end(),
                      0.0) /
      report.column_shapes.size();
  ASSIGN_OR_RETURN(report.pair_trends, ColumnPairTrends(real, synth));
  double total = 0.0;
  for (const PairTrend& p : report.pair_trends) total += p.score;
  report.pair_trend_mean = total / report.pair_trends.size();
  report.minority_fraction = MinorityFraction(synth);
  return report;
}

}  // namespace dpsynth
