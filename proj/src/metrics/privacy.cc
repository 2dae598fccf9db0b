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

#include "dpsynth/metrics/privacy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dpsynth/base/random.h"
#include "dpsynth/base/status_macros.h"

namespace dpsynth {
namespace {

absl::Status CheckPair(const DataTable& a, const DataTable& b) {
  if (!(a.schema() == b.schema())) {
    return absl::InvalidArgumentError("tables have different schemas");
  }
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("distance metrics need non-empty tables");
  }
  return absl::OkStatus();
}

}  // namespace

double MixedDistance(std::span<const double> a, std::span<const double> b,
                     const TableSchema& schema) {
  const int d = schema.num_columns();
  double total = 0.0;
  for (int c = 0; c < d; ++c) {
    const ColumnMeta& meta = schema.column(c);
    if (meta.is_categorical()) {
      total += a[c] == b[c] ? 0.0 : 1.0;
    } else if (meta.range_width() > 0.0) {
      total += std::abs(a[c] - b[c]) / meta.range_width();
    }
  }
  return total / d;
}

std::vector<double> ClosestDistances(const DataTable& queries,
                                     const DataTable& pool) {
  std::vector<double> out(queries.num_rows(),
                          std::numeric_limits<double>::infinity());
  for (int q = 0; q < queries.num_rows(); ++q) {
    const auto row = queries.row(q);
    for (int p = 0; p < pool.num_rows(); ++p) {
      out[q] = std::min(out[q], MixedDistance(row, pool.row(p), queries.schema()));
    }
  }
  return out;
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

DataTable UniformRandomTable(const TableSchema& schema, int rows,
                             uint64_t seed) {
  Rng rng = MakeRng(seed);
  const int d = schema.num_columns();
  std::vector<double> cells(static_cast<size_t>(rows) * d);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < d; ++c) {
      const ColumnMeta& meta = schema.column(c);
      cells[static_cast<size_t>(r) * d + c] =
          meta.is_categorical()
              ? UniformInt(rng, 0, meta.num_categories() - 1)
              : meta.range_min + UniformDouble(rng) * meta.range_width();
    }
  }
  return *DataTable::Create(schema, std::move(cells));
}

absl::StatusOr<DcrBaseline> ComputeDcrBaseline(const DataTable& train,
                                               const DataTable& synth,
                                               uint64_t seed) {
  RETURN_IF_ERROR(CheckPair(train, synth));
  DcrBaseline out;
  out.median_synthetic = Median(ClosestDistances(synth, train));
  const DataTable random =
      UniformRandomTable(train.schema(), synth.num_rows(), seed);
  out.median_random = Median(ClosestDistances(random, train));
  if (!(out.median_random > 0.0)) {
    std::fprintf(stderr,
                 "warning: uniform baseline has zero closest-record distance; "
                 "dcr_baseline set to 0\n");
    out.score = 0.0;
    return out;
  }
  out.score = std::min(1.0, out.median_synthetic / out.median_random);
  return out;
}

absl::StatusOr<double> ComputeDcrOverfit(const DataTable& train,
                                         const DataTable& holdout,
                                         const DataTable& synth) {
  RETURN_IF_ERROR(CheckPair(train, synth));
  if (holdout.empty()) {
    return absl::InvalidArgumentError("dcr_overfit needs a non-empty holdout");
  }
  RETURN_IF_ERROR(CheckPair(holdout, synth));
  const std::vector<double> to_train = ClosestDistances(synth, train);
  const std::vector<double> to_holdout = ClosestDistances(synth, holdout);
  double closer = 0.0;
  for (size_t i = 0; i < to_train.size(); ++i) {
    if (to_train[i] < to_holdout[i]) {
      closer += 1.0;
    } else if (to_train[i] == to_holdout[i]) {
      closer += 0.5;
    }
  }
  const double f = closer / static_cast<double>(to_train.size());
  return std::min(1.0, 2.0 * (1.0 - f));
}

absl::StatusOr<PrivacyReport> EvaluatePrivacy(const DataTable& train,
                                              const DataTable& holdout,
                                              const DataTable& synth,
                                              uint64_t seed) {
  PrivacyReport report;
  ASSIGN_OR_RETURN(DcrBaseline baseline, ComputeDcrBaseline(train, synth, seed));
  report.dcr_baseline = baseline.score;
  report.median_synthetic = baseline.median_synthetic;
  report.median_random = baseline.median_random;
  ASSIGN_OR_RETURN(report.dcr_overfit, ComputeDcrOverfit(train, holdout, synth));
  return report;
}

}  // namespace dpsynth
