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

#ifndef DPSYNTH_METRICS_PRIVACY_H_
#define DPSYNTH_METRICS_PRIVACY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"

namespace dpsynth {

// Mean over columns of |a - b| / range for continuous columns (zero for a
// zero-width range) and 0/1 mismatch for categorical columns.
double MixedDistance(std::span<const double> a, std::span<const double> b,
                     const TableSchema& schema);

// For each row of `queries`, the distance to its closest row in `pool`.
std::vector<double> ClosestDistances(const DataTable& queries,
                                     const DataTable& pool);

// Median with the two middle values averaged for even counts.
double Median(std::vector<double> values);

// Rows drawn uniformly from the schema: continuous uniform over the range,
// categorical uniform over the alphabet.
DataTable UniformRandomTable(const TableSchema& schema, int rows,
                             uint64_t seed);

struct DcrBaseline {
  double score = 0.0;            // min(1, m_syn / m_ran)
  double median_synthetic = 0.0;  // m_syn
  double median_random = 0.0;     // m_ran
};

// Closest-record distances of the synthetic rows relative to those of an
// equally sized uniform-random table.
absl::StatusOr<DcrBaseline> ComputeDcrBaseline(const DataTable& train,
                                               const DataTable& synth,
                                               uint64_t seed);

// f = share of synthetic rows strictly closer to `train` than to
// `holdout` (ties count one half); score = min(1, 2 (1 - f)).
absl::StatusOr<double> ComputeDcrOverfit(const DataTable& train,
                                         const DataTable& holdout,
                                         const DataTable& synth);

struct PrivacyReport {
  double dcr_baseline = 0.0;
  double dcr_overfit = 0.0;
  double median_synthetic = 0.0;
  double median_random = 0.0;
};

absl::StatusOr<PrivacyReport> EvaluatePrivacy(const DataTable& train,
                                              const DataTable& holdout,
                                              const DataTable& synth,
                                              uint64_t seed);

}  // namespace dpsynth

#endif  // DPSYNTH_METRICS_PRIVACY_H_
