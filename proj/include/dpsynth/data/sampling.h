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

#ifndef DPSYNTH_DATA_SAMPLING_H_
#define DPSYNTH_DATA_SAMPLING_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/base/random.h"
#include "dpsynth/data/table.h"

namespace dpsynth {

struct SplitBundle {
  DataTable train;
  DataTable validation;
  DataTable test;
};

// Stratified 8:1:1 split. Per-class quotas use largest-remainder rounding so
// every split is within one row of its exact share for each class. Both
// classes need at least 10 rows.
absl::StatusOr<SplitBundle> StratifiedSplit(const DataTable& data,
                                            uint64_t seed);

// Largest-remainder apportionment of `total` into parts proportional to
// `weights`. Ties go to the earlier part.
std::vector<int> LargestRemainderQuotas(int total,
                                        const std::vector<double>& weights);

// Each index in [0, n) is kept independently with probability q.
std::vector<int> PoissonSampleIndices(int n, double q, Rng& rng);

absl::StatusOr<DataTable> PoissonSample(const DataTable& data, double q,
                                        uint64_t seed);

// Keeps every minority row and an equal number of majority rows drawn
// without replacement. Row order of the input is preserved.
absl::StatusOr<DataTable> DownsampleBalanced(const DataTable& data,
                                             uint64_t seed);

// 100 * (rows of the rarer class) / rows. Zero for an empty table.
double MinorityFraction(const DataTable& data);

}  // namespace dpsynth

#endif  // DPSYNTH_DATA_SAMPLING_H_
