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

#ifndef DPSYNTH_METRICS_CLASSIFICATION_H_
#define DPSYNTH_METRICS_CLASSIFICATION_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"

namespace dpsynth {

// Binary confusion counts with label 1 as the positive class.
struct ConfusionCounts {
  int64_t tp = 0;
  int64_t tn = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  int64_t total() const { return tp + tn + fp + fn; }
};

// Labels must be 0 or 1 and the spans equally long.
absl::StatusOr<ConfusionCounts> Confusion(std::span<const int> truth,
                                          std::span<const int> predicted);

// (TP / (TP + FN) + TN / (TN + FP)) / 2. Undefined, and an error, when the
// ground truth lacks a class.
absl::StatusOr<double> BalancedAccuracy(const ConfusionCounts& counts);
absl::StatusOr<double> BalancedAccuracy(std::span<const int> truth,
                                        std::span<const int> predicted);

}  // namespace dpsynth

#endif  // DPSYNTH_METRICS_CLASSIFICATION_H_
