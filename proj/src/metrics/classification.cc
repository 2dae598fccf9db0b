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

#include "dpsynth/metrics/classification.h"

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"

namespace dpsynth {

absl::StatusOr<ConfusionCounts> Confusion(std::span<const int> truth,
                                          std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%d labels but %d predictions", truth.size(),
                        predicted.size()));
  }
  ConfusionCounts c;
  for (size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      return absl::InvalidArgumentError("labels must be 0 or 1");
    }
    if (t == 1) {
      ++(p == 1 ? c.tp : c.fn);
    } else {
      ++(p == 0 ? c.tn : c.fp);
    }
  }
  return c;
}

absl::StatusOr<double> BalancedAccuracy(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) {
    return absl::FailedPreconditionError(
        "balanced accuracy is undefined when a class is absent from the "
        "ground truth");
  }
  return 0.5 * (static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) +
                static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp));
}

absl::StatusOr<double> BalancedAccuracy(std::span<const int> truth,
                                        std::span<const int> predicted) {
  ASSIGN_OR_RETURN(ConfusionCounts c, Confusion(truth, predicted));
  return BalancedAccuracy(c);
}

}  // namespace dpsynth
