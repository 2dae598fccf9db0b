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

#ifndef DPSYNTH_TRANSFORMS_HISTOGRAM_FEATURIZER_H_
#define DPSYNTH_TRANSFORMS_HISTOGRAM_FEATURIZER_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "dpsynth/transforms/data_transformer.h"

namespace dpsynth {

// Summarizes a whole table as concatenated per-attribute marginal
// frequencies. Continuous attributes are binned by the mixture mode each
// value is most likely under, with mixtures fitted on the attacker's
// reference data only.
class HistogramFeaturizer {
 public:
  static absl::StatusOr<HistogramFeaturizer> Fit(const DataTable& reference,
                                                 int components, uint64_t seed);

  int feature_dim() const { return feature_dim_; }
  // [start, start + width) of each attribute's frequency sub-vector.
  std::vector<std::pair<int, int>> AttributeSlices() const;

  absl::StatusOr<Eigen::VectorXd> Featurize(const DataTable& table) const;

 private:
  explicit HistogramFeaturizer(DataTransformer transformer);

  DataTransformer transformer_;
  int feature_dim_ = 0;
};

}  // namespace dpsynth

#endif  // DPSYNTH_TRANSFORMS_HISTOGRAM_FEATURIZER_H_
