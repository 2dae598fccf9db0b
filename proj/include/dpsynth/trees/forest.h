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

#ifndef DPSYNTH_TREES_FOREST_H_
#define DPSYNTH_TREES_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/trees/decision_tree.h"
#include "json.hpp"

namespace dpsynth {

struct ForestOptions {
  int n_trees = 100;
  bool bootstrap = true;
  int max_features = -1;  // -1: floor(sqrt(d)) per split; 0: all
  int max_depth = -1;     // -1: unlimited
};

// Gini random forest with bootstrap resampling and per-split feature
// subsampling; predicts by majority vote.
class RandomForest {
 public:
  // Labels must be 0/1 and as many as the rows of x. A single-label input
  // yields a constant classifier and a warning on stderr.
  static absl::StatusOr<RandomForest> Fit(const FeatureSet& x,
                                          std::span<const int> labels,
                                          const ForestOptions& options,
                                          uint64_t seed);

  // Fraction of trees voting for class 1.
  double PredictProba(std::span<const double> row) const;
  int Predict(std::span<const double> row) const;
  std::vector<int> Predict(const FeatureRows& x) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  nlohmann::json Summary() const;

 private:
  std::vector<DecisionTree> trees_;
  int constant_label_ = -1;  // >= 0 for a single-label fit
};

}  // namespace dpsynth

#endif  // DPSYNTH_TREES_FOREST_H_
