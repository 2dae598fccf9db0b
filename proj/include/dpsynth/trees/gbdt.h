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

#ifndef DPSYNTH_TREES_GBDT_H_
#define DPSYNTH_TREES_GBDT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"
#include "dpsynth/trees/decision_tree.h"
#include "json.hpp"

namespace dpsynth {

struct GbdtConfig {
  int n_estimators = 100;
  int max_depth = 6;
  double learning_rate = 0.1;
  double min_child_weight = 1.0;  // minimum hessian sum per child
  double colsample_bytree = 1.0;  // share of features per tree
  double lambda = 1.0;            // L2 penalty on leaf values

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
};

// Gradient-boosted trees on the logistic loss with Newton leaf values,
// starting from margin 0 (probability 0.5).
class GbdtModel {
 public:
  // Trains on every non-target column of `train`; the target must be
  // binary.
  static absl::StatusOr<GbdtModel> Fit(const DataTable& train,
                                       const GbdtConfig& config,
                                       uint64_t seed);
  static absl::StatusOr<GbdtModel> Fit(const FeatureSet& x,
                                       std::span<const int> labels,
                                       const GbdtConfig& config,
                                       uint64_t seed);

  // Log-odds of class 1.
  double Margin(std::span<const double> row) const;
  std::vector<int> Predict(const FeatureSet& x) const;
  absl::StatusOr<std::vector<int>> Predict(const DataTable& table) const;

  const GbdtConfig& config() const { return config_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  nlohmann::json Summary() const;

 private:
  GbdtConfig config_;
  double base_margin_ = 0.0;
  int num_features_ = 0;
  std::vector<DecisionTree> trees_;
};

// Ranges of the random hyperparameter search. Integer ranges are
// [lo, hi) and the learning rate is log-uniform on [lo, hi].
struct SearchSpace {
  int n_estimators_lo = 100, n_estimators_hi = 1000;
  int max_depth_lo = 3, max_depth_hi = 10;
  double learning_rate_lo = 0.005, learning_rate_hi = 0.01;
  int min_child_weight_lo = 1, min_child_weight_hi = 5;
  double colsample_lo = 0.5, colsample_hi = 1.0;

  absl::Status Validate() const;
};

// The i-th configuration drawn for `seed`; a search with more trials
// evaluates a superset of the configurations of a shorter one.
GbdtConfig DrawConfig(const SearchSpace& space, uint64_t seed, int trial);

struct HpoResult {
  std::vector<GbdtConfig> configs;
  std::vector<double> scores;  // validation balanced accuracy
  int best_index = -1;
  GbdtConfig best;
};

// Fits one model per drawn configuration on `train` and keeps the one with
// the highest validation balanced accuracy (first on ties). Only the two
// given splits are read.
absl::StatusOr<HpoResult> RandomSearch(const DataTable& train,
                                       const DataTable& validation,
                                       const SearchSpace& space, int trials,
                                       uint64_t seed);

}  // namespace dpsynth

#endif  // DPSYNTH_TREES_GBDT_H_
