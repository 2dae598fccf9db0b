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

#include "dpsynth/trees/gbdt.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"
#include "dpsynth/base/status_macros.h"
#include "dpsynth/metrics/classification.h"

namespace dpsynth {
namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

absl::Status CheckBinaryTarget(const DataTable& table) {
  const ColumnMeta& target = table.schema().column(table.schema().target_index());
  if (!target.is_categorical() || target.num_categories() != 2) {
    return absl::InvalidArgumentError("boosting needs a binary target");
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status GbdtConfig::Validate() const {
  if (n_estimators < 1) return absl::InvalidArgumentError("n_estimators < 1");
  if (max_depth < 1) return absl::InvalidArgumentError("max_depth < 1");
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning_rate must be positive");
  }
  if (!(min_child_weight >= 0.0)) {
    return absl::InvalidArgumentError("min_child_weight must be >= 0");
  }
  if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) {
    return absl::InvalidArgumentError("colsample_bytree must be in (0, 1]");
  }
  if (!(lambda >= 0.0)) return absl::InvalidArgumentError("lambda must be >= 0");
  return absl::OkStatus();
}

nlohmann::json GbdtConfig::ToJson() const {
  return {{"n_estimators", n_estimators},
          {"max_depth", max_depth},
          {"learning_rate", learning_rate},
          {"min_child_weight", min_child_weight},
          {"colsample_bytree", colsample_bytree},
          {"lambda", lambda}};
}

absl::StatusOr<GbdtModel> GbdtModel::Fit(const DataTable& train,
                                         const GbdtConfig& config,
                                         uint64_t seed) {
  RETURN_IF_ERROR(CheckBinaryTarget(train));
  const std::vector<int> labels = train.Labels();
  return Fit(TableFeatures(train), labels, config, seed);
}

absl::StatusOr<GbdtModel> GbdtModel::Fit(const FeatureSet& x,
                                         std::span<const int> labels,
                                         const GbdtConfig& config,
                                         uint64_t seed) {
  RETURN_IF_ERROR(config.Validate());
  const int n = x.rows();
  if (n == 0 || static_cast<int>(labels.size()) != n) {
    return absl::InvalidArgumentError("boosting needs one label per row");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      return absl::InvalidArgumentError("boosting labels must be 0 or 1");
    }
  }
  GbdtModel model;
  model.config_ = config;
  model.num_features_ = x.cols();
  // Boosting starts from probability 0.5 (zero margin) rather than the
  // class prior, so small learning rates still move minority-rich leaves
  // across the decision threshold.
  model.base_margin_ = 0.0;

  TreeParams params;
  params.criterion = SplitCriterion::kNewton;
  params.max_depth = config.max_depth;
  params.min_child_weight = config.min_child_weight;
  params.lambda = config.lambda;

  const int d = x.cols();
  const int per_tree = std::max(
      1, static_cast<int>(std::round(config.colsample_bytree * d)));
  const std::vector<std::vector<int>> sorted = SortedOrders(x);
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> margin(n, model.base_margin_), g(n), h(n);
  Rng rng = MakeRng(seed);
  for (int t = 0; t < config.n_estimators; ++t) {
    for (int i = 0; i < n; ++i) {
      const double p = Sigmoid(margin[i]);
      g[i] = p - labels[i];
      h[i] = p * (1.0 - p);
    }
    std::vector<int> features(d);
    std::iota(features.begin(), features.end(), 0);
    if (per_tree < d) {
      Shuffle(features, rng);
      features.resize(per_tree);
      std::sort(features.begin(), features.end());
    }
    DecisionTree tree =
        DecisionTree::Grow(x, g, h, rows, features, params, rng, &sorted);
    for (int i = 0; i < n; ++i) {
      margin[i] += config.learning_rate * tree.Predict(x.x, i);
    }
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double GbdtModel::Margin(std::span<const double> row) const {
  double m = base_margin_;
  for (const DecisionTree& tree : trees_) {
    m += config_.learning_rate * tree.Predict(row);
  }
  return m;
}

std::vector<int> GbdtModel::Predict(const FeatureSet& x) const {
  std::vector<int> out(x.rows());
  for (int r = 0; r < x.rows(); ++r) {
    out[r] = Margin(std::span<const double>(x.x.data() + r * x.cols(),
                                            static_cast<size_t>(x.cols()))) > 0.0;
  }
  return out;
}

absl::StatusOr<std::vector<int>> GbdtModel::Predict(const DataTable& table) const {
  RETURN_IF_ERROR(CheckBinaryTarget(table));
  const FeatureSet x = TableFeatures(table);
  if (x.cols() != num_features_) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "model expects %d features, table has %d", num_features_, x.cols()));
  }
  return Predict(x);
}

nlohmann::json GbdtModel::Summary() const {
  nlohmann::json out;
  out["config"] = config_.ToJson();
  out["base_margin"] = base_margin_;
  std::vector<double> importances(num_features_, 0.0);
  int deepest = 0;
  for (const DecisionTree& tree : trees_) {
    deepest = std::max(deepest, tree.depth());
    for (int f = 0; f < num_features_; ++f) importances[f] += tree.importances()[f];
  }
  out["max_tree_depth"] = deepest;
  out["importances"] = importances;
  return out;
}

absl::Status SearchSpace::Validate() const {
  if (n_estimators_lo < 1 || n_estimators_hi <= n_estimators_lo ||
      max_depth_lo < 1 || max_depth_hi <= max_depth_lo ||
      min_child_weight_lo < 0 || min_child_weight_hi <= min_child_weight_lo) {
    return absl::InvalidArgumentError("empty integer range in search space");
  }
  if (!(learning_rate_lo > 0.0 && learning_rate_hi >= learning_rate_lo)) {
    return absl::InvalidArgumentError("bad learning-rate range");
  }
  if (!(colsample_lo > 0.0 && colsample_hi <= 1.0 &&
        colsample_hi >= colsample_lo)) {
    return absl::InvalidArgumentError("bad colsample range");
  }
  return absl::OkStatus();
}

GbdtConfig DrawConfig(const SearchSpace& space, uint64_t seed, int trial) {
  Rng rng = MakeRng(seed, trial);
  GbdtConfig c;
  c.n_estimators = UniformInt(rng, space.n_estimators_lo, space.n_estimators_hi - 1);
  c.max_depth = UniformInt(rng, space.max_depth_lo, space.max_depth_hi - 1);
  const double lo = std::log(space.learning_rate_lo);
  const double hi = std::log(space.learning_rate_hi);
  c.learning_rate = std::exp(lo + UniformDouble(rng) * (hi - lo));
  c.min_child_weight =
      UniformInt(rng, space.min_child_weight_lo, space.min_child_weight_hi - 1);
  c.colsample_bytree = space.colsample_lo +
                       UniformDouble(rng) * (space.colsample_hi - space.colsample_lo);
  return c;
}

absl::StatusOr<HpoResult> RandomSearch(const DataTable& train,
                                       const DataTable& validation,
                                       const SearchSpace& space, int trials,
                                       uint64_t seed) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  RETURN_IF_ERROR(space.Validate());
  RETURN_IF_ERROR(CheckBinaryTarget(train));
  RETURN_IF_ERROR(CheckBinaryTarget(validation));
  const FeatureSet x = TableFeatures(train);
  const std::vector<int> y = train.Labels();
  const FeatureSet vx = TableFeatures(validation);
  const std::vector<int> vy = validation.Labels();
  HpoResult result;
  for (int t = 0; t < trials; ++t) {
    const GbdtConfig config = DrawConfig(space, seed, t);
    ASSIGN_OR_RETURN(GbdtModel model,
                     GbdtModel::Fit(x, y, config, DeriveSeed(seed, 1000 + t)));
    ASSIGN_OR_RETURN(double score, BalancedAccuracy(vy, model.Predict(vx)));
    result.configs.push_back(config);
    result.scores.push_back(score);
    if (result.best_index < 0 || score > result.scores[result.best_index]) {
      result.best_index = t;
      result.best = config;
    }
  }
  return result;
}

}  // namespace dpsynth
