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

#include "dpsynth/trees/forest.h"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace dpsynth {

absl::StatusOr<RandomForest> RandomForest::Fit(const FeatureSet& x,
                                               std::span<const int> labels,
                                               const ForestOptions& options,
                                               uint64_t seed) {
  const int n = x.rows();
  if (static_cast<int>(labels.size()) != n || n == 0) {
    return absl::InvalidArgumentError("forest needs one label per row");
  }
  if (options.n_trees < 1) {
    return absl::InvalidArgumentError("forest needs at least one tree");
  }
  int positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) {
      return absl::InvalidArgumentError("forest labels must be 0 or 1");
    }
    positives += y;
  }
  RandomForest forest;
  if (positives == 0 || positives == n) {
    std::fprintf(stderr,
                 "warning: forest fit on a single label; predicting it "
                 "everywhere\n");
    forest.constant_label_ = positives == 0 ? 0 : 1;
    return forest;
  }

  const int d = x.cols();
  TreeParams params;
  params.criterion = SplitCriterion::kGini;
  params.max_depth = options.max_depth;
  params.max_features =
      options.max_features < 0
          ? std::max(1, static_cast<int>(std::floor(std::sqrt(d))))
          : options.max_features;
  std::vector<int> features(d);
  std::iota(features.begin(), features.end(), 0);
  const std::vector<std::vector<int>> sorted = SortedOrders(x);

  for (int t = 0; t < options.n_trees; ++t) {
    Rng rng = MakeRng(seed, t);
    // Bootstrap multiplicities become per-class sample weights.
    std::vector<double> w(n, 1.0);
    if (options.bootstrap) {
      std::fill(w.begin(), w.end(), 0.0);
      for (int i = 0; i < n; ++i) w[UniformInt(rng, 0, n - 1)] += 1.0;
    }
    std::vector<double> a(n), b(n);
    std::vector<int> rows;
    for (int i = 0; i < n; ++i) {
      a[i] = labels[i] == 0 ? w[i] : 0.0;
      b[i] = labels[i] == 1 ? w[i] : 0.0;
      if (w[i] > 0.0) rows.push_back(i);
    }
    forest.trees_.push_back(
        DecisionTree::Grow(x, a, b, rows, features, params, rng, &sorted));
  }
  return forest;
}

double RandomForest::PredictProba(std::span<const double> row) const {
  if (constant_label_ >= 0) return constant_label_;
  int votes = 0;
  for (const DecisionTree& tree : trees_) votes += tree.Predict(row) > 0.5;
  return static_cast<double>(votes) / trees_.size();
}

int RandomForest::Predict(std::span<const double> row) const {
  return PredictProba(row) > 0.5 ? 1 : 0;
}

std::vector<int> RandomForest::Predict(const FeatureRows& x) const {
  std::vector<int> out(x.rows());
  for (int r = 0; r < x.rows(); ++r) {
    out[r] = Predict(std::span<const double>(x.data() + r * x.cols(),
                                             static_cast<size_t>(x.cols())));
  }
  return out;
}

nlohmann::json RandomForest::Summary() const {
  nlohmann::json out;
  out["n_trees"] = trees_.size();
  out["constant_label"] = constant_label_;
  std::vector<int> depths;
  std::vector<double> importances;
  for (const DecisionTree& tree : trees_) {
    depths.push_back(tree.depth());
    if (importances.empty()) importances.assign(tree.importances().size(), 0.0);
    for (size_t f = 0; f < importances.size(); ++f) {
      importances[f] += tree.importances()[f] / trees_.size();
    }
  }
  out["depths"] = depths;
  out["importances"] = importances;
  return out;
}

}  // namespace dpsynth
