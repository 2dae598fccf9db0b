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

#ifndef DPSYNTH_TREES_DECISION_TREE_H_
#define DPSYNTH_TREES_DECISION_TREE_H_

#include <span>
#include <vector>

#include "Eigen/Core"
#include "dpsynth/base/random.h"
#include "dpsynth/data/table.h"
#include "json.hpp"

namespace dpsynth {

using FeatureRows =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense design matrix. Categorical features hold integer codes and split
// one-vs-rest; numeric features split at midpoints of sorted unique values.
struct FeatureSet {
  FeatureRows x;
  std::vector<int> num_categories;  // 0 for numeric features

  int rows() const { return static_cast<int>(x.rows()); }
  int cols() const { return static_cast<int>(x.cols()); }
  bool categorical(int f) const { return num_categories[f] > 0; }
};

// Every non-target column of `table`, in schema order.
FeatureSet TableFeatures(const DataTable& table);
// All-numeric features.
FeatureSet DenseFeatures(const Eigen::MatrixXd& x);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  bool categorical = false;
  double threshold = 0.0;  // numeric: x <= threshold goes left;
                           // categorical: x == threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
};

// How node statistics are scored. Each sample contributes a pair (a, b):
//   kGini:   a = weight of class 0, b = weight of class 1; the leaf value is
//            b / (a + b) and impurity is the weighted Gini index.
//   kNewton: a = gradient, b = hessian; the leaf value is -a / (b + lambda)
//            and impurity is -a^2 / (b + lambda).
enum class SplitCriterion { kGini, kNewton };

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::kGini;
  int max_depth = -1;             // -1: unlimited
  double min_child_weight = 0.0;  // on a + b (Gini) or b (Newton)
  int max_features = 0;           // features tried per split; 0: all
  double lambda = 1.0;            // Newton leaf regularization
};

class DecisionTree {
 public:
  // Grows a tree on `rows` (distinct indices into x) using only
  // `features`. Splits are accepted only if they strictly reduce impurity.
  // `presorted`, if given, is SortedOrders(x) and saves re-sorting.
  static DecisionTree Grow(
      const FeatureSet& x, std::span<const double> a,
      std::span<const double> b, const std::vector<int>& rows,
      const std::vector<int>& features, const TreeParams& params, Rng& rng,
      const std::vector<std::vector<int>>* presorted = nullptr);

  double Predict(std::span<const double> row) const;
  double Predict(const FeatureRows& x, int row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  // Total impurity reduction credited to each feature.
  const std::vector<double>& importances() const { return importances_; }

  nlohmann::json ToJson() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> importances_;
};

// Row indices of every numeric feature sorted by value (ties by index);
// empty for categorical features.
std::vector<std::vector<int>> SortedOrders(const FeatureSet& x);

// Weighted Gini impurity 1 - sum p_k^2 of class weights (0 when empty).
double GiniIndex(double w0, double w1);

}  // namespace dpsynth

#endif  // DPSYNTH_TREES_DECISION_TREE_H_
