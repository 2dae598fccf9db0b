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

#include "dpsynth/trees/decision_tree.h"

#include <algorithm>
#include <numeric>

namespace dpsynth {
namespace {

// Minimum impurity decrease for a split to count as an improvement.
constexpr double kMinGain = 1e-12;

struct Split {
  double gain = kMinGain;
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
};

class Builder {
 public:
  Builder(const FeatureSet& x, std::span<const double> a,
          std::span<const double> b, const std::vector<int>& features,
          const TreeParams& params, Rng& rng)
      : x_(x), a_(a), b_(b), features_(features), params_(params), rng_(rng),
        goes_left_(x.rows(), 0) {}

  // `sorted[k]` lists the node's rows sorted by features_[k] (numeric only).
  int Build(std::vector<int> rows, std::vector<std::vector<int>> sorted,
            int depth) {
    double sa = 0.0, sb = 0.0;
    for (int r : rows) {
      sa += a_[r];
      sb += b_[r];
    }
    const int index = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{.value = LeafValue(sa, sb)});
    if (depth == params_.max_depth || rows.size() < 2) return index;
    if (params_.criterion == SplitCriterion::kGini && (sa == 0.0 || sb == 0.0)) {
      return index;
    }
    const Split split = FindSplit(rows, sorted, sa, sb);
    if (split.feature < 0) return index;

    for (int r : rows) {
      const double v = x_.x(r, split.feature);
      goes_left_[r] = split.categorical ? v == split.threshold
                                        : v <= split.threshold;
    }
    auto partition = [&](const std::vector<int>& in, std::vector<int>& left,
                         std::vector<int>& right) {
      for (int r : in) (goes_left_[r] ? left : right).push_back(r);
    };
    std::vector<int> left_rows, right_rows;
    partition(rows, left_rows, right_rows);
    std::vector<std::vector<int>> left_sorted(sorted.size()),
        right_sorted(sorted.size());
    for (size_t k = 0; k < sorted.size(); ++k) {
      partition(sorted[k], left_sorted[k], right_sorted[k]);
    }
    rows.clear();
    sorted.clear();

    importances[split.feature] += split.gain;
    const int left = Build(std::move(left_rows), std::move(left_sorted), depth + 1);
    const int right =
        Build(std::move(right_rows), std::move(right_sorted), depth + 1);
    TreeNode& node = nodes[index];
    node.feature = split.feature;
    node.categorical = split.categorical;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  std::vector<TreeNode> nodes;
  std::vector<double> importances;

 private:
  double Impurity(double sa, double sb) const {
    if (params_.criterion == SplitCriterion::kGini) {
      const double w = sa + sb;
      return w > 0.0 ? 2.0 * sa * sb / w : 0.0;
    }
    return -sa * sa / (sb + params_.lambda);
  }

  double Weight(double sa, double sb) const {
    return params_.criterion == SplitCriterion::kGini ? sa + sb : sb;
  }

  double LeafValue(double sa, double sb) const {
    if (params_.criterion == SplitCriterion::kGini) {
      return sa + sb > 0.0 ? sb / (sa + sb) : 0.0;
    }
    return -sa / (sb + params_.lambda);
  }

  bool Admissible(double la, double lb, double ra, double rb) const {
    // Gini children must carry weight; Newton children must hold a row.
    const double lw = Weight(la, lb), rw = Weight(ra, rb);
    if (params_.criterion == SplitCriterion::kGini && (lw <= 0.0 || rw <= 0.0)) {
      return false;
    }
    return lw >= params_.min_child_weight && rw >= params_.min_child_weight;
  }

  Split FindSplit(const std::vector<int>& rows,
                  const std::vector<std::vector<int>>& sorted, double sa,
                  double sb) {
    const double parent = Impurity(sa, sb);
    const int total = static_cast<int>(features_.size());
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    const int budget = params_.max_features > 0
                           ? std::min(params_.max_features, total)
                           : total;
    if (budget < total) Shuffle(order, rng_);
    Split best;
    for (int tried = 0; tried < total; ++tried) {
      // Past the per-split budget, keep looking only until a split exists.
      if (tried >= budget && best.feature >= 0) break;
      const int k = order[tried];
      const int f = features_[k];
      if (x_.categorical(f)) {
        ScanCategorical(rows, f, sa, sb, parent, best);
      } else {
        ScanNumeric(sorted[k], f, sa, sb, parent, best);
      }
    }
    return best;
  }

  void Consider(double la, double lb, double sa, double sb, double parent,
                int f, bool categorical, double threshold, Split& best) const {
    const double ra = sa - la, rb = sb - lb;
    if (!Admissible(la, lb, ra, rb)) return;
    const double gain = parent - Impurity(la, lb) - Impurity(ra, rb);
    if (gain > best.gain) best = Split{gain, f, categorical, threshold};
  }

  void ScanNumeric(const std::vector<int>& sorted, int f, double sa, double sb,
                   double parent, Split& best) const {
    double la = 0.0, lb = 0.0;
    for (size_t i = 0; i + 1 < sorted.size(); ++i) {
      const int r = sorted[i];
      la += a_[r];
      lb += b_[r];
      const double v = x_.x(r, f), next = x_.x(sorted[i + 1], f);
      if (!(v < next)) continue;
      double threshold = v + 0.5 * (next - v);
      if (!(threshold < next)) threshold = v;
      Consider(la, lb, sa, sb, parent, f, false, threshold, best);
    }
  }

  void ScanCategorical(const std::vector<int>& rows, int f, double sa,
                       double sb, double parent, Split& best) const {
    const int k = x_.num_categories[f];
    std::vector<double> ca(k, 0.0), cb(k, 0.0);
    std::vector<int> count(k, 0);
    for (int r : rows) {
      const int c = static_cast<int>(x_.x(r, f));
      ca[c] += a_[r];
      cb[c] += b_[r];
      ++count[c];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0 || count[c] == static_cast<int>(rows.size())) continue;
      Consider(ca[c], cb[c], sa, sb, parent, f, true, c, best);
    }
  }

  const FeatureSet& x_;
  std::span<const double> a_, b_;
  const std::vector<int>& features_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<char> goes_left_;
};

}  // namespace

FeatureSet TableFeatures(const DataTable& table) {
  const TableSchema& schema = table.schema();
  FeatureSet out;
  std::vector<int> columns;
  for (int c = 0; c < schema.num_columns(); ++c) {
    if (c == schema.target_index()) continue;
    columns.push_back(c);
    out.num_categories.push_back(
        schema.column(c).is_categorical() ? schema.column(c).num_categories()
                                          : 0);
  }
  out.x.resize(table.num_rows(), static_cast<int>(columns.size()));
  for (int r = 0; r < table.num_rows(); ++r) {
    for (size_t j = 0; j < columns.size(); ++j) {
      out.x(r, static_cast<int>(j)) = table.at(r, columns[j]);
    }
  }
  return out;
}

FeatureSet DenseFeatures(const Eigen::MatrixXd& x) {
  FeatureSet out;
  out.x = x;
  out.num_categories.assign(x.cols(), 0);
  return out;
}

std::vector<std::vector<int>> SortedOrders(const FeatureSet& x) {
  std::vector<std::vector<int>> orders(x.cols());
  for (int f = 0; f < x.cols(); ++f) {
    if (x.categorical(f)) continue;
    std::vector<int>& order = orders[f];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
      return x.x(i, f) < x.x(j, f);
    });
  }
  return orders;
}

DecisionTree DecisionTree::Grow(const FeatureSet& x, std::span<const double> a,
                                std::span<const double> b,
                                const std::vector<int>& rows,
                                const std::vector<int>& features,
                                const TreeParams& params, Rng& rng,
                                const std::vector<std::vector<int>>* presorted) {
  std::vector<int> node_rows = rows;
  std::sort(node_rows.begin(), node_rows.end());
  std::vector<char> member(x.rows(), 0);
  for (int r : node_rows) member[r] = 1;

  std::vector<std::vector<int>> sorted(features.size());
  for (size_t k = 0; k < features.size(); ++k) {
    const int f = features[k];
    if (x.categorical(f)) continue;
    if (presorted != nullptr) {
      for (int r : (*presorted)[f]) {
        if (member[r]) sorted[k].push_back(r);
      }
    } else {
      sorted[k] = node_rows;
      std::stable_sort(sorted[k].begin(), sorted[k].end(), [&](int i, int j) {
        return x.x(i, f) < x.x(j, f);
      });
    }
  }

  Builder builder(x, a, b, features, params, rng);
  builder.importances.assign(x.cols(), 0.0);
  builder.Build(std::move(node_rows), std::move(sorted), 0);
  DecisionTree tree;
  tree.nodes_ = std::move(builder.nodes);
  tree.importances_ = std::move(builder.importances);
  return tree;
}

double DecisionTree::Predict(std::span<const double> row) const {
  int i = 0;
  while (nodes_[i].feature >= 0) {
    const TreeNode& node = nodes_[i];
    const double v = row[node.feature];
    const bool left = node.categorical ? v == node.threshold : v <= node.threshold;
    i = left ? node.left : node.right;
  }
  return nodes_[i].value;
}

double DecisionTree::Predict(const FeatureRows& x, int row) const {
  return Predict(std::span<const double>(x.data() + row * x.cols(),
                                         static_cast<size_t>(x.cols())));
}

int DecisionTree::depth() const {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  // Children are always appended after their parent.
  for (size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

nlohmann::json DecisionTree::ToJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : nodes_) {
    nodes.push_back({{"feature", n.feature},
                     {"categorical", n.categorical},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value}});
  }
  return {{"nodes", nodes}, {"importances", importances_}};
}

double GiniIndex(double w0, double w1) {
  const double w = w0 + w1;
  if (!(w > 0.0)) return 0.0;
  const double p0 = w0 / w, p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace dpsynth
