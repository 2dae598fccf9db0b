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

#include "dpsynth/synth/gaussian_copula.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "Eigen/Eigenvalues"
#include "absl/strings/str_format.h"
#include "boost/math/distributions/normal.hpp"
#include "dpsynth/base/random.h"
#include "dpsynth/base/status_macros.h"

namespace dpsynth {
namespace {

constexpr double kEigenFloor = 1e-9;
constexpr double kUnitClamp = 1e-12;

const boost::math::normal& StandardNormalDist() {
  static const boost::math::normal* dist = new boost::math::normal(0.0, 1.0);
  return *dist;
}

double NormalQuantile(double u) {
  return boost::math::quantile(StandardNormalDist(),
                               std::clamp(u, kUnitClamp, 1.0 - kUnitClamp));
}

double NormalCdf(double z) { return boost::math::cdf(StandardNormalDist(), z); }

}  // namespace

absl::StatusOr<std::unique_ptr<GaussianCopula>> GaussianCopula::Fit(
    const DataTable& train) {
  const int n = train.num_rows();
  if (n < 2) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "gaussian copula needs at least 2 training rows, got %d", n));
  }
  const TableSchema& schema = train.schema();
  const int d = schema.num_columns();
  std::unique_ptr<GaussianCopula> model(new GaussianCopula());
  model->schema_ = schema;
  model->marginals_.resize(d);
  for (int c = 0; c < d; ++c) {
    Marginal& m = model->marginals_[c];
    const ColumnMeta& meta = schema.column(c);
    if (meta.is_categorical()) {
      std::vector<int> counts(meta.num_categories(), 0);
      for (int r = 0; r < n; ++r) ++counts[static_cast<int>(train.at(r, c))];
      for (int count : counts) {
        m.probabilities.push_back(static_cast<double>(count) / n);
        m.constant = m.constant || count == n;
      }
    } else {
      m.sorted_values = train.ColumnValues(c);
      std::sort(m.sorted_values.begin(), m.sorted_values.end());
      m.constant = m.sorted_values.front() == m.sorted_values.back();
    }
  }

  Eigen::MatrixXd z(n, d);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) z(r, c) = model->Gaussianize(c, train.at(r, c));
  }
  Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      const bool degenerate = model->marginals_[i].constant ||
                              model->marginals_[j].constant || !(denom > 0.0);
      corr(i, j) = corr(j, i) = degenerate ? 0.0 : cov(i, j) / denom;
    }
  }
  RETURN_IF_ERROR(model->Finish(std::move(corr)));
  return model;
}

absl::Status GaussianCopula::Finish(Eigen::MatrixXd correlation) {
  const int d = static_cast<int>(correlation.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation);
  if (eig.info() != Eigen::Success) {
    return absl::InternalError("correlation eigendecomposition failed");
  }
  Eigen::VectorXd values = eig.eigenvalues().cwiseMax(kEigenFloor);
  Eigen::MatrixXd repaired = eig.eigenvectors() * values.asDiagonal() *
                             eig.eigenvectors().transpose();
  // Restore the unit diagonal after flooring.
  const Eigen::VectorXd scale = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = scale.asDiagonal() * repaired * scale.asDiagonal();
  repaired = 0.5 * (repaired + repaired.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> final_eig(repaired);
  factor_ = final_eig.eigenvectors() *
            final_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  correlation_ = std::move(repaired);
  if (!correlation_.allFinite() || correlation_.rows() != d) {
    return absl::InternalError("non-finite copula correlation");
  }
  return absl::OkStatus();
}

double GaussianCopula::Gaussianize(int column, double value) const {
  const Marginal& m = marginals_[column];
  if (m.constant) return 0.0;
  if (schema_.column(column).is_categorical()) {
    const int code = static_cast<int>(value);
    double lower = 0.0;
    for (int k = 0; k < code; ++k) lower += m.probabilities[k];
    return NormalQuantile(lower + 0.5 * m.probabilities[code]);
  }
  const std::vector<double>& v = m.sorted_values;
  const auto lo = std::lower_bound(v.begin(), v.end(), value);
  const auto hi = std::upper_bound(v.begin(), v.end(), value);
  // Mid-rank; values between observations interpolate to the neighbours.
  const double rank = 0.5 * static_cast<double>((lo - v.begin()) +
                                                (hi - v.begin()));
  return NormalQuantile(rank / static_cast<double>(v.size()));
}

double GaussianCopula::InvertMarginal(int column, double u) const {
  const Marginal& m = marginals_[column];
  if (schema_.column(column).is_categorical()) {
    double upper = 0.0;
    for (size_t k = 0; k < m.probabilities.size(); ++k) {
      upper += m.probabilities[k];
      if (u < upper && m.probabilities[k] > 0.0) return static_cast<double>(k);
    }
    for (size_t k = m.probabilities.size(); k-- > 0;) {
      if (m.probabilities[k] > 0.0) return static_cast<double>(k);
    }
    return 0.0;
  }
  const std::vector<double>& v = m.sorted_values;
  const double n = static_cast<double>(v.size());
  const double position = std::clamp(u * n - 0.5, 0.0, n - 1.0);
  const size_t below = static_cast<size_t>(std::floor(position));
  const size_t above = std::min(below + 1, v.size() - 1);
  const double t = position - static_cast<double>(below);
  const double value = v[below] + t * (v[above] - v[below]);
  const ColumnMeta& meta = schema_.column(column);
  return std::clamp(value, meta.range_min, meta.range_max);
}

absl::StatusOr<DataTable> GaussianCopula::Sample(int n, uint64_t seed) const {
  RETURN_IF_ERROR(ValidateSampleCount(n));
  Rng rng = MakeRng(seed);
  const int d = schema_.num_columns();
  std::vector<double> cells(static_cast<size_t>(n) * d);
  Eigen::VectorXd eps(d);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) eps[c] = StandardNormal(rng);
    const Eigen::VectorXd z = factor_ * eps;
    for (int c = 0; c < d; ++c) {
      cells[static_cast<size_t>(r) * d + c] = InvertMarginal(c, NormalCdf(z[c]));
    }
  }
  return DataTable::Create(schema_, std::move(cells));
}

nlohmann::json GaussianCopula::ToJson() const {
  nlohmann::json marginals = nlohmann::json::array();
  for (size_t c = 0; c < marginals_.size(); ++c) {
    const Marginal& m = marginals_[c];
    if (schema_.column(static_cast<int>(c)).is_categorical()) {
      marginals.push_back({{"probabilities", m.probabilities}});
    } else {
      marginals.push_back({{"sorted_values", m.sorted_values}});
    }
  }
  std::vector<std::vector<double>> corr(correlation_.rows());
  for (Eigen::Index i = 0; i < correlation_.rows(); ++i) {
    corr[i].resize(correlation_.cols());
    for (Eigen::Index j = 0; j < correlation_.cols(); ++j) {
      corr[i][j] = correlation_(i, j);
    }
  }
  return {{"marginals", marginals}, {"correlation", corr}};
}

absl::StatusOr<std::unique_ptr<GaussianCopula>> GaussianCopula::FromJson(
    const TableSchema& schema, const nlohmann::json& json) {
  const int d = schema.num_columns();
  if (!json.contains("marginals") || !json.contains("correlation") ||
      static_cast<int>(json["marginals"].size()) != d ||
      static_cast<int>(json["correlation"].size()) != d) {
    return absl::InvalidArgumentError("copula state does not match schema");
  }
  std::unique_ptr<GaussianCopula> model(new GaussianCopula());
  model->schema_ = schema;
  model->marginals_.resize(d);
  for (int c = 0; c < d; ++c) {
    Marginal& m = model->marginals_[c];
    const nlohmann::json& j = json["marginals"][c];
    if (schema.column(c).is_categorical()) {
      m.probabilities = j.at("probabilities").get<std::vector<double>>();
      if (static_cast<int>(m.probabilities.size()) !=
          schema.column(c).num_categories()) {
        return absl::InvalidArgumentError("copula marginal size mismatch");
      }
      m.constant = *std::max_element(m.probabilities.begin(),
                                     m.probabilities.end()) == 1.0;
    } else {
      m.sorted_values = j.at("sorted_values").get<std::vector<double>>();
      if (m.sorted_values.empty()) {
        return absl::InvalidArgumentError("copula marginal has no values");
      }
      m.constant = m.sorted_values.front() == m.sorted_values.back();
    }
  }
  Eigen::MatrixXd corr(d, d);
  for (int i = 0; i < d; ++i) {
    const std::vector<double> row =
        json["correlation"][i].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != d) {
      return absl::InvalidArgumentError("copula correlation is not square");
    }
    for (int j = 0; j < d; ++j) corr(i, j) = row[j];
  }
  // Stored matrices are already repaired; re-deriving the factor from them
  // reproduces the fitted model exactly.
  model->correlation_ = corr;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  model->factor_ = eig.eigenvectors() *
                   eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return model;
}

}  // namespace dpsynth
