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

#include "dpsynth/transforms/histogram_featurizer.h"

#include "dpsynth/base/status_macros.h"

namespace dpsynth {

HistogramFeaturizer::HistogramFeaturizer(DataTransformer transformer)
    : transformer_(std::move(transformer)) {
  for (const EncodedSpan& span : transformer_.layout().spans) {
    if (span.kind == SpanKind::kOneHot) feature_dim_ += span.width;
  }
}

absl::StatusOr<HistogramFeaturizer> HistogramFeaturizer::Fit(
    const DataTable& reference, int components, uint64_t seed) {
  ASSIGN_OR_RETURN(DataTransformer transformer,
                   DataTransformer::FitGaussianMixture(reference, components, seed));
  return HistogramFeaturizer(std::move(transformer));
}

std::vector<std::pair<int, int>> HistogramFeaturizer::AttributeSlices() const {
  std::vector<std::pair<int, int>> slices;
  int cursor = 0;
  for (const EncodedSpan& span : transformer_.layout().spans) {
    if (span.kind != SpanKind::kOneHot) continue;
    slices.emplace_back(cursor, span.width);
    cursor += span.width;
  }
  return slices;
}

absl::StatusOr<Eigen::VectorXd> HistogramFeaturizer::Featurize(
    const DataTable& table) const {
  if (table.empty()) {
    return absl::InvalidArgumentError("cannot featurize an empty table");
  }
  ASSIGN_OR_RETURN(EncodedMatrix encoded, transformer_.Encode(table));
  const Eigen::RowVectorXd means = encoded.values.colwise().mean();
  Eigen::VectorXd features(feature_dim_);
  int cursor = 0;
  for (const EncodedSpan& span : transformer_.layout().spans) {
    if (span.kind != SpanKind::kOneHot) continue;
    features.segment(cursor, span.width) =
        means.segment(span.start, span.width).transpose();
    cursor += span.width;
  }
  return features;
}

}  // namespace dpsynth
