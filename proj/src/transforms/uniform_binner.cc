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

#include "dpsynth/transforms/uniform_binner.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace dpsynth {

absl::StatusOr<UniformBinner> UniformBinner::Fit(const TableSchema& schema,
                                                 int bins) {
  if (bins < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("uniform binning needs at least 2 bins, got %d", bins));
  }
  UniformBinner binner;
  binner.bins_ = bins;
  binner.edges_.resize(schema.num_columns());
  for (int c = 0; c < schema.num_columns(); ++c) {
    const ColumnMeta& meta = schema.column(c);
    if (meta.is_categorical()) continue;
    if (!(meta.range_min < meta.range_max)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "missing range metadata for continuous column '%s'", meta.name));
    }
    std::vector<double>& edges = binner.edges_[c];
    const double width = (meta.range_max - meta.range_min) / bins;
    for (int i = 0; i < bins; ++i) edges.push_back(meta.range_min + i * width);
    edges.push_back(meta.range_max);
  }
  return binner;
}

BinnedValue UniformBinner::Bin(int column, double value) const {
  const std::vector<double>& e = edges_[column];
  const double lo = e.front();
  const double hi = e.back();
  value = std::clamp(value, lo, hi);
  int bin = static_cast<int>((value - lo) / (hi - lo) * bins_);
  bin = std::clamp(bin, 0, bins_ - 1);
  while (bin < bins_ - 1 && value >= e[bin + 1]) ++bin;
  while (bin > 0 && value < e[bin]) --bin;
  double offset = std::clamp((value - e[bin]) / (e[bin + 1] - e[bin]), 0.0, 1.0);
  // Nudge by a few ulps when rounding keeps Unbin from hitting `value`.
  if (Unbin(column, bin, offset) != value) {
    double up = offset;
    double down = offset;
    for (int step = 0; step < 16; ++step) {
      up = std::nextafter(up, 2.0);
      down = std::nextafter(down, -1.0);
      if (up <= 1.0 && Unbin(column, bin, up) == value) return {bin, up};
      if (down >= 0.0 && Unbin(column, bin, down) == value) return {bin, down};
    }
  }
  return {bin, offset};
}

double UniformBinner::Unbin(int column, int bin, double offset) const {
  const std::vector<double>& e = edges_[column];
  if (offset >= 1.0) return e[bin + 1];
  const double value = e[bin] + offset * (e[bin + 1] - e[bin]);
  return std::clamp(value, e[bin], e[bin + 1]);
}

}  // namespace dpsynth
