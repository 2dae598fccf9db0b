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

#ifndef DPSYNTH_TRANSFORMS_UNIFORM_BINNER_H_
#define DPSYNTH_TRANSFORMS_UNIFORM_BINNER_H_

#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/data/table.h"

namespace dpsynth {

struct BinnedValue {
  int bin = 0;
  double offset = 0.0;  // position inside the bin, in [0, 1]
};

// Equal-width bins over each continuous column's declared range. Fitting
// takes only the schema, so no data row is ever read.
class UniformBinner {
 public:
  static absl::StatusOr<UniformBinner> Fit(const TableSchema& schema, int bins);

  int bins() const { return bins_; }
  bool handles(int column) const {
    return column < static_cast<int>(edges_.size()) && !edges_[column].empty();
  }
  // bins() + 1 edges; the last edge is exactly range_max.
  const std::vector<double>& edges(int column) const { return edges_[column]; }

  // Values equal to range_max land in the last bin with offset 1. The offset
  // is chosen so that Unbin reproduces `value` bit for bit.
  BinnedValue Bin(int column, double value) const;
  double Unbin(int column, int bin, double offset) const;

 private:
  int bins_ = 0;
  std::vector<std::vector<double>> edges_;  // indexed by schema column
};

}  // namespace dpsynth

#endif  // DPSYNTH_TRANSFORMS_UNIFORM_BINNER_H_
