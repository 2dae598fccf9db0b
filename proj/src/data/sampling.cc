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

#include "dpsynth/data/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"

namespace dpsynth {

std::vector<int> LargestRemainderQuotas(int total,
                                        const std::vector<double>& weights) {
  const double weight_sum =
      std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> quotas(weights.size());
  std::vector<double> remainders(weights.size());
  int assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double exact = total * weights[i] / weight_sum;
    quotas[i] = static_cast<int>(std::floor(exact + 1e-9));
    remainders[i] = exact - quotas[i];
    assigned += quotas[i];
  }
  std::vector<size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainders[a] > remainders[b] + 1e-12;
  });
  for (size_t k = 0; assigned < total; ++k, ++assigned) {
    ++quotas[order[k % order.size()]];
  }
  return quotas;
}

absl::StatusOr<SplitBundle> StratifiedSplit(const DataTable& data,
                                            uint64_t seed) {
  std::array<std::vector<int>, 2> by_class;
  for (int r = 0; r < data.num_rows(); ++r) by_class[data.label(r)].push_back(r);
  for (int k = 0; k < 2; ++k) {
    if (by_class[k].size() < 10) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "class '%s' has %d rows; stratified split needs at least 10",
          data.schema().column(data.schema().target_index()).categories[k],
          by_class[k].size()));
    }
  }
  std::array<std::vector<int>, 3> parts;
  for (int k = 0; k < 2; ++k) {
    Rng rng = MakeRng(seed, 101 + k);
    std::vector<int> rows = by_class[k];
    Shuffle(rows, rng);
    const std::vector<int> quotas =
        LargestRemainderQuotas(static_cast<int>(rows.size()), {8.0, 1.0, 1.0});
    int cursor = 0;
    for (int p = 0; p < 3; ++p) {
      parts[p].insert(parts[p].end(), rows.begin() + cursor,
                      rows.begin() + cursor + quotas[p]);
      cursor += quotas[p];
    }
  }
  for (std::vector<int>& part : parts) std::sort(part.begin(), part.end());
  return SplitBundle{data.SelectRows(parts[0]), data.SelectRows(parts[1]),
                     data.SelectRows(parts[2])};
}

std::vector<int> PoissonSampleIndices(int n, double q, Rng& rng) {
  std::vector<int> kept;
  for (int i = 0; i < n; ++i) {
    if (UniformDouble(rng) < q) kept.push_back(i);
  }
  return kept;
}

absl::StatusOr<DataTable> PoissonSample(const DataTable& data, double q,
                                        uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate %g outside [0, 1]", q));
  }
  Rng rng = MakeRng(seed, 7);
  return data.SelectRows(PoissonSampleIndices(data.num_rows(), q, rng));
}

absl::StatusOr<DataTable> DownsampleBalanced(const DataTable& data,
                                             uint64_t seed) {
  const std::array<int, 2> counts = data.ClassCounts();
  if (counts[0] == 0 || counts[1] == 0) {
    return absl::FailedPreconditionError(
        "class-balanced downsampling needs both classes present");
  }
  const int minority = counts[1] <= counts[0] ? 1 : 0;
  const int keep = counts[minority];
  std::vector<int> majority_rows;
  std::vector<int> kept;
  for (int r = 0; r < data.num_rows(); ++r) {
    if (data.label(r) == minority) {
      kept.push_back(r);
    } else {
      majority_rows.push_back(r);
    }
  }
  Rng rng = MakeRng(seed, 11);
  Shuffle(majority_rows, rng);
  kept.insert(kept.end(), majority_rows.begin(), majority_rows.begin() + keep);
  std::sort(kept.begin(), kept.end());
  return data.SelectRows(kept);
}

double MinorityFraction(const DataTable& data) {
  if (data.empty()) return 0.0;
  const std::array<int, 2> counts = data.ClassCounts();
  return 100.0 * std::min(counts[0], counts[1]) / data.num_rows();
}

}  // namespace dpsynth
