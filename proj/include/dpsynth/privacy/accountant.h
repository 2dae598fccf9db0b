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

#ifndef DPSYNTH_PRIVACY_ACCOUNTANT_H_
#define DPSYNTH_PRIVACY_ACCOUNTANT_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpsynth {

// Renyi-DP accounting for the Poisson-subsampled Gaussian mechanism
// (add/remove-one neighbouring datasets).

inline constexpr double kInfiniteEpsilon =
    std::numeric_limits<double>::infinity();

struct PrivacyParams {
  double epsilon = 1.0;  // kInfiniteEpsilon disables noise
  double delta = 1e-5;
  double q = 1.0;        // Poisson sampling rate
  int64_t steps = 1;

  bool noise_disabled() const { return epsilon == kInfiniteEpsilon; }
};

struct NoiseCalibration {
  double sigma = 0.0;  // noise stddev is sigma * clip norm
  double achieved_epsilon = kInfiniteEpsilon;
  double best_order = 0.0;
  std::vector<double> rdp_orders;
};

// What a trained model records about its privacy spend.
struct DpLedger {
  double sigma = 0.0;
  double clip_norm = 0.0;
  double q = 0.0;
  int64_t steps = 0;
  double delta = 0.0;
  double target_epsilon = kInfiniteEpsilon;
  double achieved_epsilon = kInfiniteEpsilon;
};

nlohmann::json DpLedgerToJson(const DpLedger& ledger);
absl::StatusOr<DpLedger> DpLedgerFromJson(const nlohmann::json& json);

// {1.25, 1.5, 2, 3, ..., 64, 128, 256, 512}.
const std::vector<double>& DefaultRdpOrders();

// RDP of order `alpha` for one step with noise multiplier `sigma` and
// sampling rate `q`. Exact for integer orders, a numerically stable series
// for fractional ones; q = 1 gives alpha / (2 sigma^2).
absl::StatusOr<double> RdpSubsampledGaussian(double sigma, double q,
                                             double alpha);

// min over orders of steps * rdp[k] + log(1 / delta) / (orders[k] - 1).
double RdpToEpsilon(const std::vector<double>& orders,
                    const std::vector<double>& rdp, int64_t steps, double delta,
                    double* best_order = nullptr);

// Epsilon after `steps` steps; sigma = 0 yields kInfiniteEpsilon.
absl::StatusOr<double> ComputeEpsilon(
    double sigma, double q, int64_t steps, double delta,
    const std::vector<double>& orders = DefaultRdpOrders(),
    double* best_order = nullptr);

inline constexpr double kMinSigma = 0.3;
inline constexpr double kMaxSigma = 100.0;

// Smallest sigma in [kMinSigma, kMaxSigma] (to 1e-3 relative precision)
// whose epsilon does not exceed the target. A target already met at
// kMinSigma returns kMinSigma; an infinite target returns sigma = 0.
absl::StatusOr<NoiseCalibration> CalibrateSigma(const PrivacyParams& target);

// Steps per epoch: ceil(n / expected lot size).
int64_t StepsPerEpoch(int64_t n, double expected_lot_size);

}  // namespace dpsynth

#endif  // DPSYNTH_PRIVACY_ACCOUNTANT_H_
