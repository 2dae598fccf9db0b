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

#ifndef DPSYNTH_NN_OPTIMIZER_H_
#define DPSYNTH_NN_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "dpsynth/base/random.h"
#include "dpsynth/nn/autodiff.h"

namespace dpsynth::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // L2 added to the gradient
};

class Adam {
 public:
  Adam() = default;
  Adam(int size, AdamOptions options);

  // One update. A non-finite gradient or result leaves `params` and the
  // moments untouched and returns an error.
  absl::Status Step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient);

  const AdamOptions& options() const { return options_; }
  int64_t step_count() const { return step_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }

 private:
  AdamOptions options_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  int64_t step_ = 0;
};

// Scales each row by min(1, clip_norm / ||row||). Returns the pre-clip norms.
std::vector<double> ClipRows(RowMatrix& grads, double clip_norm);

// Clips per-sample gradients chunk by chunk and keeps their running sum, so
// a large lot never needs all rows in memory at once.
class ClippedSum {
 public:
  ClippedSum(int size, double clip_norm);
  void Add(RowMatrix grads);
  const Eigen::VectorXd& sum() const { return sum_; }
  int count() const { return count_; }
  const std::vector<double>& clipped_norms() const { return norms_; }

 private:
  double clip_norm_;
  Eigen::VectorXd sum_;
  int count_ = 0;
  std::vector<double> norms_;  // post-clip
};

struct DpConfig {
  double clip_norm = 1.0;
  double noise_multiplier = 1.0;  // sigma; 0 disables noise
  double expected_lot_size = 1.0;
};

// (clipped_sum + N(0, sigma^2 C^2 I)) / expected_lot_size.
Eigen::VectorXd NoisyMean(const Eigen::VectorXd& clipped_sum,
                          const DpConfig& config, Rng& rng);

// Clip, sum, add noise and take an Adam step.
absl::Status DpAdamStep(Adam& adam, Eigen::VectorXd& params, RowMatrix grads,
                        const DpConfig& config, Rng& rng);
absl::Status DpAdamStep(Adam& adam, Eigen::VectorXd& params,
                        const ClippedSum& clipped, const DpConfig& config,
                        Rng& rng);

}  // namespace dpsynth::nn

#endif  // DPSYNTH_NN_OPTIMIZER_H_
