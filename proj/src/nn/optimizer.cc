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

#include "dpsynth/nn/optimizer.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "dpsynth/base/check.h"

namespace dpsynth::nn {

Adam::Adam(int size, AdamOptions options)
    : options_(options),
      m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) {}

absl::Status Adam::Step(Eigen::VectorXd& params,
                        const Eigen::VectorXd& gradient) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "adam state has %d entries, params %d, gradient %d", m_.size(),
        params.size(), gradient.size()));
  }
  if (!gradient.allFinite()) {
    return absl::InternalError(
        absl::StrFormat("non-finite gradient at step %d", step_ + 1));
  }
  Eigen::VectorXd g = gradient;
  if (options_.weight_decay > 0.0) g += options_.weight_decay * params;
  const Eigen::VectorXd m =
      options_.beta1 * m_ + (1.0 - options_.beta1) * g;
  const Eigen::VectorXd v =
      options_.beta2 * v_ + (1.0 - options_.beta2) * g.cwiseAbs2();
  const double t = static_cast<double>(step_ + 1);
  const double m_scale = 1.0 / (1.0 - std::pow(options_.beta1, t));
  const double v_scale = 1.0 / (1.0 - std::pow(options_.beta2, t));
  const Eigen::VectorXd update =
      options_.learning_rate * (m * m_scale).array() /
      ((v * v_scale).array().sqrt() + options_.epsilon);
  Eigen::VectorXd next = params - update;
  if (!next.allFinite()) {
    return absl::InternalError(
        absl::StrFormat("non-finite parameters after step %d", step_ + 1));
  }
  params = std::move(next);
  m_ = m;
  v_ = v;
  ++step_;
  return absl::OkStatus();
}

std::vector<double> ClipRows(RowMatrix& grads, double clip_norm) {
  DPSYNTH_CHECK(clip_norm > 0.0);
  std::vector<double> norms(grads.rows());
  for (Eigen::Index r = 0; r < grads.rows(); ++r) {
    const double norm = grads.row(r).norm();
    norms[r] = norm;
    if (norm > clip_norm) grads.row(r) *= clip_norm / norm;
  }
  return norms;
}

ClippedSum::ClippedSum(int size, double clip_norm)
    : clip_norm_(clip_norm), sum_(Eigen::VectorXd::Zero(size)) {
  DPSYNTH_CHECK(clip_norm > 0.0);
}

void ClippedSum::Add(RowMatrix grads) {
  DPSYNTH_CHECK(grads.cols() == sum_.size());
  const std::vector<double> norms = ClipRows(grads, clip_norm_);
  for (double norm : norms) norms_.push_back(std::min(norm, clip_norm_));
  sum_ += grads.colwise().sum().transpose();
  count_ += static_cast<int>(grads.rows());
}

Eigen::VectorXd NoisyMean(const Eigen::VectorXd& clipped_sum,
                          const DpConfig& config, Rng& rng) {
  DPSYNTH_CHECK(config.noise_multiplier >= 0.0);
  DPSYNTH_CHECK(config.expected_lot_size > 0.0);
  Eigen::VectorXd noisy = clipped_sum;
  if (config.noise_multiplier > 0.0) {
    const double stddev = config.noise_multiplier * config.clip_norm;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) {
      noisy[i] += stddev * StandardNormal(rng);
    }
  }
  return noisy / config.expected_lot_size;
}

absl::Status DpAdamStep(Adam& adam, Eigen::VectorXd& params, RowMatrix grads,
                        const DpConfig& config, Rng& rng) {
  ClippedSum clipped(static_cast<int>(params.size()), config.clip_norm);
  if (grads.rows() > 0) clipped.Add(std::move(grads));
  return DpAdamStep(adam, params, clipped, config, rng);
}

absl::Status DpAdamStep(Adam& adam, Eigen::VectorXd& params,
                        const ClippedSum& clipped, const DpConfig& config,
                        Rng& rng) {
  if (config.noise_multiplier < 0.0) {
    return absl::InvalidArgumentError("noise multiplier must be >= 0");
  }
  return adam.Step(params, NoisyMean(clipped.sum(), config, rng));
}

}  // namespace dpsynth::nn
