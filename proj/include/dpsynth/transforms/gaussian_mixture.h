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

#ifndef DPSYNTH_TRANSFORMS_GAUSSIAN_MIXTURE_H_
#define DPSYNTH_TRANSFORMS_GAUSSIAN_MIXTURE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpsynth {

struct GaussianComponent {
  double weight = 0.0;
  double mean = 0.0;
  double stddev = 1.0;
};

struct GmmFitOptions {
  int components = 10;
  int max_iterations = 200;
  double tolerance = 1e-6;  // on mean log-likelihood per value
  // Lower bound on component stddev. Zero means 1e-6 of the data span.
  double stddev_floor = 0.0;
  uint64_t seed = 0;
};

// One-dimensional Gaussian mixture fitted by expectation-maximization with
// k-means++ initialization. This is the data-dependent transform behind
// mode-specific normalization; it must never be used on private data in a
// DP pipeline.
class GaussianMixture {
 public:
  // Fails when the column has fewer distinct values than requested
  // components. A constant column yields one component at the floor stddev.
  // `log_likelihood_trace`, when given, receives the mean log-likelihood
  // after every EM iteration.
  static absl::StatusOr<GaussianMixture> Fit(
      std::span<const double> values, const GmmFitOptions& options,
      std::vector<double>* log_likelihood_trace = nullptr);

  static GaussianMixture FromComponents(std::vector<GaussianComponent> components);

  const std::vector<GaussianComponent>& components() const { return components_; }
  int num_components() const { return static_cast<int>(components_.size()); }

  std::vector<double> Responsibilities(double x) const;
  int MostLikelyComponent(double x) const;
  double MeanLogLikelihood(std::span<const double> values) const;

  // Maps x to (0, 1) relative to component k via 1/2 + atan(z / 4) / pi with
  // z the standardized value; Invert undoes it and is unbounded at 0 and 1.
  double Offset(int k, double x) const;
  double Invert(int k, double offset) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<GaussianMixture> FromJson(const nlohmann::json& json);

 private:
  std::vector<GaussianComponent> components_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_TRANSFORMS_GAUSSIAN_MIXTURE_H_
