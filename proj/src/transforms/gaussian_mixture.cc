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

#include "dpsynth/transforms/gaussian_mixture.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "absl/strings/str_format.h"
#include "dpsynth/base/random.h"

namespace dpsynth {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double LogNormalDensity(double x, const GaussianComponent& c) {
  const double z = (x - c.mean) / c.stddev;
  return -0.5 * z * z - std::log(c.stddev) - kLogSqrt2Pi;
}

double LogSumExp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double sum = 0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

}  // namespace

absl::StatusOr<GaussianMixture> GaussianMixture::Fit(
    std::span<const double> values, const GmmFitOptions& options,
    std::vector<double>* log_likelihood_trace) {
  if (values.empty()) {
    return absl::InvalidArgumentError("cannot fit a mixture to no values");
  }
  if (options.components < 1) {
    return absl::InvalidArgumentError("mixture needs at least one component");
  }
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double span = *max_it - *min_it;
  double floor = options.stddev_floor > 0 ? options.stddev_floor : 1e-6 * span;
  if (span == 0.0) {
    if (floor <= 0) floor = 1e-6 * std::max(1.0, std::abs(*min_it));
    return FromComponents({{1.0, *min_it, floor}});
  }
  const std::set<double> distinct(values.begin(), values.end());
  const int k = options.components;
  if (static_cast<int>(distinct.size()) < k) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "column has %d distinct values, fewer than %d components",
        distinct.size(), k));
  }
  const int n = static_cast<int>(values.size());

  // k-means++ seeding.
  Rng rng = MakeRng(options.seed, 17);
  std::vector<double> centers = {values[rng() % n]};
  std::vector<double> nearest(n);
  while (static_cast<int>(centers.size()) < k) {
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
      nearest[i] = best;
    }
    centers.push_back(values[SampleDiscrete(rng, nearest)]);
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double variance = 0;
  for (double v : values) variance += (v - mean) * (v - mean);
  const double init_stddev = std::max(floor, std::sqrt(variance / n) / k);

  std::vector<GaussianComponent> comps(k);
  for (int j = 0; j < k; ++j) comps[j] = {1.0 / k, centers[j], init_stddev};

  std::vector<double> resp(static_cast<size_t>(n) * k);
  std::vector<double> logs(k);
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // E-step; `total` is the log-likelihood of the current parameters.
    double total = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) {
        logs[j] = comps[j].weight > 0
                      ? std::log(comps[j].weight) + LogNormalDensity(values[i], comps[j])
                      : -std::numeric_limits<double>::infinity();
      }
      const double lse = LogSumExp(logs);
      total += lse;
      for (int j = 0; j < k; ++j) resp[static_cast<size_t>(i) * k + j] = std::exp(logs[j] - lse);
    }
    // M-step.
    for (int j = 0; j < k; ++j) {
      double nk = 0, sum = 0;
      for (int i = 0; i < n; ++i) {
        const double r = resp[static_cast<size_t>(i) * k + j];
        nk += r;
        sum += r * values[i];
      }
      if (nk < 1e-12) {
        comps[j].weight = 0.0;
        continue;
      }
      const double mu = sum / nk;
      double var = 0;
      for (int i = 0; i < n; ++i) {
        const double d = values[i] - mu;
        var += resp[static_cast<size_t>(i) * k + j] * d * d;
      }
      comps[j] = {nk / n, mu, std::max(floor, std::sqrt(var / nk))};
    }
    double weight_sum = 0;
    for (const auto& c : comps) weight_sum += c.weight;
    for (auto& c : comps) c.weight /= weight_sum;

    const double ll = total / n;
    if (log_likelihood_trace != nullptr) log_likelihood_trace->push_back(ll);
    if (std::abs(ll - previous) < options.tolerance) break;
    previous = ll;
  }
  return FromComponents(std::move(comps));
}

GaussianMixture GaussianMixture::FromComponents(
    std::vector<GaussianComponent> components) {
  GaussianMixture mixture;
  mixture.components_ = std::move(components);
  return mixture;
}

std::vector<double> GaussianMixture::Responsibilities(double x) const {
  std::vector<double> logs(components_.size());
  for (size_t j = 0; j < components_.size(); ++j) {
    logs[j] = components_[j].weight > 0
                  ? std::log(components_[j].weight) +
                        LogNormalDensity(x, components_[j])
                  : -std::numeric_limits<double>::infinity();
  }
  const double lse = LogSumExp(logs);
  for (double& l : logs) l = std::exp(l - lse);
  return logs;
}

int GaussianMixture::MostLikelyComponent(double x) const {
  int best = 0;
  double best_log = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < components_.size(); ++j) {
    if (components_[j].weight <= 0) continue;
    const double l =
        std::log(components_[j].weight) + LogNormalDensity(x, components_[j]);
    if (l > best_log) {
      best_log = l;
      best = static_cast<int>(j);
    }
  }
  return best;
}

double GaussianMixture::MeanLogLikelihood(std::span<const double> values) const {
  std::vector<double> logs(components_.size());
  double total = 0;
  for (double x : values) {
    for (size_t j = 0; j < components_.size(); ++j) {
      logs[j] = components_[j].weight > 0
                    ? std::log(components_[j].weight) +
                          LogNormalDensity(x, components_[j])
                    : -std::numeric_limits<double>::infinity();
    }
    total += LogSumExp(logs);
  }
  return total / static_cast<double>(values.size());
}

double GaussianMixture::Offset(int k, double x) const {
  const GaussianComponent& c = components_[k];
  return 0.5 + std::atan((x - c.mean) / (4.0 * c.stddev)) / M_PI;
}

double GaussianMixture::Invert(int k, double offset) const {
  const GaussianComponent& c = components_[k];
  if (offset >= 1.0) return std::numeric_limits<double>::infinity();
  if (offset <= 0.0) return -std::numeric_limits<double>::infinity();
  return c.mean + 4.0 * c.stddev * std::tan(M_PI * (offset - 0.5));
}

nlohmann::json GaussianMixture::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : components_) out.push_back({c.weight, c.mean, c.stddev});
  return out;
}

absl::StatusOr<GaussianMixture> GaussianMixture::FromJson(
    const nlohmann::json& json) {
  if (!json.is_array() || json.empty()) {
    return absl::InvalidArgumentError("malformed mixture state");
  }
  std::vector<GaussianComponent> comps;
  for (const auto& c : json) {
    comps.push_back({c.at(0).get<double>(), c.at(1).get<double>(),
                     c.at(2).get<double>()});
  }
  return FromComponents(std::move(comps));
}

}  // namespace dpsynth
