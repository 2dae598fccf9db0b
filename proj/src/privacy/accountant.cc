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

#include "dpsynth/privacy/accountant.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpsynth {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(exp(a) - exp(b)); requires a >= b.
double LogSub(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

double LogErfc(double x) {
  if (x < 20.0) return std::log(std::erfc(x));
  // Asymptotic expansion; erfc underflows well before this matters.
  const double x2 = x * x;
  const double series =
      1.0 - 1.0 / (2.0 * x2) + 3.0 / (4.0 * x2 * x2) -
      15.0 / (8.0 * x2 * x2 * x2) + 105.0 / (16.0 * x2 * x2 * x2 * x2);
  return -x2 - std::log(x) - 0.5 * std::log(M_PI) + std::log(series);
}

double LogAInteger(double sigma, double q, int alpha) {
  double log_a = kNegInf;
  double log_binom = 0.0;
  for (int i = 0; i <= alpha; ++i) {
    if (i > 0) log_binom += std::log(alpha - i + 1.0) - std::log(i);
    const double term = log_binom + i * std::log(q) +
                        (alpha - i) * std::log1p(-q) +
                        (static_cast<double>(i) * i - i) / (2.0 * sigma * sigma);
    log_a = LogAdd(log_a, term);
  }
  return log_a;
}

// Series over i = 0, 1, ... split at z0 where the two mixture terms cross.
double LogAFractional(double sigma, double q, double alpha) {
  double log_a0 = kNegInf;
  double log_a1 = kNegInf;
  const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
  const double s2 = 2.0 * sigma * sigma;
  double log_coef = 0.0;  // log |binom(alpha, i)|
  bool positive = true;
  for (int i = 0; i < 100000; ++i) {
    if (i > 0) {
      const double factor = alpha - i + 1.0;
      log_coef += std::log(std::abs(factor)) - std::log(i);
      if (factor < 0) positive = !positive;
    }
    const double j = alpha - i;
    const double log_t0 = log_coef + i * std::log(q) + j * std::log1p(-q);
    const double log_t1 = log_coef + j * std::log(q) + i * std::log1p(-q);
    const double log_e0 =
        std::log(0.5) + LogErfc((i - z0) / (std::sqrt(2.0) * sigma));
    const double log_e1 =
        std::log(0.5) + LogErfc((z0 - j) / (std::sqrt(2.0) * sigma));
    const double log_s0 = log_t0 + (static_cast<double>(i) * i - i) / s2 + log_e0;
    const double log_s1 = log_t1 + (j * j - j) / s2 + log_e1;
    if (positive) {
      log_a0 = LogAdd(log_a0, log_s0);
      log_a1 = LogAdd(log_a1, log_s1);
    } else {
      log_a0 = LogSub(log_a0, log_s0);
      log_a1 = LogSub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30.0) break;
  }
  return LogAdd(log_a0, log_a1);
}

}  // namespace

nlohmann::json DpLedgerToJson(const DpLedger& ledger) {
  auto number = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return "inf";
    return v;
  };
  return {{"sigma", ledger.sigma},
          {"clip_norm", ledger.clip_norm},
          {"q", ledger.q},
          {"steps", ledger.steps},
          {"delta", ledger.delta},
          {"target_epsilon", number(ledger.target_epsilon)},
          {"achieved_epsilon", number(ledger.achieved_epsilon)}};
}

absl::StatusOr<DpLedger> DpLedgerFromJson(const nlohmann::json& json) {
  auto number = [&](const char* key) -> absl::StatusOr<double> {
    if (!json.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("privacy ledger is missing '%s'", key));
    }
    const nlohmann::json& v = json[key];
    if (v.is_string() && v.get<std::string>() == "inf") return kInfiniteEpsilon;
    if (!v.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("privacy ledger field '%s' is not a number", key));
    }
    return v.get<double>();
  };
  DpLedger ledger;
  for (auto [key, field] :
       std::initializer_list<std::pair<const char*, double*>>{
           {"sigma", &ledger.sigma},
           {"clip_norm", &ledger.clip_norm},
           {"q", &ledger.q},
           {"delta", &ledger.delta},
           {"target_epsilon", &ledger.target_epsilon},
           {"achieved_epsilon", &ledger.achieved_epsilon}}) {
    absl::StatusOr<double> v = number(key);
    if (!v.ok()) return v.status();
    *field = *v;
  }
  absl::StatusOr<double> steps = number("steps");
  if (!steps.ok()) return steps.status();
  ledger.steps = static_cast<int64_t>(*steps);
  return ledger;
}

const std::vector<double>& DefaultRdpOrders() {
  static const std::vector<double>* orders = [] {
    auto* v = new std::vector<double>{1.25, 1.5};
    for (int a = 2; a <= 64; ++a) v->push_back(a);
    v->insert(v->end(), {128.0, 256.0, 512.0});
    return v;
  }();
  return *orders;
}

absl::StatusOr<double> RdpSubsampledGaussian(double sigma, double q,
                                             double alpha) {
  if (!(alpha > 1.0) || !(sigma > 0.0) || !(q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "rdp needs alpha > 1, sigma > 0, q in [0, 1]; got %g, %g, %g", alpha,
        sigma, q));
  }
  if (q == 0.0) return 0.0;
  if (q == 1.0) return alpha / (2.0 * sigma * sigma);
  const double log_a = alpha == std::floor(alpha)
                           ? LogAInteger(sigma, q, static_cast<int>(alpha))
                           : LogAFractional(sigma, q, alpha);
  const double rdp = log_a / (alpha - 1.0);
  if (!std::isfinite(rdp)) {
    return absl::InternalError(absl::StrFormat(
        "rdp overflow at sigma=%g q=%g alpha=%g", sigma, q, alpha));
  }
  return std::max(rdp, 0.0);
}

double RdpToEpsilon(const std::vector<double>& orders,
                    const std::vector<double>& rdp, int64_t steps, double delta,
                    double* best_order) {
  double best = kInfiniteEpsilon;
  double order = 0.0;
  for (size_t k = 0; k < orders.size(); ++k) {
    const double eps = static_cast<double>(steps) * rdp[k] +
                       std::log(1.0 / delta) / (orders[k] - 1.0);
    if (eps < best) {
      best = eps;
      order = orders[k];
    }
  }
  if (best_order != nullptr) *best_order = order;
  return best;
}

absl::StatusOr<double> ComputeEpsilon(double sigma, double q, int64_t steps,
                                      double delta,
                                      const std::vector<double>& orders,
                                      double* best_order) {
  if (steps < 1) return absl::InvalidArgumentError("steps must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (sigma == 0.0) return kInfiniteEpsilon;
  std::vector<double> rdp;
  rdp.reserve(orders.size());
  for (double alpha : orders) {
    absl::StatusOr<double> r = RdpSubsampledGaussian(sigma, q, alpha);
    if (!r.ok()) return r.status();
    rdp.push_back(*r);
  }
  return RdpToEpsilon(orders, rdp, steps, delta, best_order);
}

absl::StatusOr<NoiseCalibration> CalibrateSigma(const PrivacyParams& target) {
  if (!(target.q > 0.0 && target.q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must lie in (0, 1], got %g", target.q));
  }
  NoiseCalibration out;
  out.rdp_orders = DefaultRdpOrders();
  if (target.noise_disabled()) return out;
  if (!(target.epsilon > 0.0)) {
    return absl::InvalidArgumentError("target epsilon must be positive");
  }
  auto eps = [&](double sigma, double* order) {
    return ComputeEpsilon(sigma, target.q, target.steps, target.delta,
                          out.rdp_orders, order);
  };
  double order = 0.0;
  absl::StatusOr<double> at_min = eps(kMinSigma, &order);
  if (!at_min.ok()) return at_min.status();
  if (*at_min <= target.epsilon) {
    out.sigma = kMinSigma;
    out.achieved_epsilon = *at_min;
    out.best_order = order;
    return out;
  }
  absl::StatusOr<double> at_max = eps(kMaxSigma, nullptr);
  if (!at_max.ok()) return at_max.status();
  if (*at_max > target.epsilon) {
    return absl::OutOfRangeError(absl::StrFormat(
        "target epsilon %g unreachable: sigma in [%g, %g] gives epsilon in "
        "[%g, %g] for q=%g, steps=%d, delta=%g",
        target.epsilon, kMinSigma, kMaxSigma, *at_max, *at_min, target.q,
        target.steps, target.delta));
  }
  double lo = kMinSigma;  // eps(lo) > target
  double hi = kMaxSigma;  // eps(hi) <= target
  double eps_hi = *at_max;
  while (hi > lo * (1.0 + 1e-3)) {
    const double mid = std::sqrt(lo * hi);
    absl::StatusOr<double> e = eps(mid, nullptr);
    if (!e.ok()) return e.status();
    if (*e <= target.epsilon) {
      hi = mid;
      eps_hi = *e;
    } else {
      lo = mid;
    }
  }
  out.sigma = hi;
  out.achieved_epsilon = eps_hi;
  static_cast<void>(eps(hi, &out.best_order));
  return out;
}

int64_t StepsPerEpoch(int64_t n, double expected_lot_size) {
  return static_cast<int64_t>(
      std::ceil(static_cast<double>(n) / expected_lot_size - 1e-12));
}

}  // namespace dpsynth
