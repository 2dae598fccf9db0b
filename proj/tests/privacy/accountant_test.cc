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

#include "dpsynth/base/random.h"
#include "gtest/gtest.h"

namespace dpsynth {
namespace {

// log E_{z ~ N(0, s^2)} [((1 - q) + q exp((2z - 1) / (2 s^2)))^alpha] by
// composite Simpson in log space. Independent of the closed-form series.
double QuadratureLogA(double sigma, double q, double alpha,
                      double step = 2e-3) {
  const double s2 = sigma * sigma;
  auto log_f = [&](double z) {
    const double ratio = (2.0 * z - 1.0) / (2.0 * s2);
    // log((1 - q) + q e^ratio), stable for large ratio.
    const double log_mix =
        ratio > 0 ? ratio + std::log(q + (1.0 - q) * std::exp(-ratio))
                  : std::log((1.0 - q) + q * std::exp(ratio));
    return alpha * log_mix - z * z / (2.0 * s2) -
           0.5 * std::log(2.0 * M_PI * s2);
  };
  const double lo = -40.0 * sigma;
  const double hi = alpha + 40.0 * sigma;
  const int n = 2 * static_cast<int>(std::ceil((hi - lo) / (2 * step)));
  const double h = (hi - lo) / n;
  double peak = -1e300;
  for (int i = 0; i <= n; ++i) peak = std::max(peak, log_f(lo + i * h));
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::exp(log_f(lo + i * h) - peak);
  }
  return peak + std::log(sum * h / 3.0);
}

double OracleRdp(double sigma, double q, double alpha, double step = 2e-3) {
  return QuadratureLogA(sigma, q, alpha, step) / (alpha - 1.0);
}

TEST(RdpTest, UnsubsampledClosedForm) {
  EXPECT_DOUBLE_EQ(*RdpSubsampledGaussian(1.0, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(*RdpSubsampledGaussian(2.0, 1.0, 8.0), 1.0);
}

TEST(RdpTest, VanishesAsSamplingRateVanishes) {
  EXPECT_EQ(*RdpSubsampledGaussian(1.0, 0.0, 4.0), 0.0);
  double previous = *RdpSubsampledGaussian(1.0, 1e-2, 4.0);
  for (double q : {1e-3, 1e-4, 1e-6}) {
    const double rdp = *RdpSubsampledGaussian(1.0, q, 4.0);
    EXPECT_LT(rdp, previous);
    previous = rdp;
  }
  EXPECT_LT(previous, 1e-10);
}

TEST(RdpTest, IntegerOrdersMatchQuadrature) {
  for (int alpha = 2; alpha <= 64; ++alpha) {
    const double got = *RdpSubsampledGaussian(1.0, 0.01, alpha);
    const double want = OracleRdp(1.0, 0.01, alpha);
    EXPECT_NEAR(got, want, 1e-6 * std::max(1.0, std::abs(want)))
        << "alpha " << alpha;
  }
}

TEST(RdpTest, FractionalOrdersMatchQuadrature) {
  for (double sigma : {0.8, 1.0, 2.0}) {
    for (double q : {0.01, 0.05, 0.3}) {
      for (double alpha : {1.25, 1.5, 2.5, 7.75}) {
        const double got = *RdpSubsampledGaussian(sigma, q, alpha);
        const double want = OracleRdp(sigma, q, alpha);
        EXPECT_NEAR(got, want, 1e-6 * std::max(1.0, std::abs(want)))
            << sigma << " " << q << " " << alpha;
      }
    }
  }
}

TEST(RdpTest, RejectsBadArguments) {
  EXPECT_FALSE(RdpSubsampledGaussian(1.0, 0.5, 1.0).ok());
  EXPECT_FALSE(RdpSubsampledGaussian(0.0, 0.5, 2.0).ok());
  EXPECT_FALSE(RdpSubsampledGaussian(1.0, 1.5, 2.0).ok());
}

TEST(EpsilonTest, StrictlyIncreasesWhenStepsDouble) {
  const double e1 = *ComputeEpsilon(1.0, 0.05, 500, 1e-5);
  const double e2 = *ComputeEpsilon(1.0, 0.05, 1000, 1e-5);
  EXPECT_GT(e2, e1);
}

TEST(EpsilonTest, ZeroRdpLeavesOnlyConversionTerm) {
  const std::vector<double>& orders = DefaultRdpOrders();
  const std::vector<double> zero(orders.size(), 0.0);
  const double eps = RdpToEpsilon(orders, zero, 1000, 1e-5);
  EXPECT_DOUBLE_EQ(eps, std::log(1e5) / 511.0);
}

TEST(EpsilonTest, AgreesWithDenseOrderSweep) {
  // Brute force over a much denser grid with quadrature RDP values.
  const double sigma = 1.0, q = 0.05, delta = 1e-5;
  const int64_t steps = 1000;
  double dense = 1e300;
  for (double alpha = 1.25; alpha <= 64.0; alpha += 0.25) {
    dense = std::min(dense, steps * OracleRdp(sigma, q, alpha) +
                                std::log(1.0 / delta) / (alpha - 1.0));
  }
  const double eps = *ComputeEpsilon(sigma, q, steps, delta);
  EXPECT_GE(eps, dense - 1e-6);
  EXPECT_LT(eps, dense * 1.02);
}

TEST(EpsilonTest, InfiniteWithoutNoise) {
  EXPECT_EQ(*ComputeEpsilon(0.0, 0.05, 10, 1e-5), kInfiniteEpsilon);
}

TEST(EpsilonTest, MonotoneOverRandomTuples) {
  Rng rng = MakeRng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const double sigma = 0.5 + 3.0 * UniformDouble(rng);
    const double q = 0.001 + 0.2 * UniformDouble(rng);
    const int64_t steps = 1 + UniformInt(rng, 0, 2000);
    const double base = *ComputeEpsilon(sigma, q, steps, 1e-5);
    EXPECT_LE(*ComputeEpsilon(sigma * 1.1, q, steps, 1e-5), base);
    EXPECT_GE(*ComputeEpsilon(sigma, q, steps + 50, 1e-5), base);
    EXPECT_GE(*ComputeEpsilon(sigma, std::min(1.0, q * 1.2), steps, 1e-5),
              base);
  }
}

TEST(CalibrateTest, RoundTripNeverExceedsTarget) {
  for (double eps : {1.0, 5.0, 10.0}) {
    const auto cal = CalibrateSigma({eps, 1e-5, 0.05, 6000});
    ASSERT_TRUE(cal.ok()) << cal.status();
    EXPECT_LE(*ComputeEpsilon(cal->sigma, 0.05, 6000, 1e-5), eps);
    EXPECT_LE(cal->achieved_epsilon, eps);
    if (cal->sigma > kMinSigma) {
      EXPECT_GT(*ComputeEpsilon(cal->sigma * (1 - 1e-3), 0.05, 6000, 1e-5),
                eps);
    }
  }
}

TEST(CalibrateTest, TighterTargetNeedsMoreNoise) {
  const auto strict = CalibrateSigma({1.0, 1e-5, 0.05, 6000});
  const auto loose = CalibrateSigma({10.0, 1e-5, 0.05, 6000});
  ASSERT_TRUE(strict.ok() && loose.ok());
  EXPECT_GT(strict->sigma, loose->sigma);
}

TEST(CalibrateTest, DeskConfigMatchesIndependentSearch) {
  // lot 40 of 800 training rows for 300 epochs.
  const double q = 40.0 / 800.0;
  const int64_t steps = 300 * StepsPerEpoch(800, 40.0);
  ASSERT_EQ(steps, 6000);
  const auto cal = CalibrateSigma({1.0, 1e-5, q, steps});
  ASSERT_TRUE(cal.ok());

  std::vector<double> orders;
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  auto oracle_eps = [&](double sigma) {
    double best = 1e300;
    for (double alpha : orders) {
      best = std::min(best, steps * OracleRdp(sigma, q, alpha, 2e-2) +
                                std::log(1e5) / (alpha - 1.0));
    }
    return best;
  };
  double lo = 0.3, hi = 100.0;
  for (int i = 0; i < 16; ++i) {
    const double mid = std::sqrt(lo * hi);
    (oracle_eps(mid) <= 1.0 ? hi : lo) = mid;
  }
  EXPECT_NEAR(cal->sigma, hi, 0.01 * hi);
}

TEST(CalibrateTest, InfiniteTargetDisablesNoise) {
  const auto cal = CalibrateSigma({kInfiniteEpsilon, 1e-5, 0.05, 100});
  ASSERT_TRUE(cal.ok());
  EXPECT_EQ(cal->sigma, 0.0);
}

TEST(CalibrateTest, UnreachableTargetIsDiagnosed) {
  const auto cal = CalibrateSigma({1e-4, 1e-5, 1.0, 100000});
  EXPECT_EQ(cal.status().code(), absl::StatusCode::kOutOfRange);
  EXPECT_NE(cal.status().message().find("unreachable"), std::string::npos);
}

TEST(CalibrateTest, LooseTargetReturnsFloor) {
  const auto cal = CalibrateSigma({1000.0, 1e-5, 0.01, 10});
  ASSERT_TRUE(cal.ok());
  EXPECT_EQ(cal->sigma, kMinSigma);
}

TEST(LedgerTest, JsonRoundTrip) {
  DpLedger ledger{1.23456789, 1.0, 0.05, 6000, 1e-5, 1.0, 0.99871};
  const auto back =
      DpLedgerFromJson(nlohmann::json::parse(DpLedgerToJson(ledger).dump()));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->sigma, ledger.sigma);
  EXPECT_EQ(back->steps, 6000);
  DpLedger open;
  const auto inf = DpLedgerFromJson(DpLedgerToJson(open));
  ASSERT_TRUE(inf.ok());
  EXPECT_EQ(inf->achieved_epsilon, kInfiniteEpsilon);
}

}  // namespace
}  // namespace dpsynth
