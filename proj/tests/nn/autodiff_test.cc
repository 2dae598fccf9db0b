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

#include "dpsynth/nn/autodiff.h"

#include <cmath>
#include <functional>

#include "dpsynth/base/random.h"
#include "dpsynth/nn/network.h"
#include "gtest/gtest.h"

namespace dpsynth::nn {
namespace {

Matrix RandomMatrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = StandardNormal(rng);
  }
  return m;
}

struct SmallNet {
  ParamLayout layout;
  Mlp mlp;
  ParamVector params;
};

SmallNet MakeNet(int input, int output, std::vector<LayerSpec> hidden,
                 uint64_t seed) {
  SmallNet net;
  NetSpec spec{input, std::move(hidden), output};
  net.mlp = Mlp(spec, "net", net.layout);
  net.params.layout = net.layout;
  net.params.values = Eigen::VectorXd::Zero(net.layout.size());
  Rng rng = MakeRng(seed);
  net.mlp.Initialize(net.params.values, net.params.layout, rng);
  // Non-zero biases so every parameter matters.
  for (const TensorSpec& t : net.layout.tensors()) {
    if (t.rows == 1) {
      for (int k = 0; k < t.size(); ++k) {
        net.params.values[t.offset + k] = 0.1 * StandardNormal(rng);
      }
    }
  }
  return net;
}

using LossFn = std::function<Var(const Mlp&, const BoundParams&, const Matrix&)>;

Matrix LossValues(const SmallNet& net, const ParamVector& params,
                  const Matrix& x, const LossFn& loss) {
  BoundParams bound(params);
  return loss(net.mlp, bound, x)->value();
}

// Central differences of every per-sample loss against every parameter.
Matrix FiniteDifferenceGrads(const SmallNet& net, const Matrix& x,
                             const LossFn& loss, double h) {
  const int p = net.params.layout.size();
  Matrix out(x.rows(), p);
  for (int k = 0; k < p; ++k) {
    ParamVector plus = net.params;
    ParamVector minus = net.params;
    plus.values[k] += h;
    minus.values[k] -= h;
    out.col(k) = (LossValues(net, plus, x, loss) -
                  LossValues(net, minus, x, loss)) / (2.0 * h);
  }
  return out;
}

double MaxRelativeError(const Matrix& actual, const Matrix& expected) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < actual.rows(); ++r) {
    for (Eigen::Index c = 0; c < actual.cols(); ++c) {
      const double a = actual(r, c);
      const double e = expected(r, c);
      const double diff = std::abs(a - e);
      if (diff < 1e-8) continue;
      worst = std::max(worst, diff / std::max(std::abs(a), std::abs(e)));
    }
  }
  return worst;
}

Var SquaredOutputLoss(const Mlp& mlp, const BoundParams& params,
                      const Matrix& x) {
  const Var out = *mlp.Forward(params, Input(x));
  return RowSum(Square(AddScalar(out, -0.3)));
}

// Critic value plus gradient penalty, built with double backprop.
Var PenaltyLoss(const Mlp& mlp, const BoundParams& params, const Matrix& x) {
  const Var input = Input(x, /*private_data=*/false, /*requires_grad=*/true);
  const Var critic = *mlp.Forward(params, input);
  const Var grad = Grad(critic, Constant(Matrix::Ones(x.rows(), 1), true),
                        {input})[0];
  const Var norm = Sqrt(AddScalar(RowSum(Square(grad)), 1e-12));
  return Add(critic, Scale(Square(AddScalar(norm, -1.0)), 10.0));
}

TEST(ForwardTest, IdentityLayerPassesInputThrough) {
  ParamLayout layout;
  Mlp mlp(NetSpec{3, {}, 3}, "id", layout);
  ParamVector params{layout, Eigen::VectorXd::Zero(layout.size())};
  const TensorSpec& w = layout.tensor(0);
  for (int i = 0; i < 3; ++i) params.values[w.offset + i * 3 + i] = 1.0;
  Rng rng = MakeRng(1);
  const Matrix x = RandomMatrix(4, 3, rng);
  BoundParams bound(params);
  EXPECT_EQ((*mlp.Forward(bound, Input(x)))->value(), x);
}

TEST(ForwardTest, ReluOfNegativeIsZero) {
  const Var y = Relu(Input(Matrix::Constant(2, 3, -1.5)));
  EXPECT_TRUE(y->value().isZero(0.0));
}

TEST(ForwardTest, MatchesStraightLineEvaluation) {
  SmallNet net = MakeNet(4, 3,
                         {{5, Activation::kLeakyRelu, false},
                          {6, Activation::kTanh, true}},
                         7);
  Rng rng = MakeRng(8);
  const Matrix x = RandomMatrix(5, 4, rng);
  BoundParams bound(net.params);
  const Matrix got = (*net.mlp.Forward(bound, Input(x)))->value();

  auto tensor = [&](int slot) { return net.params.Tensor(slot); };
  for (int s = 0; s < 5; ++s) {
    std::vector<double> in(4);
    for (int j = 0; j < 4; ++j) in[j] = x(s, j);
    // Layer 0: leaky relu.
    const Matrix w0 = tensor(0), b0 = tensor(1);
    std::vector<double> a0(5);
    for (int o = 0; o < 5; ++o) {
      double z = b0(0, o);
      for (int j = 0; j < 4; ++j) z += in[j] * w0(j, o);
      a0[o] = z > 0 ? z : 0.2 * z;
    }
    // Layer 1: residual tanh.
    const Matrix w1 = tensor(2), b1 = tensor(3);
    std::vector<double> a1(11);
    for (int o = 0; o < 6; ++o) {
      double z = b1(0, o);
      for (int j = 0; j < 5; ++j) z += a0[j] * w1(j, o);
      a1[o] = std::tanh(z);
    }
    for (int j = 0; j < 5; ++j) a1[6 + j] = a0[j];
    const Matrix w2 = tensor(4), b2 = tensor(5);
    for (int o = 0; o < 3; ++o) {
      double z = b2(0, o);
      for (int j = 0; j < 11; ++j) z += a1[j] * w2(j, o);
      EXPECT_NEAR(got(s, o), z, 1e-12);
    }
  }
}

TEST(ForwardTest, RejectsWrongInputWidth) {
  SmallNet net = MakeNet(4, 2, {}, 1);
  BoundParams bound(net.params);
  EXPECT_FALSE(net.mlp.Forward(bound, Input(Matrix::Zero(2, 5))).ok());
}

TEST(PerSampleTest, MatchesFiniteDifferences) {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    SmallNet net = MakeNet(3, 2,
                           {{4, Activation::kLeakyRelu, false},
                            {4, Activation::kTanh, false}},
                           seed);
    Rng rng = MakeRng(seed, 1);
    const Matrix x = RandomMatrix(6, 3, rng);
    BoundParams bound(net.params);
    const auto grads =
        bound.PerSampleGradients(SquaredOutputLoss(net.mlp, bound, x));
    ASSERT_TRUE(grads.ok()) << grads.status();
    const Matrix fd = FiniteDifferenceGrads(net, x, SquaredOutputLoss, 1e-5);
    EXPECT_LT(MaxRelativeError(*grads, fd), 1e-4) << "seed " << seed;
  }
}

TEST(PerSampleTest, ResidualAndSoftmaxMatchFiniteDifferences) {
  SmallNet net = MakeNet(3, 4, {{5, Activation::kRelu, true}}, 11);
  Rng rng = MakeRng(12);
  const Matrix x = RandomMatrix(5, 3, rng);
  const Matrix target = RandomMatrix(5, 4, rng);
  LossFn loss = [&target](const Mlp& mlp, const BoundParams& params,
                          const Matrix& in) {
    const Var out = *mlp.Forward(params, Input(in));
    const Var heads = ApplyHeads(out,
                                 {{HeadSpec::Kind::kSoftmaxBlock, 0, 3},
                                  {HeadSpec::Kind::kUnitScalar, 3, 1}},
                                 0.2, nullptr);
    const Var ce = RowSum(Mul(LogSoftmax(SliceCols(out, 0, 3)),
                              Constant(target.leftCols(3), true)));
    return Add(RowSum(Square(heads)), ce);
  };
  BoundParams bound(net.params);
  const auto grads = bound.PerSampleGradients(loss(net.mlp, bound, x));
  ASSERT_TRUE(grads.ok()) << grads.status();
  EXPECT_LT(MaxRelativeError(*grads, FiniteDifferenceGrads(net, x, loss, 1e-5)),
            1e-4);
}

TEST(PerSampleTest, GradientPenaltyMatchesFiniteDifferences) {
  SmallNet net = MakeNet(3, 1,
                         {{6, Activation::kLeakyRelu, false},
                          {6, Activation::kLeakyRelu, false}},
                         21);
  Rng rng = MakeRng(22);
  const Matrix x = RandomMatrix(5, 3, rng);
  BoundParams bound(net.params);
  const auto grads = bound.PerSampleGradients(PenaltyLoss(net.mlp, bound, x));
  ASSERT_TRUE(grads.ok()) << grads.status();
  EXPECT_LT(MaxRelativeError(*grads, FiniteDifferenceGrads(net, x, PenaltyLoss,
                                                           1e-5)),
            1e-4);
}

TEST(PerSampleTest, RowsSumToBatchGradient) {
  SmallNet net = MakeNet(3, 1,
                         {{8, Activation::kLeakyRelu, false},
                          {8, Activation::kLeakyRelu, false}},
                         31);
  Rng rng = MakeRng(32);
  const Matrix x = RandomMatrix(9, 3, rng);
  BoundParams bound(net.params);
  const Var losses = PenaltyLoss(net.mlp, bound, x);
  const auto grads = bound.PerSampleGradients(losses);
  ASSERT_TRUE(grads.ok());
  const Eigen::VectorXd batch = bound.Gradient(Sum(losses));
  const Eigen::VectorXd summed = grads->colwise().sum().transpose();
  EXPECT_LT((summed - batch).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PerSampleTest, DuplicateSamplesGiveIdenticalRows) {
  SmallNet net = MakeNet(3, 2, {{4, Activation::kTanh, false}}, 41);
  Rng rng = MakeRng(42);
  Matrix x = RandomMatrix(4, 3, rng);
  x.row(3) = x.row(1);
  BoundParams bound(net.params);
  const auto grads =
      bound.PerSampleGradients(SquaredOutputLoss(net.mlp, bound, x));
  ASSERT_TRUE(grads.ok());
  EXPECT_EQ(RowMatrix(grads->row(3)), RowMatrix(grads->row(1)));
}

TEST(PerSampleTest, ZeroLossSampleHasZeroRow) {
  SmallNet net = MakeNet(3, 2, {{4, Activation::kTanh, false}}, 51);
  Rng rng = MakeRng(52);
  const Matrix x = RandomMatrix(3, 3, rng);
  Matrix mask = Matrix::Ones(3, 1);
  mask(1, 0) = 0.0;
  BoundParams bound(net.params);
  const Var losses =
      Mul(SquaredOutputLoss(net.mlp, bound, x), Constant(mask, true));
  const auto grads = bound.PerSampleGradients(losses);
  ASSERT_TRUE(grads.ok());
  EXPECT_TRUE(grads->row(1).isZero(0.0));
  EXPECT_FALSE(grads->row(0).isZero(0.0));
}

TEST(PerSampleTest, RejectsNonColumnLoss) {
  SmallNet net = MakeNet(3, 2, {}, 61);
  BoundParams bound(net.params);
  const Var out = *net.mlp.Forward(bound, Input(Matrix::Ones(2, 3)));
  EXPECT_FALSE(bound.PerSampleGradients(out).ok());
  EXPECT_FALSE(bound.PerSampleGradients(Sum(out)).ok());
}

TEST(PerSampleTest, RejectsOpsThatMixSamples) {
  SmallNet net = MakeNet(3, 1, {}, 71);
  BoundParams bound(net.params);
  const Var out = *net.mlp.Forward(bound, Input(Matrix::Ones(2, 3)));
  // Every row depends on the batch mean: not attributable per sample.
  const Var mixed = Add(out, BroadcastRows(SumRows(out), 2));
  EXPECT_FALSE(bound.PerSampleGradients(mixed).ok());
}

TEST(GradTest, AggregatedGradientMatchesFiniteDifferences) {
  Rng rng = MakeRng(81);
  const Matrix a = RandomMatrix(3, 4, rng);
  auto f = [](const Matrix& m) {
    const Var x = Input(m, false, true);
    return std::make_pair(x, Sum(Exp(Scale(Softmax(Mul(x, x)), 2.0))));
  };
  auto [x, y] = f(a);
  const Matrix g = Grad(y, Constant(Matrix::Ones(1, 1), false), {x})[0]->value();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      Matrix plus = a, minus = a;
      plus(r, c) += 1e-6;
      minus(r, c) -= 1e-6;
      const double fd =
          (f(plus).second->value()(0, 0) - f(minus).second->value()(0, 0)) /
          2e-6;
      EXPECT_NEAR(g(r, c), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(ProvenanceTest, PrivateDataPropagates) {
  const Var real = Input(Matrix::Ones(2, 2), /*private_data=*/true);
  const Var fake = Input(Matrix::Ones(2, 2));
  EXPECT_FALSE(DependsOnPrivateData(Tanh(fake)));
  EXPECT_TRUE(DependsOnPrivateData(Sum(Add(Tanh(fake), real))));
}

TEST(ParamVectorTest, JsonRoundTripIsExact) {
  SmallNet net = MakeNet(3, 2, {{4, Activation::kRelu, false}}, 91);
  const auto back = ParamVectorFromJson(
      nlohmann::json::parse(ParamVectorToJson(net.params).dump()));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->layout, net.params.layout);
  EXPECT_EQ(back->values, net.params.values);
}

TEST(GumbelSoftmaxTest, LowTemperatureIsNearlyOneHot) {
  Rng rng = MakeRng(101);
  Matrix logits = Matrix::Zero(200, 4);
  logits.col(2).setConstant(8.0);
  const Matrix y = GumbelSoftmax(Input(logits), 0.01, rng)->value();
  for (int r = 0; r < y.rows(); ++r) {
    Eigen::Index arg;
    EXPECT_GT(y.row(r).maxCoeff(&arg), 0.99);
  }
}

TEST(GumbelSoftmaxTest, UniformLogitsGiveUniformArgmax) {
  constexpr int kDraws = 100000;
  constexpr int kCategories = 4;
  Rng rng = MakeRng(102);
  const Matrix y =
      GumbelSoftmax(Input(Matrix::Zero(kDraws, kCategories)), 1.0, rng)
          ->value();
  std::vector<int> counts(kCategories, 0);
  for (int r = 0; r < kDraws; ++r) {
    Eigen::Index arg;
    y.row(r).maxCoeff(&arg);
    ++counts[arg];
    EXPECT_NEAR(y.row(r).sum(), 1.0, 1e-9);
  }
  const double p = 1.0 / kCategories;
  const double sd = std::sqrt(kDraws * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, kDraws * p, 3 * sd);
}

}  // namespace
}  // namespace dpsynth::nn
