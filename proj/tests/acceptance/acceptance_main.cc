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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Criteria can be selected by number:
//   acceptance_main 1 2 5

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "dpsynth/base/random.h"
#include "dpsynth/bench/experiment.h"
#include "dpsynth/bench/runner.h"
#include "dpsynth/data/sampling.h"
#include "dpsynth/data/table.h"
#include "dpsynth/data/toy_data.h"
#include "dpsynth/metrics/classification.h"
#include "dpsynth/metrics/privacy.h"
#include "dpsynth/metrics/quality.h"
#include "dpsynth/mia/attack.h"
#include "dpsynth/nn/autodiff.h"
#include "dpsynth/nn/network.h"
#include "dpsynth/privacy/accountant.h"
#include "dpsynth/synth/ctgan.h"
#include "dpsynth/synth/gaussian_copula.h"
#include "testing/mia_fixtures.h"
#include "testing/test_tables.h"

namespace dpsynth {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Unwraps a value that the harness expects to be present.
template <typename T>
T Must(absl::StatusOr<T> value, const char* what) {
  if (!value.ok()) {
    std::fprintf(stderr, "%s: %s\n", what,
                 std::string(value.status().message()).c_str());
    std::abort();
  }
  return *std::move(value);
}

// ---------------------------------------------------------------------------
// 1. Per-sample gradients.

namespace gradients {

using nn::Activation;
using nn::BoundParams;
using nn::LayerSpec;
using nn::Matrix;
using nn::Mlp;
using nn::ParamLayout;
using nn::ParamVector;
using nn::Var;

struct Net {
  ParamLayout layout;
  Mlp mlp;
  ParamVector params;
};

// `smooth` restricts hidden layers to tanh. A gradient penalty contains the
// input gradient, which jumps where a LeakyReLU pre-activation changes sign,
// so central differences are only a valid oracle for it on smooth nets.
Net RandomNet(Rng& rng, bool smooth) {
  Net net;
  const int input = UniformInt(rng, 1, 4);
  const int output = UniformInt(rng, 1, 3);
  std::vector<LayerSpec> hidden;
  const int depth = UniformInt(rng, 1, 2);
  for (int l = 0; l < depth; ++l) {
    hidden.push_back({UniformInt(rng, 2, 5),
                      smooth || UniformInt(rng, 0, 1) ? Activation::kTanh
                                            : Activation::kLeakyRelu,
                      UniformInt(rng, 0, 1) == 1});
  }
  net.mlp = Mlp(nn::NetSpec{input, hidden, output}, "net", net.layout);
  net.params.layout = net.layout;
  net.params.values = Eigen::VectorXd::Zero(net.layout.size());
  net.mlp.Initialize(net.params.values, net.layout, rng);
  for (const nn::TensorSpec& t : net.layout.tensors()) {
    if (t.rows != 1) continue;
    for (int k = 0; k < t.size(); ++k) {
      net.params.values[t.offset + k] = 0.1 * StandardNormal(rng);
    }
  }
  return net;
}

using LossFn = std::function<Var(const Mlp&, const BoundParams&, const Matrix&)>;

Var SquaredLoss(const Mlp& mlp, const BoundParams& params, const Matrix& x) {
  return nn::RowSum(nn::Square(nn::AddScalar(*mlp.Forward(params, nn::Input(x)),
                                             -0.3)));
}

// Critic output plus a gradient penalty on the input (double backprop).
Var PenaltyLoss(const Mlp& mlp, const BoundParams& params, const Matrix& x) {
  const Var input = nn::Input(x, false, true);
  const Var critic = nn::SliceCols(*mlp.Forward(params, input), 0, 1);
  const Var grad = nn::Grad(critic, nn::Constant(Matrix::Ones(x.rows(), 1), true),
                            {input})[0];
  const Var norm = nn::Sqrt(nn::AddScalar(nn::RowSum(nn::Square(grad)), 1e-12));
  return nn::Add(critic, nn::Scale(nn::Square(nn::AddScalar(norm, -1.0)), 10.0));
}

Matrix Losses(const Net& net, const ParamVector& params, const Matrix& x,
              const LossFn& loss) {
  BoundParams bound(params);
  return loss(net.mlp, bound, x)->value();
}

Matrix FiniteDifferences(const Net& net, const Matrix& x, const LossFn& loss) {
  constexpr double kStep = 1e-5;
  Matrix out(x.rows(), net.layout.size());
  for (int k = 0; k < net.layout.size(); ++k) {
    ParamVector plus = net.params, minus = net.params;
    plus.values[k] += kStep;
    minus.values[k] -= kStep;
    out.col(k) = (Losses(net, plus, x, loss) - Losses(net, minus, x, loss)) /
                 (2.0 * kStep);
  }
  return out;
}

double MaxRelativeError(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a(i) - b(i));
    if (diff < 1e-8) continue;  // both effectively zero
    worst = std::max(worst, diff / std::max(std::abs(a(i)), std::abs(b(i))));
  }
  return worst;
}

Outcome Run() {
  Rng rng = MakeRng(2024, 1);
  double worst_fd = 0.0, worst_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool penalty = trial % 2 == 1;
    const Net net = RandomNet(rng, penalty);
    const int batch = UniformInt(rng, 2, 5);
    Matrix x(batch, net.mlp.spec().input_dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = StandardNormal(rng);
    const LossFn loss = penalty ? LossFn(PenaltyLoss) : LossFn(SquaredLoss);
    BoundParams bound(net.params);
    const Var losses = loss(net.mlp, bound, x);
    auto per_sample = bound.PerSampleGradients(losses);
    if (!per_sample.ok()) {
      return {false, std::string(per_sample.status().message())};
    }
    const Matrix ps = *per_sample;
    worst_fd = std::max(worst_fd, MaxRelativeError(ps, FiniteDifferences(net, x, loss)));
    BoundParams batch_bound(net.params);
    const Eigen::VectorXd total =
        batch_bound.Gradient(nn::Sum(loss(net.mlp, batch_bound, x)));
    worst_sum = std::max(
        worst_sum, (ps.colwise().sum().transpose() - total).cwiseAbs().maxCoeff());
  }
  return {worst_fd < 1e-4 && worst_sum <= 1e-9,
          absl::StrFormat("100 nets: max rel err vs finite differences %.2e "
                          "(< 1e-4), max |row sum - batch grad| %.2e (<= 1e-9)",
                          worst_fd, worst_sum)};
}

}  // namespace gradients

// ---------------------------------------------------------------------------
// 2. Accountant.

Outcome RunAccountant() {
  Rng rng = MakeRng(2024, 2);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + UniformDouble(rng) * (std::log(hi) - std::log(lo)));
  };
  int audited = 0, audit_failures = 0, attempts = 0;
  while (audited < 50 && attempts < 1000) {
    ++attempts;
    PrivacyParams p{log_uniform(0.5, 20.0), log_uniform(1e-7, 1e-4),
                    log_uniform(1e-3, 0.2), UniformInt(rng, 10, 5000)};
    auto cal = CalibrateSigma(p);
    if (!cal.ok()) continue;  // unreachable within the sigma bounds
    ++audited;
    auto eps = ComputeEpsilon(cal->sigma, p.q, p.steps, p.delta);
    if (!eps.ok() || !(*eps <= p.epsilon)) ++audit_failures;
  }

  // Without subsampling the Gaussian mechanism has RDP alpha / (2 sigma^2).
  auto exact = RdpSubsampledGaussian(1.0, 1.0, 2.0);
  const bool exact_ok = exact.ok() && *exact == 1.0;
  double worst_closed_form = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double sigma = log_uniform(0.3, 10.0);
    const double alpha = 1.0 + UniformInt(rng, 1, 63);
    auto rdp = RdpSubsampledGaussian(sigma, 1.0, alpha);
    const double expected = alpha / (2.0 * sigma * sigma);
    worst_closed_form = std::max(
        worst_closed_form, rdp.ok() ? std::abs(*rdp - expected) / expected : 1.0);
  }

  int monotone_failures = 0;
  for (int i = 0; i < 200; ++i) {
    const double sigma = log_uniform(0.5, 5.0);
    const double q = log_uniform(1e-3, 0.5);
    const int64_t steps = UniformInt(rng, 1, 2000);
    const double delta = log_uniform(1e-7, 1e-4);
    const double alpha = 1.0 + UniformInt(rng, 1, 31);
    const double e = *ComputeEpsilon(sigma, q, steps, delta);
    const bool ok =
        *ComputeEpsilon(sigma * 1.2, q, steps, delta) <= e &&
        *ComputeEpsilon(sigma, std::min(1.0, q * 1.2), steps, delta) >= e &&
        *ComputeEpsilon(sigma, q, steps + 10, delta) >= e &&
        *ComputeEpsilon(sigma, q, steps, delta * 0.5) >= e &&
        *RdpSubsampledGaussian(sigma, q, alpha + 1.0) >=
            *RdpSubsampledGaussian(sigma, q, alpha) &&
        *RdpSubsampledGaussian(sigma * 1.2, q, alpha) <=
            *RdpSubsampledGaussian(sigma, q, alpha);
    if (!ok) ++monotone_failures;
  }
  return {audited == 50 && audit_failures == 0 && exact_ok &&
              worst_closed_form < 1e-12 && monotone_failures == 0,
          absl::StrFormat("%d/50 calibrations re-audit to eps <= target; "
                          "RDP(q=1,sigma=1,alpha=2) = %.17g; q=1 closed-form "
                          "rel err %.1e; %d/200 monotonicity violations",
                          audited - audit_failures, exact.ok() ? *exact : -1.0,
                          worst_closed_form, monotone_failures)};
}

// ---------------------------------------------------------------------------
// 3. DP-CTGAN structural privacy.

class PrivacyAudit : public TrainingObserver {
 public:
  void OnDiscriminatorStep(const DiscriminatorStepInfo& info) override {
    ++discriminator_steps;
    if (!info.noised) ++unnoised;
    for (double norm : info.clipped_norms) {
      worst_ratio = std::max(worst_ratio, norm / info.clip_norm);
      ++clipped_samples;
    }
  }
  void OnGeneratorStep(const GeneratorStepInfo& info) override {
    ++generator_steps;
    if (info.touched_private_data) ++traced_generator_steps;
  }

  int64_t discriminator_steps = 0;
  int64_t generator_steps = 0;
  int64_t traced_generator_steps = 0;
  int64_t unnoised = 0;
  int64_t clipped_samples = 0;
  double worst_ratio = 0.0;
};

CtganConfig DeskCtgan(int epochs, int batch) {
  CtganConfig config;
  config.epochs = epochs;
  config.batch_size = batch;
  config.embedding_dim = 32;
  config.generator_dims = {64, 64};
  config.discriminator_dims = {64, 64};
  return config;
}

Outcome RunStructuralPrivacy() {
  const DataTable train = MakeToyDataset(ToyDatasetSpec{}, 3);
  PrivacyAudit audit;
  auto model = CtganModel::FitPrivate(train, DeskCtgan(10, 100),
                                      PrivacyTarget{1.0, 1e-5, 1.0}, 5, &audit);
  if (!model.ok()) return {false, std::string(model.status().message())};
  const DpLedger ledger = *(*model)->ledger();
  const bool pass = audit.clipped_samples > 0 && audit.worst_ratio <= 1.0 + 1e-12 &&
                    audit.unnoised == 0 && audit.generator_steps > 0 &&
                    audit.traced_generator_steps == 0 &&
                    ledger.steps == audit.discriminator_steps;
  return {pass,
          absl::StrFormat("%d clipped per-sample norms, max norm/C = %.15g; "
                          "%d/%d generator steps traced to real rows; ledger "
                          "steps %d vs %d discriminator updates (sigma %.3f, "
                          "eps %.3f)",
                          audit.clipped_samples, audit.worst_ratio,
                          audit.traced_generator_steps, audit.generator_steps,
                          ledger.steps, audit.discriminator_steps, ledger.sigma,
                          ledger.achieved_epsilon)};
}

// ---------------------------------------------------------------------------
// 4. Copula fidelity.

Outcome RunCopula() {
  const DataTable cr = MakeToyDataset(*ToyPreset("cr"), 4);
  auto model = GaussianCopula::Fit(cr);
  if (!model.ok()) return {false, std::string(model.status().message())};
  auto synth = (*model)->Sample(10000, 6);
  if (!synth.ok()) return {false, std::string(synth.status().message())};
  const double train_minority = MinorityFraction(cr);
  const double synth_minority = MinorityFraction(*synth);

  ToyDatasetSpec small;
  small.categorical_features = 1;  // plus the categorical target
  small.continuous_features = 2;
  const DataTable toy = MakeToyDataset(small, 8);
  auto toy_model = GaussianCopula::Fit(toy);
  if (!toy_model.ok()) return {false, std::string(toy_model.status().message())};
  auto toy_synth = (*toy_model)->Sample(toy.num_rows(), 9);
  if (!toy_synth.ok()) return {false, std::string(toy_synth.status().message())};
  auto quality = EvaluateQuality(toy, *toy_synth);
  if (!quality.ok()) return {false, std::string(quality.status().message())};

  const bool pass = std::abs(synth_minority - train_minority) <= 1.5 &&
                    quality->column_shape_mean >= 0.85;
  return {pass, absl::StrFormat(
                    "CR-sized minority %.2f%% -> %.2f%% (|diff| <= 1.5); "
                    "2-continuous/2-categorical column_shapes %.4f (>= 0.85)",
                    train_minority, synth_minority, quality->column_shape_mean)};
}

// ---------------------------------------------------------------------------
// 5. Metric oracles.

namespace oracles {

constexpr int kBins = 10;

TableSchema SmallSchema() {
  return *TableSchema::Create(
      {ColumnMeta::Continuous("x0", 0.0, 10.0),
       ColumnMeta::Categorical("c0", {"a", "b", "c"}),
       ColumnMeta::Continuous("x1", 0.0, 10.0),
       ColumnMeta::Categorical("y", {"no", "yes"})},
      "y");
}

// Continuous cells sit on a half-unit grid so bin membership is unambiguous.
DataTable RandomSmallTable(int rows, Rng& rng) {
  const TableSchema schema = SmallSchema();
  std::vector<double> cells;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < schema.num_columns(); ++c) {
      const ColumnMeta& meta = schema.column(c);
      cells.push_back(meta.is_categorical()
                          ? UniformInt(rng, 0, meta.num_categories() - 1)
                          : 0.5 * UniformInt(rng, 0, 20));
    }
  }
  return Must(DataTable::Create(schema, std::move(cells)), "table");
}

std::vector<double> Column(const DataTable& t, int c) {
  std::vector<double> v;
  for (int r = 0; r < t.num_rows(); ++r) v.push_back(t.at(r, c));
  return v;
}

int Code(const TableSchema& schema, int c, double v) {
  if (schema.column(c).is_categorical()) return static_cast<int>(v);
  return std::min(kBins - 1, static_cast<int>(std::floor(v)));  // unit bins
}

int Cells(const TableSchema& schema, int c) {
  return schema.column(c).is_categorical() ? schema.column(c).num_categories()
                                           : kBins;
}

// Half the L1 distance between the empirical distributions of `key` values.
double TvdByEnumeration(const std::vector<int>& a, const std::vector<int>& b,
                        int cells) {
  double total = 0.0;
  for (int k = 0; k < cells; ++k) {
    double fa = 0, fb = 0;
    for (int v : a) fa += v == k;
    for (int v : b) fb += v == k;
    total += std::abs(fa / a.size() - fb / b.size());
  }
  return 0.5 * total;
}

double ShapeOracle(const DataTable& real, const DataTable& synth, int c) {
  const TableSchema& s = real.schema();
  if (!s.column(c).is_categorical()) {
    return 1.0 - testing::KsStatistic(Column(real, c), Column(synth, c));
  }
  std::vector<int> a, b;
  for (double v : Column(real, c)) a.push_back(static_cast<int>(v));
  for (double v : Column(synth, c)) b.push_back(static_cast<int>(v));
  return 1.0 - TvdByEnumeration(a, b, s.column(c).num_categories());
}

bool Constant(const std::vector<double>& v) {
  return std::set<double>(v.begin(), v.end()).size() == 1;
}

double Correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (Constant(a) || Constant(b)) return 0.0;
  return testing::Pearson(a, b);
}

double TrendOracle(const DataTable& real, const DataTable& synth, int i, int j) {
  const TableSchema& s = real.schema();
  if (!s.column(i).is_categorical() && !s.column(j).is_categorical()) {
    const auto ri = Column(real, i), rj = Column(real, j);
    const auto si = Column(synth, i), sj = Column(synth, j);
    if ((Constant(ri) || Constant(rj)) && (Constant(si) || Constant(sj))) {
      return 1.0;
    }
    return 1.0 - std::abs(Correlation(ri, rj) - Correlation(si, sj)) / 2.0;
  }
  auto joint = [&](const DataTable& t) {
    std::vector<int> keys;
    for (int r = 0; r < t.num_rows(); ++r) {
      keys.push_back(Code(s, i, t.at(r, i)) * Cells(s, j) + Code(s, j, t.at(r, j)));
    }
    return keys;
  };
  return 1.0 - TvdByEnumeration(joint(real), joint(synth), Cells(s, i) * Cells(s, j));
}

double DistanceOracle(const DataTable& a, int ra, const DataTable& b, int rb) {
  const TableSchema& s = a.schema();
  double total = 0.0;
  for (int c = 0; c < s.num_columns(); ++c) {
    const double x = a.at(ra, c), y = b.at(rb, c);
    total += s.column(c).is_categorical() ? (x != y)
                                          : std::abs(x - y) / s.column(c).range_width();
  }
  return total / s.num_columns();
}

std::vector<double> ClosestOracle(const DataTable& queries, const DataTable& pool) {
  std::vector<double> out;
  for (int q = 0; q < queries.num_rows(); ++q) {
    double best = INFINITY;
    for (int p = 0; p < pool.num_rows(); ++p) {
      best = std::min(best, DistanceOracle(queries, q, pool, p));
    }
    out.push_back(best);
  }
  return out;
}

double MedianOracle(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double BalancedAccuracyOracle(const std::vector<int>& truth,
                              const std::vector<int>& pred) {
  double recall_sum = 0.0;
  for (int cls = 0; cls < 2; ++cls) {
    double hit = 0, total = 0;
    for (size_t k = 0; k < truth.size(); ++k) {
      if (truth[k] != cls) continue;
      total += 1;
      hit += pred[k] == cls;
    }
    recall_sum += hit / total;
  }
  return recall_sum / 2.0;
}

Outcome Run() {
  Rng rng = MakeRng(2024, 5);
  double worst = 0.0;
  std::string worst_metric = "none";
  auto track = [&](const char* metric, double got, double expected) {
    const double err = std::abs(got - expected);
    if (!(err <= worst)) {
      worst = std::isnan(err) ? INFINITY : err;
      worst_metric = metric;
    }
  };
  bool identity_ok = true, copy_ok = true;
  for (int trial = 0; trial < 300; ++trial) {
    const DataTable real = RandomSmallTable(UniformInt(rng, 2, 10), rng);
    const DataTable synth = RandomSmallTable(UniformInt(rng, 2, 10), rng);
    const DataTable holdout = RandomSmallTable(UniformInt(rng, 2, 10), rng);
    const int d = real.num_columns();

    const auto shapes = Must(ColumnShapes(real, synth), "column_shapes");
    for (int c = 0; c < d; ++c) track("column_shapes", shapes[c], ShapeOracle(real, synth, c));
    for (const PairTrend& p : Must(ColumnPairTrends(real, synth, kBins), "pair_trends")) {
      track("pair_trends", p.score, TrendOracle(real, synth, p.first, p.second));
    }

    const uint64_t seed = DeriveSeed(77, trial);
    const DcrBaseline dcr = Must(ComputeDcrBaseline(real, synth, seed), "dcr_baseline");
    const DataTable uniform = UniformRandomTable(real.schema(), synth.num_rows(), seed);
    const double m_syn = MedianOracle(ClosestOracle(synth, real));
    const double m_ran = MedianOracle(ClosestOracle(uniform, real));
    track("dcr_baseline", dcr.score, m_ran > 0 ? std::min(1.0, m_syn / m_ran) : 0.0);

    const auto to_train = ClosestOracle(synth, real);
    const auto to_holdout = ClosestOracle(synth, holdout);
    double closer = 0.0;
    for (size_t k = 0; k < to_train.size(); ++k) {
      closer += to_train[k] < to_holdout[k] ? 1.0 : to_train[k] == to_holdout[k] ? 0.5 : 0.0;
    }
    track("dcr_overfit", Must(ComputeDcrOverfit(real, holdout, synth), "dcr_overfit"),
          std::min(1.0, 2.0 * (1.0 - closer / to_train.size())));

    std::vector<int> truth, pred;
    const int n = UniformInt(rng, 2, 10);
    for (int k = 0; k < n; ++k) {
      truth.push_back(k < 1 ? 0 : k < 2 ? 1 : UniformInt(rng, 0, 1));
      pred.push_back(UniformInt(rng, 0, 1));
    }
    track("balanced_accuracy", Must(BalancedAccuracy(truth, pred), "balanced_accuracy"),
          BalancedAccuracyOracle(truth, pred));

    // Identity inputs and a verbatim copy of the training table.
    for (double s : Must(ColumnShapes(real, real), "column_shapes")) identity_ok &= s == 1.0;
    for (const PairTrend& p : Must(ColumnPairTrends(real, real, kBins), "pair_trends")) {
      identity_ok &= p.score == 1.0;
    }
    identity_ok &= Must(BalancedAccuracy(truth, truth), "balanced_accuracy") == 1.0;
    copy_ok &= Must(ComputeDcrBaseline(real, real, seed), "dcr_baseline").score == 0.0;
  }
  return {worst <= 1e-12 && identity_ok && copy_ok,
          absl::StrFormat("300 random <=10-row instances: max |metric - "
                          "enumeration| %.1e (%s, <= 1e-12); identity inputs "
                          "score 1: %s; copy of train dcr_baseline = 0: %s",
                          worst, worst_metric, identity_ok ? "yes" : "no",
                          copy_ok ? "yes" : "no")};
}

}  // namespace oracles

// ---------------------------------------------------------------------------
// Bench helpers shared by criteria 6, 8, 9 and 10.

ExperimentConfig DeskBench(const std::string& name) {
  ExperimentConfig config;
  config.name = name;
  config.datasets = {"ad"};
  config.toy_rows = 5000;
  config.hpo_trials = 3;
  config.search_space.n_estimators_lo = 100;
  config.search_space.n_estimators_hi = 200;
  config.ctgan = DeskCtgan(300, 500);
  return config;
}

std::string Label(const std::string& kind, const std::string& ablation) {
  GeneratorSpec spec{kind, kInfiniteEpsilon, *AblationFlags::Parse(ablation)};
  return spec.Label();
}

std::string FailureText(const BenchReport& report) {
  std::string out;
  for (const CellFailure& f : report.failures) {
    out += absl::StrFormat(" [%s/%s: %s]", f.dataset, f.generator, f.message);
  }
  return out;
}

// ---------------------------------------------------------------------------
// 6. Ablation direction.

Outcome RunAblation() {
  ExperimentConfig config = DeskBench("acceptance-ablation");
  config.generators = {"ctgan"};
  config.ablations = {"base", "no_penalty", "uni_trans"};
  config.epsilons = {kInfiniteEpsilon};
  auto report = RunBench(config);
  if (!report.ok()) return {false, std::string(report.status().message())};
  if (!report->failures.empty()) return {false, "cell failures:" + FailureText(*report)};
  auto mean = [&](const std::string& ablation) {
    return MeanOverSeeds(report->rows, "ad", Label("ctgan", ablation),
                         kInfiniteEpsilon, "balanced_accuracy");
  };
  const double base = mean("base");
  const double no_penalty = mean("no_penalty");
  const double uni_trans = mean("uni_trans");
  return {no_penalty <= base - 0.05 && std::abs(uni_trans - base) <= 0.05,
          absl::StrFormat("mean balanced accuracy over 3 seeds: base %.4f, "
                          "no_penalty %.4f (needs <= base - 0.05), uni_trans "
                          "%.4f (needs within 0.05 of base)",
                          base, no_penalty, uni_trans)};
}

// ---------------------------------------------------------------------------
// 7. Membership inference calibration.

Outcome RunMia() {
  // Fair coin: the discriminator ignores the data entirely.
  const DataTable leak_train = testing::OutlierCanaryTable(500, 3, 21);
  AttackConfig coin_config;
  coin_config.discriminator = DiscriminatorKind::kFairCoin;
  auto coin = RunAttack(LeakyGeneratorFactory(), leak_train, coin_config, 21);
  if (!coin.ok()) return {false, std::string(coin.status().message())};

  auto leaky = RunAttack(LeakyGeneratorFactory(), leak_train, AttackConfig{}, 21);
  if (!leaky.ok()) return {false, std::string(leaky.status().message())};

  const DataTable train = MakeToyDataset(ToyDatasetSpec{}, 31);
  // Shadow and victim sets hold 200 or 201 rows; a public schedule keeps the
  // step count from revealing which.
  CtganConfig shadow = DeskCtgan(20, 50);
  shadow.dp_steps_per_epoch = 4;
  GeneratorFactory dp_ctgan = SynthesizerFactory(
      [&](const DataTable& t, uint64_t seed)
          -> absl::StatusOr<std::unique_ptr<Synthesizer>> {
        auto model = CtganModel::FitPrivate(t, shadow, PrivacyTarget{1.0, 1e-5, 1.0},
                                            seed);
        if (!model.ok()) return model.status();
        return std::unique_ptr<Synthesizer>(std::move(*model));
      });
  auto dp = RunAttack(dp_ctgan, train, AttackConfig{}, 32);
  if (!dp.ok()) return {false, std::string(dp.status().message())};

  const bool pass = coin->trials == 1000 &&
                    std::abs(coin->success_rate - 0.5) <= 0.047 &&
                    leaky->success_rate > 0.9 &&
                    std::abs(dp->success_rate - 0.5) <= 0.06;
  return {pass,
          absl::StrFormat("fair coin %.3f over %d trials (0.5 +/- 0.047); "
                          "leaky generator %.3f (> 0.9); DP-CTGAN eps=1 %.3f "
                          "(0.5 +/- 0.06)",
                          coin->success_rate, coin->trials, leaky->success_rate,
                          dp->success_rate)};
}

// ---------------------------------------------------------------------------
// 8. Privacy-utility direction.

Outcome RunPrivacyUtility() {
  ExperimentConfig config = DeskBench("acceptance-privacy-utility");
  config.generators = {"dp_ctgan"};
  config.epsilons = {1.0, 10.0, kInfiniteEpsilon};
  config.ctgan.epochs = 60;
  auto report = RunBench(config);
  if (!report.ok()) return {false, std::string(report.status().message())};
  if (!report->failures.empty()) return {false, "cell failures:" + FailureText(*report)};
  std::vector<double> means;
  for (double eps : config.epsilons) {
    means.push_back(MeanOverSeeds(report->rows, "ad", "dp_ctgan", eps,
                                  "balanced_accuracy"));
  }
  const bool pass = means[0] <= means[1] && means[1] <= means[2];
  return {pass, absl::StrFormat("5000-row imbalanced toy, mean balanced "
                                "accuracy over 3 seeds: eps=1 %.4f, eps=10 "
                                "%.4f, eps=inf %.4f (non-decreasing)",
                                means[0], means[1], means[2])};
}

// ---------------------------------------------------------------------------
// 9. Determinism.

absl::StatusOr<std::string> ResultsFile(const ExperimentConfig& config,
                                        const std::filesystem::path& dir) {
  auto report = RunBench(config);
  if (!report.ok()) return report.status();
  if (auto status = WriteBenchReport(*report, config, dir.string()); !status.ok()) {
    return status;
  }
  std::ifstream in(dir / "results.csv", std::ios::binary);
  std::stringstream bytes;
  bytes << in.rdbuf();
  return bytes.str();
}

Outcome RunDeterminism() {
  ExperimentConfig config;
  config.name = "acceptance-determinism";
  config.datasets = {"cr", "bc"};
  config.toy_rows = 600;
  config.generators = {"gaussian_copula", "ctgan", "dp_ctgan", "tvae", "dp_tvae"};
  config.epsilons = {1.0, kInfiniteEpsilon};
  config.seeds = {0};
  config.hpo_trials = 2;
  config.ctgan = DeskCtgan(5, 100);
  config.tvae.epochs = 5;
  config.tvae.batch_size = 100;
  const auto root = std::filesystem::temp_directory_path() / "dpsynth_acceptance";
  auto first = ResultsFile(config, root / "run1");
  auto second = ResultsFile(config, root / "run2");
  if (!first.ok()) return {false, std::string(first.status().message())};
  if (!second.ok()) return {false, std::string(second.status().message())};
  const int lines = static_cast<int>(std::count(first->begin(), first->end(), '\n'));
  return {*first == *second && lines > 1,
          absl::StrFormat("results.csv rerun: %d lines, %s", lines,
                          *first == *second ? "byte-identical" : "DIFFERENT")};
}

// ---------------------------------------------------------------------------
// 10. Balanced-subset pipeline.

Outcome RunBalanced() {
  const std::vector<std::string> suite = {"ad", "bc", "bm", "cc", "cr", "gm"};
  std::string fractions;
  bool exact = true;
  for (const std::string& id : suite) {
    const DataTable data = MakeToyDataset(*ToyPreset(id, 2000), 10);
    auto balanced = DownsampleBalanced(data, 11);
    if (!balanced.ok()) return {false, std::string(balanced.status().message())};
    const double fraction = MinorityFraction(*balanced);
    exact &= fraction == 50.0;
    fractions += absl::StrFormat(" %s=%.1f%%", id, fraction);
  }

  ExperimentConfig config;
  config.name = "acceptance-balanced";
  config.datasets = suite;
  config.toy_rows = 2000;
  config.balanced = true;
  config.generators = {"gaussian_copula", "ctgan", "dp_ctgan", "tvae", "dp_tvae"};
  config.epsilons = {1.0, kInfiniteEpsilon};
  config.seeds = {0};
  config.hpo_trials = 1;
  config.ctgan = DeskCtgan(30, 100);
  config.tvae.epochs = 30;
  config.tvae.batch_size = 100;
  auto report = RunBench(config);
  if (!report.ok()) return {false, std::string(report.status().message())};
  int cells = 0, collapsed = 0;
  for (const ResultRow& row : report->rows) {
    if (row.metric != "synthetic_minority_percent" || row.generator == kOriginalGenerator) {
      continue;
    }
    ++cells;
    if (!(row.value > 0.0 && row.value < 100.0)) ++collapsed;
  }
  const bool pass = exact && report->failures.empty() && cells > 0 && collapsed == 0;
  return {pass, absl::StrFormat("downsample minority:%s; %d generator cells "
                                "on balanced input, %d emit a single class, "
                                "%d failed%s",
                                fractions, cells, collapsed,
                                static_cast<int>(report->failures.size()),
                                FailureText(*report))};
}

}  // namespace
}  // namespace dpsynth

int main(int argc, char** argv) {
  using dpsynth::Outcome;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, dpsynth::gradients::Run},      {2, dpsynth::RunAccountant},
      {3, dpsynth::RunStructuralPrivacy}, {4, dpsynth::RunCopula},
      {5, dpsynth::oracles::Run},        {6, dpsynth::RunAblation},
      {7, dpsynth::RunMia},              {8, dpsynth::RunPrivacyUtility},
      {9, dpsynth::RunDeterminism},      {10, dpsynth::RunBalanced},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& [number, run] : criteria) {
    if (!selected.empty() && !selected.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome outcome = run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", number,
                outcome.pass ? "PASS" : "FAIL", seconds, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
