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

#include "dpsynth/nn/network.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "dpsynth/base/check.h"

namespace dpsynth::nn {

int ParamLayout::Add(std::string name, int rows, int cols) {
  DPSYNTH_CHECK(rows >= 1 && cols >= 1);
  tensors_.push_back({std::move(name), rows, cols, size_});
  size_ += rows * cols;
  return static_cast<int>(tensors_.size()) - 1;
}

std::vector<int> ParamLayout::Offsets() const {
  std::vector<int> offsets;
  offsets.reserve(tensors_.size());
  for (const TensorSpec& t : tensors_) offsets.push_back(t.offset);
  return offsets;
}

Matrix ParamVector::Tensor(int slot) const {
  const TensorSpec& t = layout.tensor(slot);
  return Eigen::Map<const RowMatrix>(values.data() + t.offset, t.rows, t.cols);
}

nlohmann::json ParamVectorToJson(const ParamVector& params) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const TensorSpec& t : params.layout.tensors()) {
    tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  }
  return {{"tensors", tensors},
          {"values", std::vector<double>(params.values.data(),
                                         params.values.data() +
                                             params.values.size())}};
}

absl::StatusOr<ParamVector> ParamVectorFromJson(const nlohmann::json& json) {
  if (!json.is_object() || !json.contains("tensors") ||
      !json.contains("values")) {
    return absl::InvalidArgumentError("parameter blob needs tensors and values");
  }
  ParamVector params;
  for (const auto& t : json["tensors"]) {
    const int rows = t.value("rows", 0);
    const int cols = t.value("cols", 0);
    if (rows < 1 || cols < 1) {
      return absl::InvalidArgumentError("parameter tensor with empty shape");
    }
    params.layout.Add(t.value("name", ""), rows, cols);
  }
  const std::vector<double> values = json["values"].get<std::vector<double>>();
  if (static_cast<int>(values.size()) != params.layout.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "parameter blob has %d values, layout needs %d", values.size(),
        params.layout.size()));
  }
  params.values = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  if (!params.AllFinite()) {
    return absl::InvalidArgumentError("parameter blob has non-finite values");
  }
  return params;
}

BoundParams::BoundParams(const ParamVector& params, bool trainable)
    : layout_(&params.layout), offsets_(params.layout.Offsets()) {
  const int count = static_cast<int>(params.layout.tensors().size());
  leaves_.reserve(count);
  for (int slot = 0; slot < count; ++slot) {
    leaves_.push_back(trainable ? Parameter(params.Tensor(slot), slot)
                                : Constant(params.Tensor(slot), false));
  }
}

absl::StatusOr<RowMatrix> BoundParams::PerSampleGradients(
    const Var& losses) const {
  return nn::PerSampleGradients(losses, offsets_, layout_->size());
}

Eigen::VectorXd BoundParams::Gradient(const Var& scalar_loss) const {
  DPSYNTH_CHECK(scalar_loss->rows() == 1 && scalar_loss->cols() == 1);
  return ParameterGradient(scalar_loss, Matrix::Ones(1, 1), offsets_,
                           layout_->size());
}

absl::Status NetSpec::Validate() const {
  if (input_dim < 1 || output_dim < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "network needs input and output widths >= 1, got %d and %d", input_dim,
        output_dim));
  }
  for (const LayerSpec& layer : hidden) {
    if (layer.width < 1) {
      return absl::InvalidArgumentError("hidden layer width must be >= 1");
    }
  }
  return absl::OkStatus();
}

Mlp::Mlp(NetSpec spec, const std::string& prefix, ParamLayout& layout)
    : spec_(std::move(spec)) {
  DPSYNTH_CHECK(spec_.Validate().ok());
  int width = spec_.input_dim;
  for (size_t i = 0; i < spec_.hidden.size(); ++i) {
    const LayerSpec& layer = spec_.hidden[i];
    weight_slots_.push_back(
        layout.Add(absl::StrFormat("%s.fc%d.w", prefix, i), width, layer.width));
    bias_slots_.push_back(
        layout.Add(absl::StrFormat("%s.fc%d.b", prefix, i), 1, layer.width));
    width = layer.residual ? width + layer.width : layer.width;
  }
  weight_slots_.push_back(
      layout.Add(absl::StrFormat("%s.out.w", prefix), width, spec_.output_dim));
  bias_slots_.push_back(
      layout.Add(absl::StrFormat("%s.out.b", prefix), 1, spec_.output_dim));
}

void Mlp::Initialize(Eigen::VectorXd& values, const ParamLayout& layout,
                     Rng& rng) const {
  for (size_t i = 0; i < weight_slots_.size(); ++i) {
    const TensorSpec& w = layout.tensor(weight_slots_[i]);
    const double bound = std::sqrt(6.0 / (w.rows + w.cols));
    for (int k = 0; k < w.size(); ++k) {
      values[w.offset + k] = bound * (2.0 * UniformDouble(rng) - 1.0);
    }
    const TensorSpec& b = layout.tensor(bias_slots_[i]);
    values.segment(b.offset, b.size()).setZero();
  }
}

namespace {

Var Activate(const Var& x, Activation activation, double leaky_slope) {
  switch (activation) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return Relu(x);
    case Activation::kLeakyRelu: return LeakyRelu(x, leaky_slope);
    case Activation::kTanh: return Tanh(x);
  }
  return x;
}

}  // namespace

absl::StatusOr<Var> Mlp::Forward(const BoundParams& params,
                                 const Var& input) const {
  if (input->cols() != spec_.input_dim) {
    return absl::InvalidArgumentError(
        absl::StrFormat("network expects input width %d, got %d",
                        spec_.input_dim, input->cols()));
  }
  Var h = input;
  for (size_t i = 0; i < spec_.hidden.size(); ++i) {
    const LayerSpec& layer = spec_.hidden[i];
    Var z = AddRow(MatMul(h, params[weight_slots_[i]]), params[bias_slots_[i]]);
    z = Activate(z, layer.activation, spec_.leaky_slope);
    h = layer.residual ? ConcatCols({z, h}) : z;
  }
  return AddRow(MatMul(h, params[weight_slots_.back()]),
                params[bias_slots_.back()]);
}

Var GumbelSoftmax(const Var& logits, double tau, Rng& rng) {
  DPSYNTH_CHECK(tau > 0.0);
  Matrix noise(logits->rows(), logits->cols());
  for (Eigen::Index r = 0; r < noise.rows(); ++r) {
    for (Eigen::Index c = 0; c < noise.cols(); ++c) {
      // UniformDouble is in [0, 1); 1 - u keeps the log argument positive.
      const double u = 1.0 - UniformDouble(rng);
      noise(r, c) = -std::log(-std::log(u) + 1e-300);
    }
  }
  return Softmax(
      Scale(Add(logits, Constant(std::move(noise), logits->batched())),
            1.0 / tau));
}

Var ApplyHeads(const Var& raw, const std::vector<HeadSpec>& heads, double tau,
               Rng* rng) {
  std::vector<Var> parts;
  parts.reserve(heads.size());
  for (const HeadSpec& head : heads) {
    const Var slice = SliceCols(raw, head.start, head.width);
    if (head.kind == HeadSpec::Kind::kSoftmaxBlock) {
      parts.push_back(rng != nullptr ? GumbelSoftmax(slice, tau, *rng)
                                     : Softmax(slice));
    } else {
      parts.push_back(Scale(AddScalar(Tanh(slice), 1.0), 0.5));
    }
  }
  return ConcatCols(parts);
}

}  // namespace dpsynth::nn
