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

#ifndef DPSYNTH_NN_NETWORK_H_
#define DPSYNTH_NN_NETWORK_H_

#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/base/random.h"
#include "dpsynth/nn/autodiff.h"
#include "json.hpp"

namespace dpsynth::nn {

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int size() const { return rows * cols; }

  bool operator==(const TensorSpec&) const = default;
};

// Describes how named weight tensors are packed into one flat vector.
class ParamLayout {
 public:
  // Appends a rows x cols tensor and returns its slot.
  int Add(std::string name, int rows, int cols);

  const std::vector<TensorSpec>& tensors() const { return tensors_; }
  const TensorSpec& tensor(int slot) const { return tensors_[slot]; }
  int size() const { return size_; }
  std::vector<int> Offsets() const;

  bool operator==(const ParamLayout&) const = default;

 private:
  std::vector<TensorSpec> tensors_;
  int size_ = 0;
};

// Flat parameters plus their layout. Tensors are stored row-major.
struct ParamVector {
  ParamLayout layout;
  Eigen::VectorXd values;

  bool AllFinite() const { return values.allFinite(); }
  Matrix Tensor(int slot) const;
};

nlohmann::json ParamVectorToJson(const ParamVector& params);
absl::StatusOr<ParamVector> ParamVectorFromJson(const nlohmann::json& json);

// Parameter leaves for one forward pass. Frozen bindings expose the values
// as constants, so gradients flow through them but never into them.
class BoundParams {
 public:
  explicit BoundParams(const ParamVector& params, bool trainable = true);
  const Var& operator[](int slot) const { return leaves_[slot]; }
  const ParamLayout& layout() const { return *layout_; }

  // Per-sample and aggregated gradients against these leaves.
  absl::StatusOr<RowMatrix> PerSampleGradients(const Var& losses) const;
  Eigen::VectorXd Gradient(const Var& scalar_loss) const;

 private:
  const ParamLayout* layout_;
  std::vector<int> offsets_;
  std::vector<Var> leaves_;
};

enum class Activation { kIdentity, kRelu, kLeakyRelu, kTanh };

struct LayerSpec {
  int width = 0;
  Activation activation = Activation::kRelu;
  // Residual layers output concat(act(fc(x)), x), widening by `width`.
  bool residual = false;
};

struct NetSpec {
  int input_dim = 0;
  std::vector<LayerSpec> hidden;
  int output_dim = 0;
  double leaky_slope = 0.2;

  absl::Status Validate() const;
};

// Fully connected network over a shared ParamLayout.
class Mlp {
 public:
  Mlp() = default;
  // Registers weight (in x out) and bias (1 x out) tensors under `prefix`.
  Mlp(NetSpec spec, const std::string& prefix, ParamLayout& layout);

  const NetSpec& spec() const { return spec_; }

  // Glorot-uniform weights, zero biases.
  void Initialize(Eigen::VectorXd& values, const ParamLayout& layout,
                  Rng& rng) const;

  absl::StatusOr<Var> Forward(const BoundParams& params,
                              const Var& input) const;

 private:
  NetSpec spec_;
  std::vector<int> weight_slots_;
  std::vector<int> bias_slots_;
};

// Output head over a column range of raw network output.
struct HeadSpec {
  enum class Kind { kSoftmaxBlock, kUnitScalar };
  Kind kind = Kind::kSoftmaxBlock;
  int start = 0;
  int width = 1;
};

// Softmax blocks become gumbel-softmax samples at temperature `tau` (plain
// softmax when `rng` is null); unit scalars become (tanh(x) + 1) / 2.
Var ApplyHeads(const Var& raw, const std::vector<HeadSpec>& heads, double tau,
               Rng* rng);

// softmax((logits + g) / tau) with g ~ Gumbel(0, 1) drawn per cell.
Var GumbelSoftmax(const Var& logits, double tau, Rng& rng);

}  // namespace dpsynth::nn

#endif  // DPSYNTH_NN_NETWORK_H_
