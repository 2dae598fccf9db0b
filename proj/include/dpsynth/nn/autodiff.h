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

#ifndef DPSYNTH_NN_AUTODIFF_H_
#define DPSYNTH_NN_AUTODIFF_H_

#include <memory>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace dpsynth::nn {

using Matrix = Eigen::MatrixXd;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Reverse-mode automatic differentiation over dense matrices.
//
// Every value is a node in a computation graph (the tape). A node is
// *batched* when its rows index samples and row i depends only on sample i;
// parameters and anything derived from parameters alone are *shared*.
// Keeping that distinction explicit lets PerSampleGradients attribute
// parameter gradients to individual samples in one backward pass, including
// through gradients that were themselves built by Grad (double backprop).
//
// Nodes also carry a provenance bit: anything computed from a value marked
// `private_data` is itself private. Training loops use it to assert which
// updates can see real records.

enum class Op {
  kLeaf,
  kMatMul,
  kTranspose,
  kAddRow,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kLeakyRelu,
  kTanh,
  kExp,
  kLog,
  kSquare,
  kSqrt,
  kReciprocal,
  kRowSum,
  kBroadcastCols,
  kSumRows,
  kBroadcastRows,
  kSum,
  kBroadcastScalar,
  kSliceCols,
  kPadCols,
  kConcatCols,
  kSoftmax,
  kLogSoftmax,
};

const char* OpName(Op op);

class Node;
using Var = std::shared_ptr<Node>;

class Node : public std::enable_shared_from_this<Node> {
 public:
  const Matrix& value() const { return value_; }
  int rows() const { return static_cast<int>(value_.rows()); }
  int cols() const { return static_cast<int>(value_.cols()); }
  Op op() const { return op_; }
  bool batched() const { return batched_; }
  bool requires_grad() const { return requires_grad_; }
  bool private_data() const { return private_data_; }
  int param_slot() const { return param_slot_; }
  const std::vector<Var>& inputs() const { return inputs_; }

  // Vector-Jacobian product with respect to input `i`, numerically.
  Matrix Vjp(const Matrix& upstream, int i) const;
  // The same product built from differentiable ops.
  Var VjpGraph(const Var& upstream, int i) const;
  // For a batched node with a shared input `i`: the per-sample contribution
  // to that input's gradient, one flattened (row-major) gradient per row.
  absl::StatusOr<RowMatrix> PerSampleVjp(const Matrix& upstream, int i) const;

 private:
  friend Var MakeNode(Op, Matrix, std::vector<Var>, bool, double, int, int);
  friend Var Input(Matrix, bool, bool);
  friend Var Constant(Matrix, bool);
  friend Var Parameter(Matrix, int);

  Node() = default;
  Var self() const { return std::const_pointer_cast<Node>(shared_from_this()); }

  Matrix value_;
  Op op_ = Op::kLeaf;
  std::vector<Var> inputs_;
  bool batched_ = false;
  bool requires_grad_ = false;
  bool private_data_ = false;
  int param_slot_ = -1;
  double alpha_ = 0.0;
  int arg0_ = 0;
  int arg1_ = 0;
};

// Leaves.
Var Input(Matrix value, bool private_data = false, bool requires_grad = false);
Var Constant(Matrix value, bool batched);
Var Parameter(Matrix value, int slot);

// Ops. Elementwise binary ops require equal shapes.
Var MatMul(const Var& a, const Var& b);
Var Transpose(const Var& a);
Var AddRow(const Var& a, const Var& row);  // adds a 1 x m row to every row
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double factor);
Var AddScalar(const Var& a, double value);
Var LeakyRelu(const Var& a, double negative_slope);
Var Relu(const Var& a);
Var Tanh(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);
Var Square(const Var& a);
Var Sqrt(const Var& a);
Var Reciprocal(const Var& a);
Var RowSum(const Var& a);                   // B x m -> B x 1
Var BroadcastCols(const Var& a, int cols);  // B x 1 -> B x cols
Var SumRows(const Var& a);                  // B x m -> 1 x m
Var BroadcastRows(const Var& a, int rows);  // 1 x m -> rows x m
Var Sum(const Var& a);                      // -> 1 x 1
Var BroadcastScalar(const Var& a, int rows, int cols);
Var SliceCols(const Var& a, int start, int width);
Var PadCols(const Var& a, int start, int total_cols);
Var ConcatCols(const std::vector<Var>& parts);
Var Softmax(const Var& a);     // row-wise
Var LogSoftmax(const Var& a);  // row-wise
Var Mean(const Var& a);

// Aggregated gradients of sum(seed .* output) with respect to `wrt`,
// returned as graph nodes so they can be differentiated again. Only paths
// leading to `wrt` are expanded. A missing path yields a zero constant.
std::vector<Var> Grad(const Var& output, const Var& seed,
                      const std::vector<Var>& wrt);

// Aggregated numeric gradient of sum(seed .* output) with respect to every
// Parameter leaf. Slot s is written row-major at `slot_offsets[s]` of a
// vector of length `total_size`; slots not reached stay zero.
Eigen::VectorXd ParameterGradient(const Var& output, const Matrix& seed,
                                  const std::vector<int>& slot_offsets,
                                  int total_size);

// Per-sample parameter gradients of a batched B x 1 loss column. Row i of
// the result is d loss_i / d params (flattened like ParameterGradient).
absl::StatusOr<RowMatrix> PerSampleGradients(
    const Var& losses, const std::vector<int>& slot_offsets, int total_size);

// True if any node reachable from `output` carries private data.
bool DependsOnPrivateData(const Var& output);

}  // namespace dpsynth::nn

#endif  // DPSYNTH_NN_AUTODIFF_H_
