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

#include <algorithm>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "absl/strings/str_format.h"
#include "dpsynth/base/check.h"

namespace dpsynth::nn {

const char* OpName(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatMul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kAddRow: return "add_row";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kTanh: return "tanh";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kSquare: return "square";
    case Op::kSqrt: return "sqrt";
    case Op::kReciprocal: return "reciprocal";
    case Op::kRowSum: return "row_sum";
    case Op::kBroadcastCols: return "broadcast_cols";
    case Op::kSumRows: return "sum_rows";
    case Op::kBroadcastRows: return "broadcast_rows";
    case Op::kSum: return "sum";
    case Op::kBroadcastScalar: return "broadcast_scalar";
    case Op::kSliceCols: return "slice_cols";
    case Op::kPadCols: return "pad_cols";
    case Op::kConcatCols: return "concat_cols";
    case Op::kSoftmax: return "softmax";
    case Op::kLogSoftmax: return "log_softmax";
  }
  return "unknown";
}

Var MakeNode(Op op, Matrix value, std::vector<Var> inputs, bool batched,
             double alpha, int arg0, int arg1) {
  Var node(new Node());
  node->op_ = op;
  node->value_ = std::move(value);
  node->batched_ = batched;
  node->alpha_ = alpha;
  node->arg0_ = arg0;
  node->arg1_ = arg1;
  for (const Var& input : inputs) {
    node->requires_grad_ = node->requires_grad_ || input->requires_grad();
    node->private_data_ = node->private_data_ || input->private_data();
  }
  node->inputs_ = std::move(inputs);
  return node;
}

namespace {

Var Unary(Op op, Matrix value, const Var& a, double alpha = 0.0, int arg0 = 0,
          int arg1 = 0) {
  return MakeNode(op, std::move(value), {a}, a->batched(), alpha, arg0, arg1);
}

void CheckSameShape(const Var& a, const Var& b) {
  DPSYNTH_CHECK(a->rows() == b->rows() && a->cols() == b->cols());
}

Matrix RowSoftmax(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double peak = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - peak).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Matrix RowLogSoftmax(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double peak = x.row(r).maxCoeff();
    const double log_norm =
        peak + std::log((x.row(r).array() - peak).exp().sum());
    out.row(r) = x.row(r).array() - log_norm;
  }
  return out;
}

Matrix LeakyMask(const Matrix& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

// Post-order over the nodes reachable from `root` through inputs that
// require gradients (the root is always included).
std::vector<Node*> TopologicalOrder(const Var& root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs().size()) {
      Node* input = node->inputs()[next++].get();
      if (input->requires_grad() && visited.insert(input).second) {
        stack.emplace_back(input, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

void Accumulate(std::unordered_map<Node*, Matrix>& grads, Node* node,
                Matrix value) {
  auto it = grads.find(node);
  if (it == grads.end()) {
    grads.emplace(node, std::move(value));
  } else {
    it->second += value;
  }
}

void FlattenInto(const Matrix& m, double* out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[r * m.cols() + c] = m(r, c);
    }
  }
}

}  // namespace

Var Input(Matrix value, bool private_data, bool requires_grad) {
  Var node(new Node());
  node->value_ = std::move(value);
  node->batched_ = true;
  node->private_data_ = private_data;
  node->requires_grad_ = requires_grad;
  return node;
}

Var Constant(Matrix value, bool batched) {
  Var node(new Node());
  node->value_ = std::move(value);
  node->batched_ = batched;
  return node;
}

Var Parameter(Matrix value, int slot) {
  DPSYNTH_CHECK(slot >= 0);
  Var node(new Node());
  node->value_ = std::move(value);
  node->requires_grad_ = true;
  node->param_slot_ = slot;
  return node;
}

Var MatMul(const Var& a, const Var& b) {
  DPSYNTH_CHECK(a->cols() == b->rows());
  return MakeNode(Op::kMatMul, a->value() * b->value(), {a, b},
                  a->batched() && !b->batched(), 0, 0, 0);
}

Var Transpose(const Var& a) {
  return MakeNode(Op::kTranspose, a->value().transpose(), {a}, false, 0, 0, 0);
}

Var AddRow(const Var& a, const Var& row) {
  DPSYNTH_CHECK(row->rows() == 1 && row->cols() == a->cols());
  Matrix value = a->value();
  value.rowwise() += row->value().row(0);
  return MakeNode(Op::kAddRow, std::move(value), {a, row}, a->batched(), 0, 0,
                  0);
}

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b);
  return MakeNode(Op::kAdd, a->value() + b->value(), {a, b},
                  a->batched() || b->batched(), 0, 0, 0);
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b);
  return MakeNode(Op::kSub, a->value() - b->value(), {a, b},
                  a->batched() || b->batched(), 0, 0, 0);
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b);
  return MakeNode(Op::kMul, a->value().cwiseProduct(b->value()), {a, b},
                  a->batched() || b->batched(), 0, 0, 0);
}

Var Scale(const Var& a, double factor) {
  return Unary(Op::kScale, a->value() * factor, a, factor);
}

Var AddScalar(const Var& a, double value) {
  return Unary(Op::kAddScalar, (a->value().array() + value).matrix(), a,
               value);
}

Var LeakyRelu(const Var& a, double negative_slope) {
  return Unary(Op::kLeakyRelu,
               a->value().cwiseProduct(LeakyMask(a->value(), negative_slope)),
               a, negative_slope);
}

Var Relu(const Var& a) { return LeakyRelu(a, 0.0); }

Var Tanh(const Var& a) {
  return Unary(Op::kTanh, a->value().array().tanh().matrix(), a);
}

Var Exp(const Var& a) {
  return Unary(Op::kExp, a->value().array().exp().matrix(), a);
}

Var Log(const Var& a) {
  return Unary(Op::kLog, a->value().array().log().matrix(), a);
}

Var Square(const Var& a) {
  return Unary(Op::kSquare, a->value().array().square().matrix(), a);
}

Var Sqrt(const Var& a) {
  return Unary(Op::kSqrt, a->value().array().sqrt().matrix(), a);
}

Var Reciprocal(const Var& a) {
  return Unary(Op::kReciprocal, a->value().array().inverse().matrix(), a);
}

Var RowSum(const Var& a) {
  return Unary(Op::kRowSum, a->value().rowwise().sum(), a);
}

Var BroadcastCols(const Var& a, int cols) {
  DPSYNTH_CHECK(a->cols() == 1);
  return Unary(Op::kBroadcastCols, a->value().replicate(1, cols), a, 0, cols);
}

Var SumRows(const Var& a) {
  return MakeNode(Op::kSumRows, a->value().colwise().sum(), {a}, false, 0, 0,
                  0);
}

Var BroadcastRows(const Var& a, int rows) {
  DPSYNTH_CHECK(a->rows() == 1);
  return MakeNode(Op::kBroadcastRows, a->value().replicate(rows, 1), {a}, true,
                  0, rows, 0);
}

Var Sum(const Var& a) {
  return MakeNode(Op::kSum, Matrix::Constant(1, 1, a->value().sum()), {a},
                  false, 0, 0, 0);
}

Var BroadcastScalar(const Var& a, int rows, int cols) {
  DPSYNTH_CHECK(a->rows() == 1 && a->cols() == 1);
  return MakeNode(Op::kBroadcastScalar,
                  Matrix::Constant(rows, cols, a->value()(0, 0)), {a}, true, 0,
                  rows, cols);
}

Var SliceCols(const Var& a, int start, int width) {
  DPSYNTH_CHECK(start >= 0 && width >= 0 && start + width <= a->cols());
  return Unary(Op::kSliceCols, a->value().middleCols(start, width), a, 0,
               start, width);
}

Var PadCols(const Var& a, int start, int total_cols) {
  DPSYNTH_CHECK(start >= 0 && start + a->cols() <= total_cols);
  Matrix value = Matrix::Zero(a->rows(), total_cols);
  value.middleCols(start, a->cols()) = a->value();
  return Unary(Op::kPadCols, std::move(value), a, 0, start, total_cols);
}

Var ConcatCols(const std::vector<Var>& parts) {
  DPSYNTH_CHECK(!parts.empty());
  const int rows = parts[0]->rows();
  int cols = 0;
  bool batched = true;
  for (const Var& part : parts) {
    DPSYNTH_CHECK(part->rows() == rows);
    cols += part->cols();
    batched = batched && part->batched();
  }
  Matrix value(rows, cols);
  int offset = 0;
  for (const Var& part : parts) {
    value.middleCols(offset, part->cols()) = part->value();
    offset += part->cols();
  }
  return MakeNode(Op::kConcatCols, std::move(value), parts, batched, 0, 0, 0);
}

Var Softmax(const Var& a) { return Unary(Op::kSoftmax, RowSoftmax(a->value()), a); }

Var LogSoftmax(const Var& a) {
  return Unary(Op::kLogSoftmax, RowLogSoftmax(a->value()), a);
}

Var Mean(const Var& a) {
  return Scale(Sum(a), 1.0 / static_cast<double>(a->value().size()));
}

Matrix Node::Vjp(const Matrix& g, int i) const {
  const Matrix& x = inputs_.empty() ? value_ : inputs_[0]->value();
  switch (op_) {
    case Op::kLeaf:
      break;
    case Op::kMatMul:
      return i == 0 ? Matrix(g * inputs_[1]->value().transpose())
                    : Matrix(inputs_[0]->value().transpose() * g);
    case Op::kTranspose:
      return g.transpose();
    case Op::kAddRow:
      return i == 0 ? g : Matrix(g.colwise().sum());
    case Op::kAdd:
      return g;
    case Op::kSub:
      return i == 0 ? g : Matrix(-g);
    case Op::kMul:
      return g.cwiseProduct(inputs_[1 - i]->value());
    case Op::kScale:
      return g * alpha_;
    case Op::kAddScalar:
      return g;
    case Op::kLeakyRelu:
      return g.cwiseProduct(LeakyMask(x, alpha_));
    case Op::kTanh:
      return g.array() * (1.0 - value_.array().square());
    case Op::kExp:
      return g.cwiseProduct(value_);
    case Op::kLog:
      return g.cwiseQuotient(x);
    case Op::kSquare:
      return 2.0 * g.cwiseProduct(x);
    case Op::kSqrt:
      return 0.5 * g.cwiseQuotient(value_);
    case Op::kReciprocal:
      return -g.cwiseProduct(value_.cwiseAbs2());
    case Op::kRowSum:
      return g.replicate(1, x.cols());
    case Op::kBroadcastCols:
      return g.rowwise().sum();
    case Op::kSumRows:
      return g.replicate(x.rows(), 1);
    case Op::kBroadcastRows:
      return g.colwise().sum();
    case Op::kSum:
      return Matrix::Constant(x.rows(), x.cols(), g(0, 0));
    case Op::kBroadcastScalar:
      return Matrix::Constant(1, 1, g.sum());
    case Op::kSliceCols: {
      Matrix out = Matrix::Zero(x.rows(), x.cols());
      out.middleCols(arg0_, arg1_) = g;
      return out;
    }
    case Op::kPadCols:
      return g.middleCols(arg0_, x.cols());
    case Op::kConcatCols: {
      int offset = 0;
      for (int k = 0; k < i; ++k) offset += inputs_[k]->cols();
      return g.middleCols(offset, inputs_[i]->cols());
    }
    case Op::kSoftmax: {
      const Matrix dot = g.cwiseProduct(value_).rowwise().sum();
      return value_.cwiseProduct(g - dot.replicate(1, g.cols()));
    }
    case Op::kLogSoftmax: {
      const Matrix total = g.rowwise().sum();
      return g - value_.array().exp().matrix().cwiseProduct(
                     total.replicate(1, g.cols()));
    }
  }
  DPSYNTH_CHECK(false);
  return Matrix();
}

Var Node::VjpGraph(const Var& g, int i) const {
  switch (op_) {
    case Op::kLeaf:
      break;
    case Op::kMatMul:
      return i == 0 ? MatMul(g, Transpose(inputs_[1]))
                    : MatMul(Transpose(inputs_[0]), g);
    case Op::kTranspose:
      return Transpose(g);
    case Op::kAddRow:
      return i == 0 ? g : SumRows(g);
    case Op::kAdd:
      return g;
    case Op::kSub:
      return i == 0 ? g : Scale(g, -1.0);
    case Op::kMul:
      return Mul(g, inputs_[1 - i]);
    case Op::kScale:
      return Scale(g, alpha_);
    case Op::kAddScalar:
      return g;
    case Op::kLeakyRelu:
      // The mask is piecewise constant, so it enters as a constant.
      return Mul(g, Constant(LeakyMask(inputs_[0]->value(), alpha_),
                             inputs_[0]->batched()));
    case Op::kTanh:
      return Mul(g, AddScalar(Scale(Square(self()), -1.0), 1.0));
    case Op::kExp:
      return Mul(g, self());
    case Op::kLog:
      return Mul(g, Reciprocal(inputs_[0]));
    case Op::kSquare:
      return Mul(g, Scale(inputs_[0], 2.0));
    case Op::kSqrt:
      return Mul(g, Scale(Reciprocal(self()), 0.5));
    case Op::kReciprocal:
      return Mul(g, Scale(Square(self()), -1.0));
    case Op::kRowSum:
      return BroadcastCols(g, inputs_[0]->cols());
    case Op::kBroadcastCols:
      return RowSum(g);
    case Op::kSumRows:
      return BroadcastRows(g, inputs_[0]->rows());
    case Op::kBroadcastRows:
      return SumRows(g);
    case Op::kSum:
      return BroadcastScalar(g, inputs_[0]->rows(), inputs_[0]->cols());
    case Op::kBroadcastScalar:
      return Sum(g);
    case Op::kSliceCols:
      return PadCols(g, arg0_, inputs_[0]->cols());
    case Op::kPadCols:
      return SliceCols(g, arg0_, inputs_[0]->cols());
    case Op::kConcatCols: {
      int offset = 0;
      for (int k = 0; k < i; ++k) offset += inputs_[k]->cols();
      return SliceCols(g, offset, inputs_[i]->cols());
    }
    case Op::kSoftmax: {
      const Var dot = RowSum(Mul(g, self()));
      return Mul(self(), Sub(g, BroadcastCols(dot, cols())));
    }
    case Op::kLogSoftmax:
      return Sub(g, Mul(Exp(self()), BroadcastCols(RowSum(g), cols())));
  }
  DPSYNTH_CHECK(false);
  return nullptr;
}

absl::StatusOr<RowMatrix> Node::PerSampleVjp(const Matrix& g, int i) const {
  const Eigen::Index batch = g.rows();
  if (op_ == Op::kMatMul && i == 1 && inputs_[0]->batched()) {
    const Matrix& a = inputs_[0]->value();
    const Eigen::Index n = a.cols();
    const Eigen::Index m = g.cols();
    RowMatrix out(batch, n * m);
    for (Eigen::Index s = 0; s < batch; ++s) {
      Eigen::Map<RowMatrix> block(out.row(s).data(), n, m);
      block.noalias() = a.row(s).transpose() * g.row(s);
    }
    return out;
  }
  if (op_ == Op::kAddRow && i == 1) return RowMatrix(g);
  return absl::FailedPreconditionError(absl::StrFormat(
      "per-sample gradient cannot pass through '%s' into a shared operand",
      OpName(op_)));
}

std::vector<Var> Grad(const Var& output, const Var& seed,
                      const std::vector<Var>& wrt) {
  DPSYNTH_CHECK(seed->rows() == output->rows() &&
                seed->cols() == output->cols());
  const std::vector<Node*> order = TopologicalOrder(output);

  // Restrict propagation to nodes from which some `wrt` is reachable.
  std::unordered_set<Node*> targets;
  for (const Var& w : wrt) targets.insert(w.get());
  std::unordered_set<Node*> leads;
  for (Node* node : order) {  // inputs precede consumers in post-order
    bool reaches = targets.count(node) > 0;
    for (const Var& input : node->inputs()) {
      reaches = reaches || leads.count(input.get()) > 0;
    }
    if (reaches) leads.insert(node);
  }

  std::unordered_map<Node*, Var> grads;
  grads[output.get()] = seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    auto found = grads.find(node);
    if (found == grads.end()) continue;
    const Var g = found->second;
    for (size_t k = 0; k < node->inputs().size(); ++k) {
      Node* input = node->inputs()[k].get();
      if (!input->requires_grad() || leads.count(input) == 0) continue;
      Var contribution = node->VjpGraph(g, static_cast<int>(k));
      auto existing = grads.find(input);
      if (existing == grads.end()) {
        grads.emplace(input, std::move(contribution));
      } else {
        existing->second = Add(existing->second, contribution);
      }
    }
  }

  std::vector<Var> out;
  out.reserve(wrt.size());
  for (const Var& w : wrt) {
    auto found = grads.find(w.get());
    out.push_back(found != grads.end()
                      ? found->second
                      : Constant(Matrix::Zero(w->rows(), w->cols()),
                                 w->batched()));
  }
  return out;
}

Eigen::VectorXd ParameterGradient(const Var& output, const Matrix& seed,
                                  const std::vector<int>& slot_offsets,
                                  int total_size) {
  DPSYNTH_CHECK(seed.rows() == output->rows() && seed.cols() == output->cols());
  Eigen::VectorXd result = Eigen::VectorXd::Zero(total_size);
  const std::vector<Node*> order = TopologicalOrder(output);
  std::unordered_map<Node*, Matrix> grads;
  grads.emplace(output.get(), seed);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    auto found = grads.find(node);
    if (found == grads.end()) continue;
    if (node->param_slot() >= 0) {
      const int slot = node->param_slot();
      DPSYNTH_CHECK(slot < static_cast<int>(slot_offsets.size()));
      Eigen::VectorXd flat(found->second.size());
      FlattenInto(found->second, flat.data());
      result.segment(slot_offsets[slot], flat.size()) += flat;
      continue;
    }
    for (size_t k = 0; k < node->inputs().size(); ++k) {
      Node* input = node->inputs()[k].get();
      if (!input->requires_grad()) continue;
      Accumulate(grads, input, node->Vjp(found->second, static_cast<int>(k)));
    }
    grads.erase(node);
  }
  return result;
}

absl::StatusOr<RowMatrix> PerSampleGradients(
    const Var& losses, const std::vector<int>& slot_offsets, int total_size) {
  if (!losses->batched() || losses->cols() != 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "per-sample losses must be a batched column, got %d x %d%s",
        losses->rows(), losses->cols(), losses->batched() ? "" : " (shared)"));
  }
  const Eigen::Index batch = losses->rows();
  RowMatrix result = RowMatrix::Zero(batch, total_size);
  const std::vector<Node*> order = TopologicalOrder(losses);

  // Batched nodes carry ordinary gradients (row s belongs to sample s);
  // shared nodes carry one flattened gradient per sample.
  std::unordered_map<Node*, Matrix> grads;
  std::unordered_map<Node*, RowMatrix> stacks;
  grads.emplace(losses.get(), Matrix::Ones(batch, 1));

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->batched()) {
      auto found = grads.find(node);
      if (found == grads.end()) continue;
      for (size_t k = 0; k < node->inputs().size(); ++k) {
        Node* input = node->inputs()[k].get();
        if (!input->requires_grad()) continue;
        if (input->batched()) {
          Accumulate(grads, input,
                     node->Vjp(found->second, static_cast<int>(k)));
          continue;
        }
        absl::StatusOr<RowMatrix> stack =
            node->PerSampleVjp(found->second, static_cast<int>(k));
        if (!stack.ok()) return stack.status();
        auto existing = stacks.find(input);
        if (existing == stacks.end()) {
          stacks.emplace(input, *std::move(stack));
        } else {
          existing->second += *stack;
        }
      }
      grads.erase(node);
      continue;
    }

    auto found = stacks.find(node);
    if (found == stacks.end()) continue;
    const RowMatrix& stack = found->second;
    if (node->param_slot() >= 0) {
      const int slot = node->param_slot();
      if (slot >= static_cast<int>(slot_offsets.size()) ||
          slot_offsets[slot] + stack.cols() > total_size) {
        return absl::InvalidArgumentError(
            absl::StrFormat("parameter slot %d outside the layout", slot));
      }
      result.middleCols(slot_offsets[slot], stack.cols()) += stack;
    } else if (node->op() == Op::kTranspose) {
      Node* input = node->inputs()[0].get();
      const int r = node->rows();
      const int c = node->cols();
      RowMatrix transposed(batch, stack.cols());
      for (Eigen::Index s = 0; s < batch; ++s) {
        Eigen::Map<const RowMatrix> from(stack.row(s).data(), r, c);
        Eigen::Map<RowMatrix> to(transposed.row(s).data(), c, r);
        to = from.transpose();
      }
      auto existing = stacks.find(input);
      if (existing == stacks.end()) {
        stacks.emplace(input, std::move(transposed));
      } else {
        existing->second += transposed;
      }
    } else {
      return absl::FailedPreconditionError(absl::StrFormat(
          "per-sample gradient cannot pass through shared '%s' node",
          OpName(node->op())));
    }
    stacks.erase(node);
  }
  return result;
}

bool DependsOnPrivateData(const Var& output) { return output->private_data(); }

}  // namespace dpsynth::nn
