// Copyright 2026 The Anonybench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anonybench/tape.h"

#include <optional>
#include <stdexcept>
#include <utility>

namespace anonybench {

std::string_view OpName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kConstant: return "constant";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kAddScalar: return "add_scalar";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kAddBias: return "add_bias";
    case OpKind::kConv2d: return "conv2d";
    case OpKind::kMeanPool2: return "mean_pool2";
    case OpKind::kUpsample2: return "upsample2";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kAbs: return "abs";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kSquare: return "square";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kMaxScalar: return "max_scalar";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kSumAxis: return "sum_axis";
    case OpKind::kMeanAxis: return "mean_axis";
    case OpKind::kConcat: return "concat";
    case OpKind::kReshape: return "reshape";
    case OpKind::kL2Normalize: return "l2_normalize";
    case OpKind::kLogSoftmax: return "log_softmax";
  }
  return "unknown";
}

const Array& Tensor::value() const {
  if (!tape_) throw std::logic_error("tensor: empty handle");
  return tape_->value(id_);
}

const Array& Tensor::grad() const {
  if (!tape_) throw std::logic_error("tensor: empty handle");
  return tape_->grad(id_);
}

bool Tensor::requires_grad() const {
  return tape_ != nullptr && tape_->requires_grad(id_);
}

Tensor Tape::Leaf(Array value) {
  nodes_.push_back(Node{OpKind::kLeaf, {}, std::move(value), Array(), true, {}});
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor Tape::Constant(Array value) {
  nodes_.push_back(
      Node{OpKind::kConstant, {}, std::move(value), Array(), false, {}});
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor Tape::Record(OpKind kind, std::vector<int> inputs, Array value,
                    AdjointFn adjoint) {
  bool requires_grad = false;
  for (int id : inputs) {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) {
      throw std::logic_error(std::string(OpName(kind)) +
                             ": input is not on this tape");
    }
    requires_grad = requires_grad || nodes_[id].requires_grad;
  }
  // Adjoint rules of constant subgraphs are never needed.
  if (!requires_grad) adjoint = nullptr;
  nodes_.push_back(Node{kind, std::move(inputs), std::move(value), Array(),
                        requires_grad, std::move(adjoint)});
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

const Array& Tape::grad(int id) const {
  const Node& node = nodes_.at(id);
  if (node.grad.size() != node.value.size()) {
    node.grad = Array(node.value.shape(), 0.0);
  }
  return node.grad;
}

void Tape::CheckOwned(const Tensor& t) const {
  if (t.tape() != this) throw std::logic_error("tensor belongs to another tape");
}

void Tape::Backward(const Tensor& loss) {
  CheckOwned(loss);
  const Node& root = nodes_[loss.id()];
  if (root.value.size() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " +
                     ShapeToString(root.value.shape()));
  }
  if (!root.requires_grad) return;

  // Fresh adjoints for this pass; stored gradients are only touched at the
  // end so repeated passes accumulate exactly.
  std::vector<std::optional<Array>> adj(static_cast<size_t>(loss.id()) + 1);
  adj[loss.id()] = Array(root.value.shape(), 1.0);

  std::vector<const Array*> in_values;
  std::vector<Array*> in_grads;
  for (int id = loss.id(); id >= 0; --id) {
    if (!adj[id]) continue;
    const Node& node = nodes_[id];
    if (!node.adjoint) continue;
    in_values.clear();
    in_grads.clear();
    for (int in : node.inputs) {
      in_values.push_back(&nodes_[in].value);
      if (nodes_[in].requires_grad) {
        if (!adj[in]) adj[in] = Array(nodes_[in].value.shape(), 0.0);
        in_grads.push_back(&*adj[in]);
      } else {
        in_grads.push_back(nullptr);
      }
    }
    node.adjoint(AdjointArgs{node.value, *adj[id], in_values, in_grads});
  }

  for (int id = 0; id <= loss.id(); ++id) {
    if (!adj[id]) continue;
    const Node& node = nodes_[id];
    if (node.grad.size() != node.value.size()) {
      node.grad = std::move(*adj[id]);
    } else {
      node.grad.AddInPlace(*adj[id]);
    }
  }
}

void Tape::ZeroGrad() {
  for (Node& node : nodes_) node.grad = Array();
}

bool Tape::DependsOn(const Tensor& from, const Tensor& to) const {
  CheckOwned(from);
  CheckOwned(to);
  if (to.id() > from.id()) return false;
  std::vector<char> seen(static_cast<size_t>(from.id()) + 1, 0);
  std::vector<int> stack{from.id()};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id == to.id()) return true;
    if (seen[id]) continue;
    seen[id] = 1;
    for (int in : nodes_[id].inputs) {
      if (in >= to.id() && !seen[in]) stack.push_back(in);
    }
  }
  return false;
}

}  // namespace anonybench
