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

#ifndef ANONYBENCH_TAPE_H_
#define ANONYBENCH_TAPE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "anonybench/array.h"

namespace anonybench {

enum class OpKind : uint8_t {
  kLeaf,
  kConstant,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kMatMul,
  kTranspose,
  kAddBias,
  kConv2d,
  kMeanPool2,
  kUpsample2,
  kRelu,
  kSigmoid,
  kExp,
  kLog,
  kAbs,
  kSoftplus,
  kSquare,
  kSqrt,
  kMaxScalar,
  kSum,
  kMean,
  kSumAxis,
  kMeanAxis,
  kConcat,
  kReshape,
  kL2Normalize,
  kLogSoftmax,
};

std::string_view OpName(OpKind kind);

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid as long as the
// owning tape is alive and has not been cleared.
class Tensor {
 public:
  Tensor() = default;

  const Array& value() const;
  const Shape& shape() const { return value().shape(); }
  double item() const { return value().item(); }
  // Accumulated gradient; an all-zero array until a backward pass reaches
  // this node.
  const Array& grad() const;
  bool requires_grad() const;

  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Tensor(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Arguments handed to an adjoint rule. `in_grad[i]` is null when input i
// does not require a gradient.
struct AdjointArgs {
  const Array& out;
  const Array& out_grad;
  std::span<const Array* const> in;
  std::span<Array* const> in_grad;
};

using AdjointFn = std::function<void(const AdjointArgs&)>;

// Linear record of a forward computation. Nodes are appended in execution
// order, so every input id is smaller than its consumer's id.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor Leaf(Array value);
  Tensor Constant(Array value);
  Tensor Record(OpKind kind, std::vector<int> inputs, Array value,
                AdjointFn adjoint);

  // Propagates d(loss)/d(node) to every node that requires a gradient and
  // adds the result to that node's stored gradient. Calling it twice without
  // ZeroGrad accumulates.
  void Backward(const Tensor& loss);
  void ZeroGrad();

  // True when `to` is reachable from `from` along recorded input edges,
  // i.e. `from` was computed (directly or not) from `to`.
  bool DependsOn(const Tensor& from, const Tensor& to) const;

  size_t size() const { return nodes_.size(); }
  OpKind kind(int id) const { return nodes_.at(id).kind; }
  const std::vector<int>& inputs(int id) const { return nodes_.at(id).inputs; }
  const Array& value(int id) const { return nodes_.at(id).value; }
  const Array& grad(int id) const;
  bool requires_grad(int id) const { return nodes_.at(id).requires_grad; }

 private:
  struct Node {
    OpKind kind;
    std::vector<int> inputs;
    Array value;
    mutable Array grad;
    bool requires_grad = false;
    AdjointFn adjoint;
  };

  void CheckOwned(const Tensor& t) const;

  std::vector<Node> nodes_;
};

}  // namespace anonybench

#endif  // ANONYBENCH_TAPE_H_
