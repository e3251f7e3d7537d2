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

// Differentiable primitives. Each function records one node on the tape
// that owns its inputs. Broadcasting is limited to scalar operands and the
// explicit AddBias; every other binary op requires identical shapes.
//
// Subgradient conventions: relu, abs and max-with-scalar have adjoint 0 at
// the kink; sqrt has adjoint 0 at exactly 0.

#ifndef ANONYBENCH_OPS_H_
#define ANONYBENCH_OPS_H_

#include <span>

#include "anonybench/tape.h"

namespace anonybench {

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
Tensor AddScalar(const Tensor& a, double s);

// [m, k] x [k, n] -> [m, n].
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);
// x[..., n] + b[n].
Tensor AddBias(const Tensor& x, const Tensor& b);

// x [N, C, H, W], weight [O, C, k, k] with odd k, bias [O]. Stride 1, zero
// padding k/2, so the output is [N, O, H, W].
Tensor Conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias);
// 2x2 mean pool with stride 2 over the last two axes (both even).
Tensor MeanPool2(const Tensor& x);
// Nearest-neighbour x2 upsampling over the last two axes.
Tensor Upsample2(const Tensor& x);

Tensor Relu(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Exp(const Tensor& x);
// Rejects non-positive entries.
Tensor Log(const Tensor& x);
Tensor Abs(const Tensor& x);
// log(1 + exp(x)), evaluated without overflow.
Tensor Softplus(const Tensor& x);
Tensor Square(const Tensor& x);
// Rejects negative entries.
Tensor Sqrt(const Tensor& x);
// max(x, c) elementwise.
Tensor MaxScalar(const Tensor& x, double c);
// min(x, c) = -max(-x, -c); same kink convention.
Tensor MinScalar(const Tensor& x, double c);

Tensor Sum(const Tensor& x);
Tensor Mean(const Tensor& x);
// Reduce one axis away.
Tensor SumAxis(const Tensor& x, int axis);
Tensor MeanAxis(const Tensor& x, int axis);

Tensor Concat(std::span<const Tensor> parts, int axis);
Tensor Reshape(const Tensor& x, Shape shape);

// Row-wise x / ||x|| over the last axis. Rejects zero rows.
Tensor L2Normalize(const Tensor& x);
// Row-wise log-softmax over the last axis.
Tensor LogSoftmax(const Tensor& x);

}  // namespace anonybench

#endif  // ANONYBENCH_OPS_H_
