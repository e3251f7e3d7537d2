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


// Gradient-check cases, one per autodiff primitive.

#ifndef ANONYBENCH_TESTS_PRIMITIVE_CASES_H_
#define ANONYBENCH_TESTS_PRIMITIVE_CASES_H_

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "anonybench/ops.h"
#include "anonybench/tape.h"
#include "test_util.h"

namespace anonybench::testing {

struct GradCase {
  std::string name;
  std::vector<Shape> shapes;
  double lo, hi;
  std::function<Tensor(Tape&, std::span<const Tensor>)> f;
};

inline void PrintTo(const GradCase& c, std::ostream* os) { *os << c.name; }

// Contracts an output with fixed random weights so every output coordinate
// contributes to the checked scalar.
inline Tensor Contract(Tape& tape, const Tensor& y) {
  Rng rng(99);
  return Sum(Mul(y, tape.Constant(RandomArray(y.shape(), rng))));
}

inline std::vector<GradCase> PrimitiveCases() {
  using T = std::span<const Tensor>;
  auto unary = [](std::string name, double lo, double hi,
                  Tensor (*op)(const Tensor&)) {
    return GradCase{name, {{3, 4}}, lo, hi, [op](Tape& t, T x) {
                      return Contract(t, op(x[0]));
                    }};
  };
  return {
      {"add", {{2, 3}, {2, 3}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Add(x[0], x[1])); }},
      {"sub", {{2, 3}, {2, 3}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Sub(x[0], x[1])); }},
      {"mul", {{2, 3}, {2, 3}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Mul(x[0], x[1])); }},
      {"scale", {{5}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Scale(x[0], -2.5)); }},
      {"add_scalar", {{5}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, AddScalar(x[0], 0.7)); }},
      {"matmul", {{3, 4}, {4, 2}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, MatMul(x[0], x[1])); }},
      {"transpose", {{3, 4}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Transpose(x[0])); }},
      {"add_bias", {{3, 4}, {4}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, AddBias(x[0], x[1])); }},
      {"conv2d", {{2, 2, 4, 4}, {3, 2, 3, 3}, {3}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Conv2d(x[0], x[1], x[2])); }},
      {"mean_pool2", {{2, 3, 4, 4}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, MeanPool2(x[0])); }},
      {"upsample2", {{2, 3, 2, 2}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Upsample2(x[0])); }},
      // Kinks at zero are avoided by sampling away from them.
      unary("relu", 0.1, 1.0, Relu),
      unary("sigmoid", -3, 3, Sigmoid),
      unary("exp", -2, 2, Exp),
      unary("log", 0.2, 3, Log),
      unary("abs", 0.1, 1.0, Abs),
      unary("softplus", -3, 3, Softplus),
      unary("square", -2, 2, Square),
      unary("sqrt", 0.2, 3, Sqrt),
      {"max_scalar", {{6}}, 0.3, 1,
       [](Tape& t, T x) { return Contract(t, MaxScalar(x[0], 0.1)); }},
      {"min_scalar", {{6}}, 0.3, 1,
       [](Tape& t, T x) { return Contract(t, MinScalar(x[0], 2.0)); }},
      {"sum", {{3, 4}}, -1, 1, [](Tape&, T x) { return Sum(x[0]); }},
      {"mean", {{3, 4}}, -1, 1, [](Tape&, T x) { return Mean(x[0]); }},
      {"sum_axis", {{3, 4, 2}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, SumAxis(x[0], 1)); }},
      {"mean_axis", {{3, 4, 2}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, MeanAxis(x[0], 0)); }},
      {"concat", {{2, 3}, {2, 2}}, -1, 1,
       [](Tape& t, T x) {
         const Tensor parts[] = {x[0], x[1]};
         return Contract(t, Concat(parts, 1));
       }},
      {"reshape", {{2, 6}}, -1, 1,
       [](Tape& t, T x) { return Contract(t, Reshape(x[0], {3, 4})); }},
      {"l2_normalize", {{3, 4}}, 0.1, 1,
       [](Tape& t, T x) { return Contract(t, L2Normalize(x[0])); }},
      {"log_softmax", {{3, 4}}, -2, 2,
       [](Tape& t, T x) { return Contract(t, LogSoftmax(x[0])); }},
  };
}

}  // namespace anonybench::testing

#endif  // ANONYBENCH_TESTS_PRIMITIVE_CASES_H_
