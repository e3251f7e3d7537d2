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

#ifndef ANONYBENCH_GRADCHECK_H_
#define ANONYBENCH_GRADCHECK_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "anonybench/tape.h"

namespace anonybench {

// Builds a scalar on `tape` from leaves bound to the given inputs.
using ScalarFn = std::function<Tensor(Tape& tape, std::span<const Tensor>)>;

struct GradCheckReport {
  // max over coordinates of |analytic - central| / max(1, |analytic|).
  double max_rel_error = 0.0;
  size_t coordinates = 0;
  // "input:index" for every coordinate where a probe value was not finite.
  std::vector<std::string> non_finite;
};

// Compares the tape adjoint of `f` at `point` against central differences
// (f(x + h) - f(x - h)) / 2h, coordinate by coordinate. step must be > 0.
GradCheckReport GradCheck(const ScalarFn& f, std::span<const Array> point,
                          double step);

}  // namespace anonybench

#endif  // ANONYBENCH_GRADCHECK_H_
