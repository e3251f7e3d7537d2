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

#include "anonybench/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anonybench {
namespace {

double Evaluate(const ScalarFn& f, std::span<const Array> point) {
  Tape tape;
  std::vector<Tensor> leaves;
  leaves.reserve(point.size());
  for (const Array& a : point) leaves.push_back(tape.Constant(a));
  try {
    return f(tape, leaves).item();
  } catch (const DomainError&) {
    return std::nan("");
  }
}

}  // namespace

GradCheckReport GradCheck(const ScalarFn& f, std::span<const Array> point,
                          double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be > 0");

  std::vector<Array> analytic;
  {
    Tape tape;
    std::vector<Tensor> leaves;
    for (const Array& a : point) leaves.push_back(tape.Leaf(a));
    Tensor loss = f(tape, leaves);
    tape.Backward(loss);
    for (const Tensor& t : leaves) analytic.push_back(t.grad());
  }

  GradCheckReport report;
  std::vector<Array> probe(point.begin(), point.end());
  for (size_t k = 0; k < probe.size(); ++k) {
    for (size_t i = 0; i < probe[k].size(); ++i) {
      const double x0 = probe[k][i];
      probe[k][i] = x0 + step;
      const double up = Evaluate(f, probe);
      probe[k][i] = x0 - step;
      const double down = Evaluate(f, probe);
      probe[k][i] = x0;
      ++report.coordinates;
      const double a = analytic[k][i];
      if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(a)) {
        report.non_finite.push_back(std::to_string(k) + ":" + std::to_string(i));
        continue;
      }
      const double numeric = (up - down) / (2.0 * step);
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      report.max_rel_error = std::max(report.max_rel_error, err);
    }
  }
  return report;
}

}  // namespace anonybench
