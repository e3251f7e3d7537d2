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

#ifndef ANONYBENCH_PARAMS_H_
#define ANONYBENCH_PARAMS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anonybench/array.h"
#include "anonybench/tape.h"

namespace anonybench {

class Rng;

struct Parameter {
  std::string name;
  Array value;
  Array grad;
};

// Parameters bound onto one tape, in ParamSet order.
using Bound = std::vector<Tensor>;

// Ordered, named collection of trainable arrays.
class ParamSet {
 public:
  Parameter& Add(std::string name, Array value);
  // Uniform in [-s, s], s = 1 / sqrt(fan_in).
  Parameter& AddUniform(std::string name, Shape shape, int64_t fan_in,
                        Rng& rng);

  std::span<Parameter> items() { return items_; }
  std::span<const Parameter> items() const { return items_; }
  size_t size() const { return items_.size(); }
  const Parameter& at(std::string_view name) const;
  Parameter& at(std::string_view name);
  size_t NumScalars() const;

  // Records every parameter on the tape: as leaves when `trainable`,
  // otherwise as constants (gradients still flow through them to inputs).
  Bound Bind(Tape& tape, bool trainable) const;
  // grad += d(loss)/d(param) from a finished backward pass.
  void AccumulateGrads(const Bound& bound);
  void ZeroGrads();
  bool GradsFinite() const;

  // Hash of names, shapes and values; bit-exact parameter identity.
  uint64_t Checksum() const;

 private:
  std::vector<Parameter> items_;
};

}  // namespace anonybench

#endif  // ANONYBENCH_PARAMS_H_
