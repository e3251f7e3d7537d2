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

#ifndef ANONYBENCH_OPTIMIZER_H_
#define ANONYBENCH_OPTIMIZER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anonybench/checkpoint.h"
#include "anonybench/params.h"

namespace anonybench {

enum class OptimizerKind { kSgd, kAdam };

std::string ToString(OptimizerKind kind);
OptimizerKind ParseOptimizerKind(const std::string& text);

// Applies one update from the accumulated gradients, then zeroes them.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);

  void Step(ParamSet& params);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  int64_t steps() const { return steps_; }

  void Save(CheckpointFile& file, std::string_view prefix) const;
  void Load(const CheckpointFile& file, std::string_view prefix,
            const ParamSet& params);

 private:
  OptimizerKind kind_;
  double lr_;
  int64_t steps_ = 0;
  // Adam moments, one per parameter, allocated on the first step.
  std::vector<Array> m_;
  std::vector<Array> v_;
};

}  // namespace anonybench

#endif  // ANONYBENCH_OPTIMIZER_H_
