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


// Helpers shared by the unit tests.

#ifndef ANONYBENCH_TESTS_TEST_UTIL_H_
#define ANONYBENCH_TESTS_TEST_UTIL_H_

#include <cstdint>

#include "anonybench/array.h"
#include "anonybench/config.h"
#include "anonybench/rng.h"

namespace anonybench::testing {

inline Array RandomArray(const Shape& shape, Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  Array a(shape);
  for (size_t i = 0; i < a.size(); ++i) a[i] = rng.Uniform(lo, hi);
  return a;
}

// A configuration small enough for a full run in well under a second.
inline RunConfig TinyConfig() {
  RunConfig c;
  c.data.frames = 4;
  c.data.action_train = 16;
  c.data.action_eval = 8;
  c.data.privacy_train = 16;
  c.data.privacy_eval = 8;
  c.nets.anon_width1 = 4;
  c.nets.anon_width2 = 4;
  c.nets.util_width1 = 4;
  c.nets.util_width2 = 4;
  c.nets.budget_width1 = 4;
  c.nets.budget_width2 = 4;
  c.nets.budget_feature_dim = 8;
  c.nets.projection_dim = 4;
  c.train.epochs_pretrain = 1;
  c.train.epochs_util_init = 1;
  c.train.epochs_budget_init = 1;
  c.train.epochs_anon = 2;
  c.train.batch_action = 4;
  c.train.batch_privacy = 4;
  c.train.skip = 1;
  c.train.epochs_action = 1;
  c.train.epochs_privacy = 1;
  return c;
}

}  // namespace anonybench::testing

#endif  // ANONYBENCH_TESTS_TEST_UTIL_H_
