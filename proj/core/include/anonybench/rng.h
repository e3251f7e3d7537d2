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

#ifndef ANONYBENCH_RNG_H_
#define ANONYBENCH_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace anonybench {

// splitmix64 finalizer.
uint64_t Mix64(uint64_t x);

// Child seed for (stream, index) under `master`. Streams are short tags such
// as "action/train"; distinct tags give statistically independent seeds.
uint64_t DeriveSeed(uint64_t master, std::string_view stream,
                    uint64_t index = 0);

// Platform-stable generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions are implemented here
// because the standard library ones are not.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n);
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  template <class T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<int> Permutation(int n, uint64_t seed);

}  // namespace anonybench

#endif  // ANONYBENCH_RNG_H_
