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


#include <vector>

#include <benchmark/benchmark.h>

#include "anonybench/losses.h"
#include "anonybench/nets.h"
#include "anonybench/ops.h"
#include "anonybench/rng.h"

namespace anonybench {
namespace {

Array Random(const Shape& shape, uint64_t seed) {
  Rng rng(seed);
  Array a(shape);
  for (size_t i = 0; i < a.size(); ++i) a[i] = rng.Uniform();
  return a;
}

void BM_Conv2dForwardBackward(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const Array x = Random({16, channels, 16, 16}, 1);
  const Array w = Random({channels, channels, 3, 3}, 2);
  const Array b = Random({channels}, 3);
  for (auto _ : state) {
    Tape tape;
    const Tensor xt = tape.Leaf(x);
    const Tensor y = Conv2d(xt, tape.Leaf(w), tape.Leaf(b));
    tape.Backward(Sum(y));
    benchmark::DoNotOptimize(xt.grad().data().data());
  }
}
BENCHMARK(BM_Conv2dForwardBackward)->Arg(3)->Arg(8)->Arg(16);

void BM_AnonymizerForward(benchmark::State& state) {
  Anonymizer net(AnonymizerSpec{}, 1);
  const Array frames = Random({state.range(0), 3, 16, 16}, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.Apply(frames).data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnonymizerForward)->Arg(16)->Arg(64);

void BM_AnonymizerBackward(benchmark::State& state) {
  Anonymizer net(AnonymizerSpec{}, 1);
  const Array frames = Random({state.range(0), 3, 16, 16}, 5);
  for (auto _ : state) {
    Tape tape;
    const Bound params = net.params().Bind(tape, true);
    const Tensor x = tape.Constant(frames);
    tape.Backward(L1ReconLoss(x, net.Forward(params, x)));
    benchmark::DoNotOptimize(params.front().grad().data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnonymizerBackward)->Arg(16)->Arg(64);

void BM_NtXent(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Array z = Random({n, 16}, 6), zp = Random({n, 16}, 7);
  for (auto _ : state) {
    Tape tape;
    const Tensor a = tape.Leaf(z);
    tape.Backward(NtXent(a, tape.Leaf(zp), 0.1));
    benchmark::DoNotOptimize(a.grad().data().data());
  }
}
BENCHMARK(BM_NtXent)->Arg(8)->Arg(16)->Arg(64);

}  // namespace
}  // namespace anonybench

BENCHMARK_MAIN();
