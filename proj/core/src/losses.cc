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

#include "anonybench/losses.h"

#include <stdexcept>
#include <string>

#include "anonybench/ops.h"

namespace anonybench {

Tensor CrossEntropy(const Tensor& logits, std::span<const int> labels) {
  const Shape& s = logits.shape();
  if (s.size() != 2 || s[0] != static_cast<int64_t>(labels.size())) {
    throw ShapeError("cross_entropy: logits " + ShapeToString(s) + " vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const int64_t batch = s[0], classes = s[1];
  Array pick(s, 0.0);
  for (int64_t i = 0; i < batch; ++i) {
    const int label = labels[i];
    if (label < 0 || label >= classes) {
      throw std::out_of_range("cross_entropy: label " + std::to_string(label) +
                              " outside [0, " + std::to_string(classes) + ")");
    }
    pick[i * classes + label] = -1.0 / static_cast<double>(batch);
  }
  Tape& tape = *logits.tape();
  return Sum(Mul(LogSoftmax(logits), tape.Constant(std::move(pick))));
}

Tensor BinaryCrossEntropy(const Tensor& logits, const Tensor& targets) {
  if (logits.shape() != targets.shape()) {
    throw ShapeError("binary_cross_entropy: logits " +
                     ShapeToString(logits.shape()) + " vs targets " +
                     ShapeToString(targets.shape()));
  }
  return Mean(Sub(Softplus(logits), Mul(logits, targets)));
}

Tensor RmsDiff(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape()) {
    throw ShapeError("rms_diff: shape mismatch " + ShapeToString(x.shape()) +
                     " vs " + ShapeToString(y.shape()));
  }
  return Sqrt(Mean(Square(Sub(x, y))));
}

Tensor PenaltyLoss(const Tensor& x, const Tensor& anonymized, double limiter) {
  if (!(limiter >= 0.0)) {
    throw std::invalid_argument("penalty_loss: limiter must be >= 0, got " +
                                std::to_string(limiter));
  }
  return MaxScalar(AddScalar(RmsDiff(x, anonymized), -limiter), 0.0);
}

Tensor NtXent(const Tensor& z, const Tensor& z_prime, double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("nt_xent: temperature must be > 0");
  }
  if (z.shape() != z_prime.shape() || z.shape().size() != 2) {
    throw ShapeError("nt_xent: projections " + ShapeToString(z.shape()) +
                     " vs " + ShapeToString(z_prime.shape()));
  }
  const int64_t n = z.shape()[0];
  const int64_t m = 2 * n;
  Tape& tape = *z.tape();

  const Tensor halves[] = {z, z_prime};
  Tensor u = L2Normalize(Concat(halves, 0));
  Tensor sim = Scale(MatMul(u, Transpose(u)), 1.0 / temperature);

  Array others({m, m}, 1.0);
  Array positives({m, m}, 0.0);
  for (int64_t a = 0; a < m; ++a) {
    others[a * m + a] = 0.0;
    positives[a * m + (a + n) % m] = 1.0;
  }
  // cos <= 1, so shifting by 1/temperature keeps every exponent <= 0.
  const double shift = 1.0 / temperature;
  Tensor denom = SumAxis(
      Mul(Exp(AddScalar(sim, -shift)), tape.Constant(std::move(others))), 1);
  Tensor log_denom = AddScalar(Log(denom), shift);
  Tensor positive = Sum(Mul(sim, tape.Constant(std::move(positives))));
  return Scale(Sub(Sum(log_denom), positive), 1.0 / static_cast<double>(m));
}

Tensor AnonymizerLoss(const Tensor& l_t, const Tensor& l_b,
                      const Tensor& l_penalty, double lambda, double mu) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("anonymizer_loss: lambda must be >= 0");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("anonymizer_loss: mu must be > 0");
  return Add(Sub(l_t, MinScalar(l_b, mu)), Scale(l_penalty, lambda));
}

Tensor L1ReconLoss(const Tensor& x, const Tensor& x_hat) {
  const Shape& s = x.shape();
  if (s != x_hat.shape() || s.size() < 3) {
    throw ShapeError("l1_recon_loss: shape mismatch " + ShapeToString(s) +
                     " vs " + ShapeToString(x_hat.shape()));
  }
  const int64_t per_image = s[s.size() - 3] * s[s.size() - 2] * s[s.size() - 1];
  const double images = static_cast<double>(NumElements(s) / per_image);
  return Scale(Sum(Abs(Sub(x, x_hat))), 1.0 / images);
}

}  // namespace anonybench
