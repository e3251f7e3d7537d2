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

// Loss terms of the anonymization game. All return scalar tensors recorded
// on the tape of their inputs.

#ifndef ANONYBENCH_LOSSES_H_
#define ANONYBENCH_LOSSES_H_

#include <span>

#include "anonybench/tape.h"

namespace anonybench {

// Mean over the batch of -log softmax(logits)[label]. logits [B, K].
Tensor CrossEntropy(const Tensor& logits, std::span<const int> labels);

// Mean over all elements of the per-attribute sigmoid cross-entropy.
// logits and targets (0/1) are [B, K].
Tensor BinaryCrossEntropy(const Tensor& logits, const Tensor& targets);

// sqrt(mean((x - y)^2)) over all elements.
Tensor RmsDiff(const Tensor& x, const Tensor& y);

// max(0, rms(x - anonymized) - limiter). Zero gradient while the RMS
// distortion stays within the limiter.
Tensor PenaltyLoss(const Tensor& x, const Tensor& anonymized, double limiter);

// Symmetric NT-Xent over N positive pairs (z[i], z_prime[i]), both [N, d].
// Rows are L2-normalized; h(u, v) = exp(cos(u, v) / temperature). Each of
// the 2N anchors contributes -log(h(anchor, positive) / sum over the other
// 2N - 1 projections); the result is the mean over anchors.
Tensor NtXent(const Tensor& z, const Tensor& z_prime, double temperature);

// l_t - min(l_b, mu) + lambda * l_penalty.
Tensor AnonymizerLoss(const Tensor& l_t, const Tensor& l_b,
                      const Tensor& l_penalty, double lambda, double mu);

// Sum over C, H, W of |x - x_hat|, averaged over the leading batch axis.
Tensor L1ReconLoss(const Tensor& x, const Tensor& x_hat);

struct LossTerms {
  Tensor l_t;
  Tensor l_b;
  Tensor l_penalty;
  Tensor l_a;

  double t() const { return l_t.item(); }
  double b() const { return l_b.item(); }
  double penalty() const { return l_penalty.item(); }
  double a() const { return l_a.item(); }
};

}  // namespace anonybench

#endif  // ANONYBENCH_LOSSES_H_
