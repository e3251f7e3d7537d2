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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "anonybench/gradcheck.h"
#include "anonybench/losses.h"
#include "anonybench/ops.h"
#include "test_util.h"

namespace anonybench {
namespace {

using testing::RandomArray;

// Direct transcription of the symmetric contrastive loss: 2N anchors, each
// against its partner over the other 2N - 1 projections.
double NtXentReference(const Array& z, const Array& zp, double tau) {
  const int64_t n = z.dim(0), d = z.dim(1);
  std::vector<std::vector<double>> rows;
  for (const Array* a : {&z, &zp}) {
    for (int64_t i = 0; i < n; ++i) {
      std::vector<double> r(d);
      double norm = 0.0;
      for (int64_t k = 0; k < d; ++k) {
        r[k] = (*a)[i * d + k];
        norm += r[k] * r[k];
      }
      for (double& v : r) v /= std::sqrt(norm);
      rows.push_back(r);
    }
  }
  auto h = [&](int a, int b) {
    double dot = 0.0;
    for (int64_t k = 0; k < d; ++k) dot += rows[a][k] * rows[b][k];
    return std::exp(dot / tau);
  };
  double total = 0.0;
  for (int a = 0; a < 2 * n; ++a) {
    const int pos = a < n ? a + n : a - n;
    double denom = 0.0;
    for (int b = 0; b < 2 * n; ++b) {
      if (b != a) denom += h(a, b);
    }
    total += -std::log(h(a, pos) / denom);
  }
  return total / (2.0 * n);
}

TEST(CrossEntropyTest, HandValue) {
  Tape tape;
  const Tensor logits =
      tape.Leaf(Array({2, 3}, std::vector<double>{0, 0, 0, 1, 2, 3}));
  const int labels[] = {1, 2};
  const double expect =
      0.5 * (std::log(3.0) + std::log(std::exp(1) + std::exp(2) + std::exp(3)) - 3.0);
  EXPECT_NEAR(CrossEntropy(logits, labels).item(), expect, 1e-12);
}

TEST(CrossEntropyTest, RejectsBadLabels) {
  Tape tape;
  const Tensor logits = tape.Leaf(Array({2, 3}));
  const int too_few[] = {0};
  const int out_of_range[] = {0, 3};
  EXPECT_THROW(CrossEntropy(logits, too_few), ShapeError);
  EXPECT_ANY_THROW(CrossEntropy(logits, out_of_range));
}

TEST(BinaryCrossEntropyTest, HandValueAndStability) {
  Tape tape;
  const Tensor logits =
      tape.Leaf(Array({1, 3}, std::vector<double>{0.0, 800.0, -800.0}));
  const Tensor targets =
      tape.Constant(Array({1, 3}, std::vector<double>{1.0, 0.0, 0.0}));
  const double v = BinaryCrossEntropy(logits, targets).item();
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, (std::log(2.0) + 800.0 + 0.0) / 3.0, 1e-9);
}

TEST(RmsDiffTest, HandValue) {
  Tape tape;
  const Tensor x = tape.Leaf(Array::FromList({1, 2, 3, 4}));
  const Tensor y = tape.Leaf(Array::FromList({1, 0, 3, 8}));
  EXPECT_NEAR(RmsDiff(x, y).item(), std::sqrt((4.0 + 16.0) / 4.0), 1e-12);
}

TEST(PenaltyLossTest, ZeroWithinLimiterWithZeroGradient) {
  Tape tape;
  const Tensor x = tape.Constant(Array::FromList({0.5, 0.5, 0.5, 0.5}));
  const Tensor a = tape.Leaf(Array::FromList({0.6, 0.4, 0.5, 0.5}));
  const Tensor p = PenaltyLoss(x, a, 0.3);
  EXPECT_EQ(p.item(), 0.0);
  tape.Backward(p);
  for (double g : a.grad().data()) EXPECT_EQ(g, 0.0);
}

TEST(PenaltyLossTest, HingeAboveLimiter) {
  Tape tape;
  const Tensor x = tape.Constant(Array::FromList({0.0, 0.0}));
  const Tensor a = tape.Leaf(Array::FromList({1.0, 1.0}));
  const Tensor p = PenaltyLoss(x, a, 0.25);
  EXPECT_NEAR(p.item(), 0.75, 1e-12);
  tape.Backward(p);
  // d rms / d a_i = a_i / (n * rms) = 0.5.
  EXPECT_NEAR(a.grad()[0], 0.5, 1e-12);
}

TEST(PenaltyLossTest, GradientAtZeroDistortionIsFinite) {
  Tape tape;
  const Tensor x = tape.Constant(Array::FromList({0.2, 0.7}));
  const Tensor a = tape.Leaf(Array::FromList({0.2, 0.7}));
  const Tensor p = PenaltyLoss(x, a, 0.0);
  EXPECT_EQ(p.item(), 0.0);
  tape.Backward(p);
  EXPECT_TRUE(a.grad().AllFinite());
}

TEST(NtXentTest, MatchesReference) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const int n = 2 + static_cast<int>(seed % 5);
    const Array z = RandomArray({n, 4}, rng);
    const Array zp = RandomArray({n, 4}, rng);
    for (double tau : {0.1, 0.5, 1.0}) {
      Tape tape;
      const double got =
          NtXent(tape.Leaf(z), tape.Leaf(zp), tau).item();
      EXPECT_NEAR(got, NtXentReference(z, zp, tau), 1e-10)
          << "seed " << seed << " tau " << tau;
    }
  }
}

TEST(NtXentTest, SymmetricInViews) {
  Rng rng(5);
  const Array z = RandomArray({4, 3}, rng);
  const Array zp = RandomArray({4, 3}, rng);
  Tape tape;
  EXPECT_NEAR(NtXent(tape.Leaf(z), tape.Leaf(zp), 0.2).item(),
              NtXent(tape.Leaf(zp), tape.Leaf(z), 0.2).item(), 1e-12);
}

TEST(NtXentTest, IdenticalRowsGiveLog2NMinus1) {
  // All projections equal: every term is log(2N - 1).
  const int n = 4;
  const Array z({n, 2}, 1.0);
  Tape tape;
  EXPECT_NEAR(NtXent(tape.Leaf(z), tape.Leaf(z), 0.1).item(),
              std::log(2.0 * n - 1.0), 1e-12);
}

TEST(NtXentTest, ScaleInvariant) {
  Rng rng(11);
  const Array z = RandomArray({3, 5}, rng);
  const Array zp = RandomArray({3, 5}, rng);
  Array z2 = z;
  for (size_t i = 0; i < z2.size(); ++i) z2[i] *= 7.0;
  Tape tape;
  EXPECT_NEAR(NtXent(tape.Leaf(z), tape.Leaf(zp), 0.3).item(),
              NtXent(tape.Leaf(z2), tape.Leaf(zp), 0.3).item(), 1e-12);
}

TEST(NtXentTest, GradientCheck) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const Array point[] = {RandomArray({3, 4}, rng), RandomArray({3, 4}, rng)};
    const ScalarFn f = [](Tape&, std::span<const Tensor> x) {
      return NtXent(x[0], x[1], 0.5);
    };
    EXPECT_LT(GradCheck(f, point, 1e-5).max_rel_error, 1e-6);
  }
}

TEST(AnonymizerLossTest, ValueAndCap) {
  Tape tape;
  const Tensor lt = tape.Leaf(Array::Scalar(0.8));
  const Tensor lb = tape.Leaf(Array::Scalar(0.4));
  const Tensor lp = tape.Leaf(Array::Scalar(0.2));
  EXPECT_NEAR(AnonymizerLoss(lt, lb, lp, 2.0, 1.0).item(), 0.8 - 0.4 + 0.4,
              1e-15);
  // l_b above the cap contributes a constant.
  EXPECT_NEAR(AnonymizerLoss(lt, lb, lp, 2.0, 0.3).item(), 0.8 - 0.3 + 0.4,
              1e-15);
}

TEST(AnonymizerLossTest, GradientSigns) {
  for (double mu : {1.0, 0.1}) {
    Tape tape;
    const Tensor lt = tape.Leaf(Array::Scalar(0.8));
    const Tensor lb = tape.Leaf(Array::Scalar(0.4));
    const Tensor lp = tape.Leaf(Array::Scalar(0.2));
    tape.Backward(AnonymizerLoss(lt, lb, lp, 0.5, mu));
    EXPECT_EQ(lt.grad().item(), 1.0);
    EXPECT_EQ(lb.grad().item(), mu > 0.4 ? -1.0 : 0.0);
    EXPECT_EQ(lp.grad().item(), 0.5);
  }
}

TEST(L1ReconLossTest, SumOverImageMeanOverBatch) {
  Tape tape;
  const Tensor x = tape.Leaf(Array({2, 1, 1, 2}, std::vector<double>{0, 0, 1, 1}));
  const Tensor y =
      tape.Leaf(Array({2, 1, 1, 2}, std::vector<double>{0.5, -0.5, 1, 0}));
  EXPECT_NEAR(L1ReconLoss(x, y).item(), (1.0 + 1.0) / 2.0, 1e-15);
}

}  // namespace
}  // namespace anonybench
