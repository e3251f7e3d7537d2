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
#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "anonybench/gradcheck.h"
#include "anonybench/ops.h"
#include "anonybench/tape.h"
#include "primitive_cases.h"
#include "test_util.h"

namespace anonybench {
namespace {

using testing::GradCase;
using testing::RandomArray;

TEST(ArrayTest, ShapeAndFill) {
  Array a({2, 3}, 1.5);
  EXPECT_EQ(a.rank(), 2);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ(a[5], 1.5);
  EXPECT_THROW(Array({2, 2}, std::vector<double>(3)), ShapeError);
  EXPECT_THROW(a.item(), ShapeError);
  EXPECT_EQ(Array::Scalar(4.0).item(), 4.0);
}

TEST(ArrayTest, Reshape) {
  const Array a({2, 3}, std::vector<double>{0, 1, 2, 3, 4, 5});
  const Array b = a.Reshaped({3, 2});
  EXPECT_EQ(b.dim(0), 3);
  EXPECT_EQ(b[4], 4.0);
  EXPECT_THROW(a.Reshaped({4, 2}), ShapeError);
}

TEST(TapeTest, ChainRuleSimple) {
  Tape tape;
  Tensor x = tape.Leaf(Array::FromList({2.0, -3.0}));
  Tensor y = Sum(Mul(x, x));  // d/dx = 2x
  tape.Backward(y);
  EXPECT_DOUBLE_EQ(y.item(), 13.0);
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], -6.0);
}

TEST(TapeTest, FanOutAccumulates) {
  Tape tape;
  Tensor x = tape.Leaf(Array::Scalar(3.0));
  Tensor y = Add(Mul(x, x), Scale(x, 5.0));
  tape.Backward(y);
  EXPECT_DOUBLE_EQ(x.grad().item(), 11.0);
}

TEST(TapeTest, ConstantsGetNoGradient) {
  Tape tape;
  Tensor x = tape.Leaf(Array::Scalar(2.0));
  Tensor c = tape.Constant(Array::Scalar(7.0));
  tape.Backward(Mul(x, c));
  EXPECT_DOUBLE_EQ(x.grad().item(), 7.0);
  EXPECT_FALSE(c.requires_grad());
}

TEST(TapeTest, BackwardNeedsScalar) {
  Tape tape;
  Tensor x = tape.Leaf(Array({2}, 1.0));
  EXPECT_THROW(tape.Backward(x), ShapeError);
}

TEST(TapeTest, DependsOn) {
  Tape tape;
  Tensor a = tape.Leaf(Array::Scalar(1.0));
  Tensor b = tape.Leaf(Array::Scalar(2.0));
  Tensor c = Square(a);
  Tensor d = Add(c, b);
  EXPECT_TRUE(tape.DependsOn(d, a));
  EXPECT_TRUE(tape.DependsOn(d, b));
  EXPECT_FALSE(tape.DependsOn(c, b));
}

TEST(TapeTest, MixingTapesIsRejected) {
  Tape t1, t2;
  Tensor a = t1.Leaf(Array::Scalar(1.0));
  Tensor b = t2.Leaf(Array::Scalar(1.0));
  EXPECT_ANY_THROW(Add(a, b));
}

TEST(OpsTest, DomainErrors) {
  Tape tape;
  EXPECT_THROW(Log(tape.Leaf(Array::FromList({1.0, 0.0}))), DomainError);
  EXPECT_THROW(Sqrt(tape.Leaf(Array::Scalar(-1.0))), DomainError);
  EXPECT_THROW(L2Normalize(tape.Leaf(Array({2, 3}, 0.0))), DomainError);
}

TEST(OpsTest, ShapeErrors) {
  Tape tape;
  Tensor a = tape.Leaf(Array({2, 3}));
  Tensor b = tape.Leaf(Array({3, 2}));
  EXPECT_THROW(Add(a, b), ShapeError);
  EXPECT_THROW(MatMul(a, a), ShapeError);
  EXPECT_THROW(MeanPool2(tape.Leaf(Array({1, 1, 3, 3}))), ShapeError);
}

TEST(OpsTest, Conv2dMatchesDirectSum) {
  Rng rng(7);
  const Array x = RandomArray({2, 3, 5, 4}, rng);
  const Array w = RandomArray({2, 3, 3, 3}, rng);
  const Array b = RandomArray({2}, rng);
  Tape tape;
  const Array y =
      Conv2d(tape.Leaf(x), tape.Leaf(w), tape.Leaf(b)).value();
  ASSERT_EQ(y.shape(), (Shape{2, 2, 5, 4}));
  for (int n = 0; n < 2; ++n) {
    for (int o = 0; o < 2; ++o) {
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 4; ++c) {
          double expect = b[o];
          for (int i = 0; i < 3; ++i) {
            for (int dr = -1; dr <= 1; ++dr) {
              for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= 5 || cc < 0 || cc >= 4) continue;
                expect += x[((n * 3 + i) * 5 + rr) * 4 + cc] *
                          w[((o * 3 + i) * 3 + dr + 1) * 3 + dc + 1];
              }
            }
          }
          EXPECT_NEAR(y[((n * 2 + o) * 5 + r) * 4 + c], expect, 1e-12);
        }
      }
    }
  }
}

TEST(OpsTest, PoolAndUpsample) {
  Tape tape;
  const Array x({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(MeanPool2(tape.Leaf(x)).value()[0], 2.5);
  const Array u = Upsample2(tape.Leaf(x)).value();
  EXPECT_EQ(u.shape(), (Shape{1, 1, 4, 4}));
  EXPECT_EQ(u[0], 1.0);
  EXPECT_EQ(u[5], 1.0);
  EXPECT_EQ(u[15], 4.0);
}

TEST(OpsTest, LogSoftmaxRowsNormalize) {
  Tape tape;
  Rng rng(3);
  const Array x = RandomArray({4, 5}, rng, -30.0, 30.0);
  const Array y = LogSoftmax(tape.Leaf(x)).value();
  for (int r = 0; r < 4; ++r) {
    double total = 0.0;
    for (int c = 0; c < 5; ++c) total += std::exp(y[r * 5 + c]);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

class PrimitiveGradTest : public ::testing::TestWithParam<GradCase> {};

TEST_P(PrimitiveGradTest, MatchesCentralDifferences) {
  const GradCase& c = GetParam();
  Rng rng(DeriveSeed(1, c.name));
  std::vector<Array> point;
  for (const Shape& s : c.shapes) point.push_back(RandomArray(s, rng, c.lo, c.hi));
  const GradCheckReport report = GradCheck(c.f, point, 1e-5);
  EXPECT_TRUE(report.non_finite.empty());
  EXPECT_LT(report.max_rel_error, 1e-6) << c.name;
}

INSTANTIATE_TEST_SUITE_P(
    AllPrimitives, PrimitiveGradTest, ::testing::ValuesIn(testing::PrimitiveCases()),
    [](const ::testing::TestParamInfo<GradCase>& info) {
      return info.param.name;
    });

TEST(GradCheckTest, DetectsWrongGradient) {
  // x^2 recorded with the adjoint of 3x; the check must flag it.
  const ScalarFn wrong = [](Tape& tape, std::span<const Tensor> x) {
    Array y = x[0].value();
    for (size_t i = 0; i < y.size(); ++i) y[i] *= y[i];
    Tensor sq = tape.Record(OpKind::kSquare, {x[0].id()}, std::move(y),
                            [](const AdjointArgs& a) {
                              if (!a.in_grad[0]) return;
                              for (size_t i = 0; i < a.out.size(); ++i) {
                                (*a.in_grad[0])[i] +=
                                    3.0 * (*a.in[0])[i] * a.out_grad[i];
                              }
                            });
    return Sum(sq);
  };
  const ScalarFn right = [](Tape&, std::span<const Tensor> x) {
    return Sum(Square(x[0]));
  };
  const Array point[] = {Array::FromList({1.0, 2.0})};
  EXPECT_LT(GradCheck(right, point, 1e-5).max_rel_error, 1e-8);
  EXPECT_GT(GradCheck(wrong, point, 1e-5).max_rel_error, 0.1);
  EXPECT_THROW(GradCheck(right, point, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace anonybench
