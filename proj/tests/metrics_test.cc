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
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "anonybench/metrics.h"
#include "anonybench/rng.h"

namespace anonybench {
namespace {

// Precision at the rank of each positive, where item j precedes item i when
// it scores higher or ties with a smaller index. O(n^2) on purpose.
std::optional<double> ApByCounting(const std::vector<double>& s,
                                   const std::vector<int>& y) {
  const size_t n = s.size();
  double sum = 0.0;
  int positives = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!y[i]) continue;
    ++positives;
    int rank = 0, hits = 0;
    for (size_t j = 0; j < n; ++j) {
      if (s[j] > s[i] || (s[j] == s[i] && j <= i)) {
        ++rank;
        hits += y[j];
      }
    }
    sum += static_cast<double>(hits) / rank;
  }
  if (positives == 0) return std::nullopt;
  return sum / positives;
}

TEST(Top1Test, TiesGoToLowestIndex) {
  const Array logits({3, 3}, std::vector<double>{1, 1, 0, 0, 2, 2, 5, 1, 5});
  EXPECT_DOUBLE_EQ(Top1(logits, std::vector<int>{0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(Top1(logits, std::vector<int>{1, 2, 2}), 0.0);
  EXPECT_THROW(Top1(logits, std::vector<int>{0}), std::invalid_argument);
}

TEST(AveragePrecisionTest, HandValues) {
  const std::vector<double> s = {0.9, 0.8, 0.7, 0.6};
  EXPECT_DOUBLE_EQ(*AveragePrecision(s, std::vector<int>{1, 0, 1, 0}),
                   (1.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(*AveragePrecision(s, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_FALSE(AveragePrecision(s, std::vector<int>{0, 0, 0, 0}).has_value());
}

TEST(AveragePrecisionTest, TiesKeepInputOrder) {
  const std::vector<double> s = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(*AveragePrecision(s, std::vector<int>{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(*AveragePrecision(s, std::vector<int>{0, 1}), 0.5);
}

TEST(AveragePrecisionTest, MatchesCountingReference) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const int n = 1 + static_cast<int>(rng.Below(12));
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.Below(4)) / 4.0;  // many ties
      y[i] = rng.Bernoulli(0.4);
    }
    const auto got = AveragePrecision(s, y);
    const auto want = ApByCounting(s, y);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (want) {
      EXPECT_NEAR(*got, *want, 1e-12);
    }
  }
}

TEST(CmapTest, ExcludesAttributesWithoutPositives) {
  const Array scores({3, 2}, std::vector<double>{0.9, 0.1, 0.2, 0.3, 0.8, 0.5});
  const Array labels({3, 2}, std::vector<double>{1, 0, 0, 0, 1, 0});
  const CmapResult r = Cmap(scores, labels);
  EXPECT_DOUBLE_EQ(r.cmap, 1.0);
  EXPECT_EQ(r.excluded, std::vector<int>{1});
  EXPECT_FALSE(r.ap[1].has_value());
  const Array none({3, 2}, 0.0);
  EXPECT_THROW(Cmap(scores, none), MetricError);
}

TEST(MacroF1Test, ThresholdIsInclusive) {
  const Array scores({2, 1}, std::vector<double>{0.5, 0.49});
  const Array labels({2, 1}, std::vector<double>{1, 0});
  EXPECT_DOUBLE_EQ(MacroF1(scores, labels), 1.0);
}

TEST(MacroF1Test, ZeroOverZeroIsZero) {
  EXPECT_EQ(F1FromCounts(0, 0, 0), 0.0);
  EXPECT_EQ(F1FromCounts(0, 3, 0), 0.0);
  EXPECT_DOUBLE_EQ(F1FromCounts(2, 1, 1), 2.0 / 3.0);
}

TEST(MacroF1Test, MatchesPerAttributeCounts) {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + seed);
    const int n = 1 + static_cast<int>(rng.Below(10)), k = 3;
    Array s({n, k}), y({n, k});
    for (int i = 0; i < n * k; ++i) {
      s[i] = rng.Uniform();
      y[i] = rng.Bernoulli(0.5);
    }
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
      int tp = 0, fp = 0, fn = 0;
      for (int i = 0; i < n; ++i) {
        const bool p = s[i * k + a] >= 0.5, t = y[i * k + a] > 0.5;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
      }
      const double prec = tp + fp ? double(tp) / (tp + fp) : 0.0;
      const double rec = tp + fn ? double(tp) / (tp + fn) : 0.0;
      total += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    }
    EXPECT_NEAR(MacroF1(s, y), total / k, 1e-12);
  }
}

}  // namespace
}  // namespace anonybench
