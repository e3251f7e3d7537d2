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

#include "anonybench/metrics.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace anonybench {
namespace {

void CheckMatrix(const char* who, const Array& scores, const Array& labels) {
  if (scores.rank() != 2 || scores.shape() != labels.shape()) {
    throw ShapeError(std::string(who) + ": scores " +
                     ShapeToString(scores.shape()) + " and labels " +
                     ShapeToString(labels.shape()) + " must be equal [n, K]");
  }
}

std::vector<int> IntColumn(const Array& a, int64_t k) {
  std::vector<int> out;
  for (double v : Column(a, k)) out.push_back(v != 0.0 ? 1 : 0);
  return out;
}

}  // namespace

double Top1(const Array& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != static_cast<int64_t>(labels.size())) {
    throw ShapeError("top1: logits " + ShapeToString(logits.shape()) +
                     " do not match " + std::to_string(labels.size()) +
                     " labels");
  }
  const int64_t n = logits.dim(0), K = logits.dim(1);
  if (n == 0) throw MetricError("top1: empty batch");
  int64_t correct = 0;
  for (int64_t i = 0; i < n; ++i) {
    int64_t best = 0;
    for (int64_t k = 1; k < K; ++k) {
      if (logits[i * K + k] > logits[i * K + best]) best = k;
    }
    if (best == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("average_precision: scores and labels differ in length");
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores[a] > scores[b];
  });
  double sum = 0.0;
  int hits = 0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) return std::nullopt;
  return sum / hits;
}

CmapResult Cmap(const Array& scores, const Array& labels) {
  CheckMatrix("cmap", scores, labels);
  CmapResult r;
  double sum = 0.0;
  int used = 0;
  for (int64_t k = 0; k < scores.dim(1); ++k) {
    const std::vector<double> s = Column(scores, k);
    const std::vector<int> y = IntColumn(labels, k);
    r.ap.push_back(AveragePrecision(s, y));
    if (r.ap.back()) {
      sum += *r.ap.back();
      ++used;
    } else {
      r.excluded.push_back(static_cast<int>(k));
      std::fprintf(stderr,
                   "warning: attribute %lld has no positives; excluded from "
                   "cmap\n",
                   static_cast<long long>(k));
    }
  }
  if (used == 0) throw MetricError("cmap: no attribute has a positive label");
  r.cmap = sum / used;
  return r;
}

double F1FromCounts(int tp, int fp, int fn) {
  const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0;
  const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double MacroF1(const Array& scores, const Array& labels, double threshold) {
  CheckMatrix("macro_f1", scores, labels);
  const int64_t K = scores.dim(1);
  if (K == 0) throw MetricError("macro_f1: no attributes");
  double sum = 0.0;
  for (int64_t k = 0; k < K; ++k) {
    const std::vector<double> s = Column(scores, k);
    const std::vector<int> y = IntColumn(labels, k);
    int tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      const bool pred = s[i] >= threshold;
      if (pred && y[i]) ++tp;
      if (pred && !y[i]) ++fp;
      if (!pred && y[i]) ++fn;
    }
    sum += F1FromCounts(tp, fp, fn);
  }
  return sum / static_cast<double>(K);
}

std::vector<double> Column(const Array& a, int64_t k) {
  const int64_t n = a.dim(0), K = a.dim(1);
  std::vector<double> out(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) out[i] = a[i * K + k];
  return out;
}

}  // namespace anonybench
