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

// Utility and leakage metrics.
//
// Conventions:
//  * Top1: argmax ties resolve to the lowest class index.
//  * AveragePrecision: mean of precision@k over the ranks k of the
//    positives, ranked by descending score; equal scores keep input order.
//  * Cmap skips attributes with no positives (and warns); it throws if every
//    attribute is skipped.
//  * MacroF1 thresholds scores at `threshold` (>= is positive); a 0/0
//    precision or recall counts as 0.

#ifndef ANONYBENCH_METRICS_H_
#define ANONYBENCH_METRICS_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anonybench/array.h"

namespace anonybench {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// logits [n, K]; labels of length n.
double Top1(const Array& logits, std::span<const int> labels);

// nullopt when there are no positives.
std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const int> labels);

struct CmapResult {
  double cmap = 0.0;
  // Per attribute; nullopt for excluded attributes.
  std::vector<std::optional<double>> ap;
  std::vector<int> excluded;
};

// scores and labels [n, K]; labels are 0/1.
CmapResult Cmap(const Array& scores, const Array& labels);

double MacroF1(const Array& scores, const Array& labels,
               double threshold = 0.5);

// F1 from raw counts with the 0/0 -> 0 rule.
double F1FromCounts(int tp, int fp, int fn);

// Column k of an [n, K] array.
std::vector<double> Column(const Array& a, int64_t k);

}  // namespace anonybench

#endif  // ANONYBENCH_METRICS_H_
