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

#include "anonybench/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace anonybench {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

}  // namespace

std::string ToString(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind ParseOptimizerKind(const std::string& text) {
  if (text == "sgd") return OptimizerKind::kSgd;
  if (text == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + text + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), lr_(learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("optimizer: learning rate must be > 0");
  }
}

void Optimizer::Step(ParamSet& params) {
  ++steps_;
  auto items = params.items();
  if (kind_ == OptimizerKind::kSgd) {
    for (Parameter& p : items) {
      p.value.AddScaledInPlace(p.grad, -lr_);
      p.grad.Fill(0.0);
    }
    return;
  }
  if (m_.empty()) {
    for (const Parameter& p : items) {
      m_.emplace_back(p.value.shape(), 0.0);
      v_.emplace_back(p.value.shape(), 0.0);
    }
  }
  if (m_.size() != items.size()) {
    throw std::logic_error("optimizer: parameter set changed between steps");
  }
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(steps_));
  for (size_t k = 0; k < items.size(); ++k) {
    Parameter& p = items[k];
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m_[k][i] = kBeta1 * m_[k][i] + (1.0 - kBeta1) * g;
      v_[k][i] = kBeta2 * v_[k][i] + (1.0 - kBeta2) * g * g;
      const double mhat = m_[k][i] / c1;
      const double vhat = v_[k][i] / c2;
      p.value[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
    }
    p.grad.Fill(0.0);
  }
}

void Optimizer::Save(CheckpointFile& file, std::string_view prefix) const {
  const std::string base(prefix);
  file.meta["optimizers"][base] = {{"kind", ToString(kind_)},
                                   {"learning_rate", lr_},
                                   {"steps", steps_}};
  for (size_t k = 0; k < m_.size(); ++k) {
    file.arrays.emplace_back(base + "/m" + std::to_string(k), m_[k]);
    file.arrays.emplace_back(base + "/v" + std::to_string(k), v_[k]);
  }
}

void Optimizer::Load(const CheckpointFile& file, std::string_view prefix,
                     const ParamSet& params) {
  const std::string base(prefix);
  const auto& entry = file.meta.at("optimizers").at(base);
  kind_ = ParseOptimizerKind(entry.at("kind").get<std::string>());
  lr_ = entry.at("learning_rate").get<double>();
  steps_ = entry.at("steps").get<int64_t>();
  m_.clear();
  v_.clear();
  if (kind_ != OptimizerKind::kAdam || steps_ == 0) return;
  for (size_t k = 0; k < params.size(); ++k) {
    const Array* m = file.Find(base + "/m" + std::to_string(k));
    const Array* v = file.Find(base + "/v" + std::to_string(k));
    if (!m || !v) throw CheckpointError("checkpoint: missing moments for " + base);
    m_.push_back(*m);
    v_.push_back(*v);
  }
}

}  // namespace anonybench
