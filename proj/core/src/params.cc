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

#include "anonybench/params.h"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "anonybench/digest.h"
#include "anonybench/rng.h"

namespace anonybench {

Parameter& ParamSet::Add(std::string name, Array value) {
  for (const Parameter& p : items_) {
    if (p.name == name) throw std::logic_error("duplicate parameter " + name);
  }
  Array grad(value.shape(), 0.0);
  items_.push_back(Parameter{std::move(name), std::move(value), std::move(grad)});
  return items_.back();
}

Parameter& ParamSet::AddUniform(std::string name, Shape shape, int64_t fan_in,
                                Rng& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Array value(std::move(shape));
  for (double& v : value.data()) v = rng.Uniform(-s, s);
  return Add(std::move(name), std::move(value));
}

const Parameter& ParamSet::at(std::string_view name) const {
  for (const Parameter& p : items_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no parameter named " + std::string(name));
}

Parameter& ParamSet::at(std::string_view name) {
  return const_cast<Parameter&>(std::as_const(*this).at(name));
}

size_t ParamSet::NumScalars() const {
  size_t n = 0;
  for (const Parameter& p : items_) n += p.value.size();
  return n;
}

Bound ParamSet::Bind(Tape& tape, bool trainable) const {
  Bound bound;
  bound.reserve(items_.size());
  for (const Parameter& p : items_) {
    bound.push_back(trainable ? tape.Leaf(p.value) : tape.Constant(p.value));
  }
  return bound;
}

void ParamSet::AccumulateGrads(const Bound& bound) {
  if (bound.size() != items_.size()) {
    throw std::logic_error("AccumulateGrads: binding does not match set");
  }
  for (size_t i = 0; i < items_.size(); ++i) {
    if (bound[i].requires_grad()) items_[i].grad.AddInPlace(bound[i].grad());
  }
}

void ParamSet::ZeroGrads() {
  for (Parameter& p : items_) p.grad.Fill(0.0);
}

bool ParamSet::GradsFinite() const {
  for (const Parameter& p : items_) {
    if (!p.grad.AllFinite()) return false;
  }
  return true;
}

uint64_t ParamSet::Checksum() const {
  Digest d;
  for (const Parameter& p : items_) {
    d.Update(p.name);
    for (int64_t e : p.value.shape()) d.Update(static_cast<uint64_t>(e));
    d.Update(p.value.data());
  }
  return d.value();
}

}  // namespace anonybench
