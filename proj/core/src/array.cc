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

#include "anonybench/array.h"

#include <algorithm>
#include <cmath>
#include <utility>

namespace anonybench {

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

void CheckExtents(const Shape& shape) {
  for (int64_t d : shape) {
    if (d <= 0) {
      throw ShapeError("array: non-positive extent in shape " +
                       ShapeToString(shape));
    }
  }
}

}  // namespace

Array::Array(Shape shape, double fill) : shape_(std::move(shape)) {
  CheckExtents(shape_);
  data_.assign(static_cast<size_t>(NumElements(shape_)), fill);
}

Array::Array(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  CheckExtents(shape_);
  if (static_cast<int64_t>(data_.size()) != NumElements(shape_)) {
    throw ShapeError("array: " + std::to_string(data_.size()) +
                     " values do not fill shape " + ShapeToString(shape_));
  }
}

Array Array::Scalar(double value) { return Array(Shape{}, {value}); }

Array Array::FromList(std::initializer_list<double> values) {
  return Array(Shape{static_cast<int64_t>(values.size())},
               std::vector<double>(values));
}

double Array::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item: expected a single element, got shape " +
                     ShapeToString(shape_));
  }
  return data_[0];
}

Array Array::Reshaped(Shape shape) const& {
  Array copy = *this;
  return std::move(copy).Reshaped(std::move(shape));
}

Array Array::Reshaped(Shape shape) && {
  if (NumElements(shape) != static_cast<int64_t>(data_.size())) {
    throw ShapeError("reshape: cannot view " + ShapeToString(shape_) + " as " +
                     ShapeToString(shape));
  }
  CheckExtents(shape);
  shape_ = std::move(shape);
  return std::move(*this);
}

void Array::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Array::AddInPlace(const Array& other) {
  if (other.size() != size()) {
    throw ShapeError("add_in_place: " + ShapeToString(shape_) + " vs " +
                     ShapeToString(other.shape_));
  }
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

void Array::AddScaledInPlace(const Array& other, double scale) {
  if (other.size() != size()) {
    throw ShapeError("add_scaled_in_place: " + ShapeToString(shape_) + " vs " +
                     ShapeToString(other.shape_));
  }
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

bool Array::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace anonybench
