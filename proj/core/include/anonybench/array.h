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

#ifndef ANONYBENCH_ARRAY_H_
#define ANONYBENCH_ARRAY_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace anonybench {

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Raised when operand shapes do not satisfy a primitive's shape rule.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a value lies outside a primitive's domain (log of a
// non-positive value, normalizing a zero vector, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dense row-major array of 64-bit floats. Rank 0 is a scalar.
class Array {
 public:
  Array() = default;
  explicit Array(Shape shape, double fill = 0.0);
  Array(Shape shape, std::vector<double> data);

  static Array Scalar(double value);
  static Array FromList(std::initializer_list<double> values);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int axis) const { return shape_.at(axis); }
  size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double operator[](size_t i) const { return data_[i]; }
  double& operator[](size_t i) { return data_[i]; }

  // The single element of an array with one element.
  double item() const;

  Array Reshaped(Shape shape) const&;
  Array Reshaped(Shape shape) &&;

  void Fill(double value);
  // this += other (same number of elements).
  void AddInPlace(const Array& other);
  void AddScaledInPlace(const Array& other, double scale);

  bool AllFinite() const;
  bool operator==(const Array& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace anonybench

#endif  // ANONYBENCH_ARRAY_H_
