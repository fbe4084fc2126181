// Copyright 2026 The fctn-rtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fctn {

using Index = std::size_t;
using Shape = std::vector<Index>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Index shape_product(std::span<const Index> shape);

/// Dense N-way array of doubles stored column-major (first index fastest).
///
/// Every tensor has order >= 1 and every dimension >= 1. A default-constructed
/// tensor is the scalar 0 with shape (1).
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), 1.0); }

  const Shape& shape() const noexcept { return shape_; }
  Index order() const noexcept { return shape_.size(); }
  Index dim(Index axis) const { return shape_.at(axis); }
  Index size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  Eigen::Map<Vector> vec() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
  Eigen::Map<const Vector> vec() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  double& operator[](Index linear) { return data_[linear]; }
  double operator[](Index linear) const { return data_[linear]; }

  double& at(std::span<const Index> idx) { return data_[linear_index(idx)]; }
  double at(std::span<const Index> idx) const { return data_[linear_index(idx)]; }
  double& at(std::initializer_list<Index> idx) { return at(std::span(idx.begin(), idx.size())); }
  double at(std::initializer_list<Index> idx) const {
    return at(std::span(idx.begin(), idx.size()));
  }

  /// Column-major linearization of a 0-based multi-index.
  Index linear_index(std::span<const Index> idx) const;
  std::vector<Index> multi_index(Index linear) const;

  /// Same data viewed under a new shape with equal element count.
  Tensor reshaped(Shape shape) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);

/// Permutation of the modes 0..N-1 (0-based).
class ModePermutation {
 public:
  explicit ModePermutation(std::vector<Index> order);
  static ModePermutation identity(Index n);

  const std::vector<Index>& order() const noexcept { return order_; }
  Index size() const noexcept { return order_.size(); }
  Index operator[](Index k) const { return order_[k]; }
  ModePermutation inverse() const;

 private:
  std::vector<Index> order_;
};

/// Rows take modes perm[0..split), columns take perm[split..N).
struct UnfoldingSpec {
  ModePermutation perm;
  Index split;

  UnfoldingSpec(ModePermutation p, Index d);
};

/// Result axis a holds source axis n[a].
Tensor permute(const Tensor& x, const ModePermutation& n);
/// Inverse of permute: ipermute(permute(x, n), n) == x.
Tensor ipermute(const Tensor& x, const ModePermutation& n);

Matrix unfold(const Tensor& x, const UnfoldingSpec& spec);
Tensor fold(const Matrix& m, const UnfoldingSpec& spec, const Shape& shape);

/// Contracts modes_x[i] of x with modes_y[i] of y. The result carries the free
/// modes of x (ascending) followed by the free modes of y (ascending). When
/// every mode is contracted the result is the scalar tensor of shape (1).
Tensor contract(const Tensor& x, const Tensor& y, std::span<const Index> modes_x,
                std::span<const Index> modes_y);

struct Norms {
  double frobenius = 0.0;
  double l1 = 0.0;
  double max_abs = 0.0;
};

Norms norms(const Tensor& x);
double frobenius_norm(const Tensor& x);
double inner(const Tensor& x, const Tensor& y);

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace fctn
