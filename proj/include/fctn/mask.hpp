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

#include <cstdint>
#include <span>
#include <vector>

#include "fctn/tensor.hpp"

namespace fctn {

/// Observed index set Omega of a tensor, stored as one byte per entry in the
/// tensor's column-major order.
class ObservationMask {
 public:
  ObservationMask(Shape shape, std::vector<std::uint8_t> omega);
  static ObservationMask full(const Shape& shape);
  /// Entries of `t` that are nonzero are observed.
  static ObservationMask from_tensor(const Tensor& t);

  const Shape& shape() const noexcept { return shape_; }
  Index size() const noexcept { return omega_.size(); }
  Index count() const noexcept { return count_; }
  double ratio() const noexcept { return static_cast<double>(count_) / static_cast<double>(size()); }
  bool operator[](Index l) const { return omega_[l] != 0; }
  std::span<const std::uint8_t> omega() const noexcept { return omega_; }

  /// P_Omega(x): zeroes the unobserved entries.
  Tensor project(const Tensor& x) const;
  /// P_{Omega^C}(x): zeroes the observed entries.
  Tensor project_complement(const Tensor& x) const;
  /// Observed entries taken from `o`, the others from `fill`.
  Tensor merge(const Tensor& o, const Tensor& fill) const;
  /// P_Omega(y) == P_Omega(o), bitwise.
  bool agrees(const Tensor& y, const Tensor& o) const;
  /// 1.0 on Omega, 0.0 elsewhere.
  Tensor to_tensor() const;

 private:
  Shape shape_;
  std::vector<std::uint8_t> omega_;
  Index count_ = 0;
};

}  // namespace fctn
