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

#include "fctn/mask.hpp"

#include <cstring>

#include "fctn/error.hpp"

namespace fctn {

ObservationMask::ObservationMask(Shape shape, std::vector<std::uint8_t> omega)
    : shape_(std::move(shape)), omega_(std::move(omega)) {
  if (shape_.empty() || shape_product(shape_) != omega_.size())
    throw InvalidArgument("mask size does not match its shape");
  for (auto& b : omega_) {
    b = b != 0;
    count_ += b;
  }
}

ObservationMask ObservationMask::full(const Shape& shape) {
  return ObservationMask(shape, std::vector<std::uint8_t>(shape_product(shape), 1));
}

ObservationMask ObservationMask::from_tensor(const Tensor& t) {
  std::vector<std::uint8_t> w(t.size());
  for (Index l = 0; l < t.size(); ++l) w[l] = t[l] != 0.0;
  return ObservationMask(t.shape(), std::move(w));
}

Tensor ObservationMask::project(const Tensor& x) const {
  if (x.shape() != shape_) throw InvalidArgument("mask shape mismatch");
  Tensor out(shape_);
  for (Index l = 0; l < size(); ++l)
    if (omega_[l]) out.data()[l] = x[l];
  return out;
}

Tensor ObservationMask::project_complement(const Tensor& x) const {
  if (x.shape() != shape_) throw InvalidArgument("mask shape mismatch");
  Tensor out(shape_);
  for (Index l = 0; l < size(); ++l)
    if (!omega_[l]) out.data()[l] = x[l];
  return out;
}

Tensor ObservationMask::merge(const Tensor& o, const Tensor& fill) const {
  if (o.shape() != shape_ || fill.shape() != shape_) throw InvalidArgument("mask shape mismatch");
  Tensor out = fill;
  for (Index l = 0; l < size(); ++l)
    if (omega_[l]) out.data()[l] = o[l];
  return out;
}

bool ObservationMask::agrees(const Tensor& y, const Tensor& o) const {
  if (y.shape() != shape_ || o.shape() != shape_) return false;
  for (Index l = 0; l < size(); ++l)
    if (omega_[l] && std::memcmp(&y.data()[l], &o.data()[l], sizeof(double)) != 0) return false;
  return true;
}

Tensor ObservationMask::to_tensor() const {
  Tensor out(shape_);
  for (Index l = 0; l < size(); ++l) out.data()[l] = omega_[l];
  return out;
}

}  // namespace fctn
