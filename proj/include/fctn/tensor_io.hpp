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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fctn/tensor.hpp"

namespace fctn {

// FCT1 binary layout (all integers and floats little-endian):
//   offset 0  : "FCT1"
//   offset 4  : u8 version (= 1)
//   offset 5  : u8 ndim
//   offset 6  : two zero bytes of padding
//   offset 8  : ndim x u64 dims
//   then      : prod(dims) x f64 values, column-major
inline constexpr std::uint8_t kFct1Version = 1;

void write_fct1(std::ostream& os, const Tensor& x);
Tensor read_fct1(std::istream& is);

void save_tensor(const std::filesystem::path& path, const Tensor& x);
Tensor load_tensor(const std::filesystem::path& path);

}  // namespace fctn
