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

#include "fctn/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "fctn/error.hpp"

namespace fctn {
namespace {

constexpr std::array<char, 4> kMagic = {'F', 'C', 'T', '1'};

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <typename T>
T get_le(std::istream& is) {
  std::uint64_t bits = 0;
  if (!is.read(reinterpret_cast<char*>(&bits), 8)) throw IoError("FCT1: truncated stream");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_fct1(std::ostream& os, const Tensor& x) {
  if (x.order() > 255) throw InvalidArgument("FCT1 supports at most 255 modes");
  os.write(kMagic.data(), 4);
  const char head[4] = {static_cast<char>(kFct1Version), static_cast<char>(x.order()), 0, 0};
  os.write(head, 4);
  for (Index d : x.shape()) put_le<std::uint64_t>(os, d);
  for (double v : x.data()) put_le<double>(os, v);
  if (!os) throw IoError("FCT1: write failed");
}

Tensor read_fct1(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4)) throw IoError("FCT1: truncated header");
  if (magic != kMagic) throw IoError("FCT1: bad magic");
  unsigned char head[4];
  if (!is.read(reinterpret_cast<char*>(head), 4)) throw IoError("FCT1: truncated header");
  if (head[0] != kFct1Version)
    throw IoError("FCT1: unsupported version " + std::to_string(head[0]));
  const Index ndim = head[1];
  if (ndim == 0) throw IoError("FCT1: ndim must be >= 1");
  Shape shape(ndim);
  Index count = 1;
  for (auto& d : shape) {
    d = get_le<std::uint64_t>(is);
    if (d == 0) throw IoError("FCT1: zero dimension");
    count *= d;
  }
  std::vector<double> data(count);
  for (auto& v : data) v = get_le<double>(is);
  if (is.peek() != std::char_traits<char>::eof())
    throw IoError("FCT1: trailing bytes after payload");
  return Tensor(std::move(shape), std::move(data));
}

void save_tensor(const std::filesystem::path& path, const Tensor& x) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_fct1(os, x);
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_fct1(is);
}

}  // namespace fctn
