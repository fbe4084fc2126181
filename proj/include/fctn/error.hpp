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

#include <stdexcept>
#include <string>

namespace fctn {

enum class Errc {
  invalid_argument = 1,  // bad shapes, ranks, parameters
  io = 2,                // file read/write or format errors
  solver_abort = 3,      // non-finite iterate or failed runtime check
};

/// Base exception for the library. The C API turns these into status codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(Errc::invalid_argument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Errc::io, what) {}
};

class SolverAbort : public Error {
 public:
  explicit SolverAbort(const std::string& what) : Error(Errc::solver_abort, what) {}
};

}  // namespace fctn
