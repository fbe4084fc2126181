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

#include "fctn/tensor.hpp"

namespace fctn {

/// Thin SVD factors. Singular values are non-increasing; each left singular
/// vector has its largest-magnitude entry positive.
struct SvdResult {
  Matrix u;
  Vector s;
  Matrix v;

  Matrix reconstruct() const;
};

/// All min(rows, cols) singular triplets.
SvdResult thin_svd(const Matrix& m);

/// Leading k singular triplets, 1 <= k <= min(rows, cols).
SvdResult truncated_svd(const Matrix& m, Index k);

/// Singular value thresholding: argmin_Z tau*||Z||_* + 0.5*||Z - m||_F^2.
/// When `nuclear_norm` is given it receives ||Z||_*.
Matrix svt(const Matrix& m, double tau, double* nuclear_norm = nullptr);

/// Elementwise sign(v) * max(|v| - tau, 0).
Tensor soft_threshold(const Tensor& x, double tau);
double soft_threshold(double v, double tau);

/// Singular values of m, non-increasing.
Vector singular_values(const Matrix& m);

/// Count of singular values above rel_tol * sigma_max (0 for a zero matrix).
Index numeric_rank(const Matrix& m, double rel_tol = 1e-9);

}  // namespace fctn
