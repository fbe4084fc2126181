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

#include "fctn/prox.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "fctn/error.hpp"

namespace fctn {
namespace {

void fix_signs(SvdResult& r) {
  for (Eigen::Index c = 0; c < r.u.cols(); ++c) {
    Eigen::Index arg = 0;
    r.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (r.u(arg, c) < 0.0) {
      r.u.col(c) *= -1.0;
      r.v.col(c) *= -1.0;
    }
  }
}

}  // namespace

Matrix SvdResult::reconstruct() const { return u * s.asDiagonal() * v.transpose(); }

SvdResult thin_svd(const Matrix& m) {
  if (m.size() == 0) throw InvalidArgument("svd of an empty matrix");
  if (!m.allFinite()) throw SolverAbort("svd input contains non-finite values");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult r{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  fix_signs(r);
  return r;
}

SvdResult truncated_svd(const Matrix& m, Index k) {
  const Index kmax = static_cast<Index>(std::min(m.rows(), m.cols()));
  if (k < 1 || k > kmax)
    throw InvalidArgument("truncated_svd: rank " + std::to_string(k) + " outside [1, " +
                          std::to_string(kmax) + "]");
  SvdResult full = thin_svd(m);
  const auto kk = static_cast<Eigen::Index>(k);
  return {full.u.leftCols(kk), full.s.head(kk), full.v.leftCols(kk)};
}

Matrix svt(const Matrix& m, double tau, double* nuclear_norm) {
  if (!(tau >= 0.0)) throw InvalidArgument("svt: threshold must be >= 0");
  const SvdResult r = thin_svd(m);
  Eigen::Index keep = 0;
  while (keep < r.s.size() && r.s(keep) > tau) ++keep;
  if (nuclear_norm) *nuclear_norm = 0.0;
  if (keep == 0) return Matrix::Zero(m.rows(), m.cols());
  const Vector shrunk = (r.s.head(keep).array() - tau).matrix();
  if (nuclear_norm) *nuclear_norm = shrunk.sum();
  return r.u.leftCols(keep) * shrunk.asDiagonal() * r.v.leftCols(keep).transpose();
}

namespace {

double shrink(double v, double tau) {
  const double a = std::abs(v) - tau;
  return a > 0.0 ? std::copysign(a, v) : 0.0;
}

}  // namespace

double soft_threshold(double v, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("soft_threshold: threshold must be >= 0");
  return shrink(v, tau);
}

Tensor soft_threshold(const Tensor& x, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("soft_threshold: threshold must be >= 0");
  Tensor out = x;
  if (tau == 0.0) return out;
  for (double& v : out.data()) v = shrink(v, tau);
  return out;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) throw InvalidArgument("svd of an empty matrix");
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

Index numeric_rank(const Matrix& m, double rel_tol) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rel_tol * s(0);
  Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

}  // namespace fctn
