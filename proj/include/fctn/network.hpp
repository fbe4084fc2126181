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

#include <map>
#include <utility>
#include <vector>

#include "fctn/tensor.hpp"

namespace fctn {

/// Symmetric matrix of bond dimensions R(i, j), i != j, for an order-N
/// fully-connected tensor network. Modes are 0-based.
class FctnRank {
 public:
  FctnRank(Index order, Index uniform);
  /// Reads the strict upper triangle of `full` (N x N) and checks symmetry of
  /// the lower triangle when it is nonzero. The diagonal is ignored.
  static FctnRank from_matrix(const std::vector<std::vector<Index>>& full);

  Index order() const noexcept { return n_; }
  Index operator()(Index i, Index j) const;
  void set(Index i, Index j, Index value);

  /// Product of R(k, j) over j != k.
  Index incident_product(Index k) const;
  /// Product of R(i, j) over i in rows, j in cols.
  Index cut_product(const std::vector<Index>& rows, const std::vector<Index>& cols) const;
  /// N x N matrix with `diagonal[k]` on the diagonal (zeros if empty).
  std::vector<std::vector<Index>> matrix(const Shape& diagonal = {}) const;

  /// Elementwise comparison over all pairs.
  bool all_le(const FctnRank& other) const;
  friend bool operator==(const FctnRank& a, const FctnRank& b) {
    return a.n_ == b.n_ && a.r_ == b.r_;
  }

 private:
  Index n_;
  std::vector<Index> r_;  // row-major N x N, symmetric
};

/// Shape of factor k: axis k carries I_k, axis j != k carries R(j, k).
Shape factor_shape(const FctnRank& rank, const Shape& mode_sizes, Index k);

struct FctnFactors {
  std::vector<Tensor> factors;
  FctnRank rank;
  Shape mode_sizes;

  FctnFactors(std::vector<Tensor> f, FctnRank r, Shape sizes);
  Index order() const noexcept { return mode_sizes.size(); }
  /// Throws InvalidArgument unless every factor matches factor_shape().
  void validate() const;
};

/// X = FCTN(G_1..G_N) by sequential pairwise contraction over shared bonds.
Tensor fctn_compose(const FctnFactors& f);

/// Network of every factor except k. Axes: the N-1 data modes j != k
/// (ascending) followed by the N-1 bonds R(j, k), j != k (ascending).
Tensor fctn_compose_skip(const FctnFactors& f, Index k);

/// Mode-k unfolding: rows I_k, columns the remaining modes ascending.
Matrix mode_unfold(const Tensor& x, Index k);
Tensor mode_fold(const Matrix& m, Index k, const Shape& shape);

struct SvdDecomposeOptions {
  /// Splits each bisection's singular values as sqrt into both children. When
  /// false the factors are the orthonormal-basis cores and the product no
  /// longer reproduces the input.
  bool absorb_singular_values = true;
  double rank_tol = 1e-9;
};

struct SvdDecomposition {
  FctnFactors factors;
  /// Singular values kept at each bisection, in processing order (depth first,
  /// left branch before right).
  std::vector<Vector> sigma;
  /// Frobenius norms of the discarded parts at each bisection.
  std::vector<double> truncation_error;
};

/// Constructive SVD-based FCTN decomposition by recursive balanced bisection.
SvdDecomposition svd_fctn_decompose(const Tensor& x, const FctnRank& rank,
                                    const SvdDecomposeOptions& opts = {});

struct RankBound {
  Index numeric_rank = 0;
  Index bound = 0;
  bool ok = true;
};

/// Numeric rank of the unfolding vs the bound prod R(n_i, n_j), i < d <= j.
RankBound rank_bound_check(const Tensor& x, const FctnRank& rank, const UnfoldingSpec& spec,
                           double rel_tol = 1e-9);

struct SubsetIncoherence {
  double max_sq_column_norm = 0.0;
  Index rows = 1;  // product of R(i, k), k in xi
  Index cols = 1;  // I_i times product of R(i, k), k outside xi
  double mu = 0.0;  // max_sq_column_norm * cols / rows
};

struct IncoherenceReport {
  Index mode = 0;
  double mu = 0.0;
  std::map<std::vector<Index>, SubsetIncoherence> per_subset;
};

/// Smallest mu_i making the column-norm incoherence bound hold for factor i
/// over the given subsets of the bond axes. Each subset lists mode indices
/// j != i, at most floor(N/2) of them.
IncoherenceReport incoherence_mu(const FctnFactors& f, Index i,
                                 const std::vector<std::vector<Index>>& subsets);

/// Every subset of {0..N-1} \ {i} with 1 <= size <= floor(N/2).
std::vector<std::vector<Index>> admissible_subsets(Index order, Index i);

}  // namespace fctn
