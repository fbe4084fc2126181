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

#include "fctn/network.hpp"

#include <algorithm>
#include <numeric>

#include "fctn/error.hpp"
#include "fctn/prox.hpp"

namespace fctn {

FctnRank::FctnRank(Index order, Index uniform) : n_(order), r_(order * order, uniform) {
  if (order < 3) throw InvalidArgument("FCTN rank needs order >= 3");
  if (uniform < 1) throw InvalidArgument("FCTN ranks must be >= 1");
  for (Index k = 0; k < n_; ++k) r_[k * n_ + k] = 0;
}

FctnRank FctnRank::from_matrix(const std::vector<std::vector<Index>>& full) {
  const Index n = full.size();
  FctnRank r(n, 1);
  for (Index i = 0; i < n; ++i) {
    if (full[i].size() != n) throw InvalidArgument("rank matrix must be square");
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      if (full[j][i] != 0 && full[j][i] != full[i][j])
        throw InvalidArgument("rank matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      r.set(i, j, full[i][j]);
    }
  return r;
}

Index FctnRank::operator()(Index i, Index j) const {
  if (i >= n_ || j >= n_ || i == j) throw InvalidArgument("invalid rank pair");
  return r_[i * n_ + j];
}

void FctnRank::set(Index i, Index j, Index value) {
  if (i >= n_ || j >= n_ || i == j) throw InvalidArgument("invalid rank pair");
  if (value < 1) throw InvalidArgument("FCTN ranks must be >= 1");
  r_[i * n_ + j] = r_[j * n_ + i] = value;
}

Index FctnRank::incident_product(Index k) const {
  Index p = 1;
  for (Index j = 0; j < n_; ++j)
    if (j != k) p *= (*this)(k, j);
  return p;
}

Index FctnRank::cut_product(const std::vector<Index>& rows, const std::vector<Index>& cols) const {
  Index p = 1;
  for (Index i : rows)
    for (Index j : cols) p *= (*this)(i, j);
  return p;
}

std::vector<std::vector<Index>> FctnRank::matrix(const Shape& diagonal) const {
  std::vector<std::vector<Index>> m(n_, std::vector<Index>(n_, 0));
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      m[i][j] = i == j ? (diagonal.empty() ? 0 : diagonal.at(i)) : (*this)(i, j);
  return m;
}

bool FctnRank::all_le(const FctnRank& other) const {
  if (other.n_ != n_) throw InvalidArgument("rank order mismatch");
  for (Index i = 0; i < n_; ++i)
    for (Index j = i + 1; j < n_; ++j)
      if ((*this)(i, j) > other(i, j)) return false;
  return true;
}

Shape factor_shape(const FctnRank& rank, const Shape& mode_sizes, Index k) {
  if (mode_sizes.size() != rank.order()) throw InvalidArgument("mode sizes vs rank order");
  Shape s(rank.order());
  for (Index j = 0; j < rank.order(); ++j) s[j] = j == k ? mode_sizes[k] : rank(j, k);
  return s;
}

FctnFactors::FctnFactors(std::vector<Tensor> f, FctnRank r, Shape sizes)
    : factors(std::move(f)), rank(std::move(r)), mode_sizes(std::move(sizes)) {
  validate();
}

void FctnFactors::validate() const {
  const Index n = mode_sizes.size();
  if (rank.order() != n) throw InvalidArgument("rank order does not match mode count");
  if (factors.size() != n)
    throw InvalidArgument("expected " + std::to_string(n) + " factors, got " +
                          std::to_string(factors.size()));
  for (Index k = 0; k < n; ++k)
    if (factors[k].shape() != factor_shape(rank, mode_sizes, k))
      throw InvalidArgument("factor " + std::to_string(k) + " has inconsistent shape");
}

namespace {

// An intermediate network: data modes (ascending) then open bonds, each bond
// joining an absorbed mode `inner` to a not-yet-absorbed mode `outer`.
struct Bond {
  Index inner;
  Index outer;
  auto key() const { return std::pair(outer, inner); }
};

struct Partial {
  Tensor t;
  std::vector<Index> data;
  std::vector<Bond> bonds;
};

struct AxisName {
  bool is_data;
  Index a;  // data mode, or bond inner
  Index b;  // bond outer
};

// Permutes `t` (axes named by `names`) into data-ascending then bonds by
// (outer, inner).
Partial canonicalize(Tensor t, const std::vector<AxisName>& names) {
  std::vector<Index> order(names.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    const auto& p = names[x];
    const auto& q = names[y];
    if (p.is_data != q.is_data) return p.is_data;
    if (p.is_data) return p.a < q.a;
    return std::pair(p.b, p.a) < std::pair(q.b, q.a);
  });
  Partial out;
  for (Index o : order) {
    if (names[o].is_data)
      out.data.push_back(names[o].a);
    else
      out.bonds.push_back({names[o].a, names[o].b});
  }
  out.t = permute(t, ModePermutation(std::move(order)));
  return out;
}

Partial start(const FctnFactors& f, Index m) {
  std::vector<AxisName> names;
  for (Index j = 0; j < f.order(); ++j)
    names.push_back(j == m ? AxisName{true, m, 0} : AxisName{false, m, j});
  return canonicalize(f.factors[m], names);
}

Partial absorb(const Partial& p, const FctnFactors& f, Index m) {
  std::vector<Index> modes_p, modes_f;
  std::vector<bool> absorbed(f.order(), false);
  for (Index d : p.data) absorbed[d] = true;
  std::vector<AxisName> names;
  for (Index d : p.data) names.push_back({true, d, 0});
  for (Index b = 0; b < p.bonds.size(); ++b) {
    if (p.bonds[b].outer == m) {
      modes_p.push_back(p.data.size() + b);
      modes_f.push_back(p.bonds[b].inner);
    } else {
      names.push_back({false, p.bonds[b].inner, p.bonds[b].outer});
    }
  }
  for (Index j = 0; j < f.order(); ++j) {
    if (absorbed[j]) continue;
    names.push_back(j == m ? AxisName{true, m, 0} : AxisName{false, m, j});
  }
  Tensor t = contract(p.t, f.factors[m], modes_p, modes_f);
  return canonicalize(std::move(t), names);
}

Partial compose_all_but(const FctnFactors& f, Index skip) {
  f.validate();
  const Index n = f.order();
  Index first = skip == 0 ? 1 : 0;
  Partial p = start(f, first);
  for (Index m = first + 1; m < n; ++m) {
    if (m == skip) continue;
    p = absorb(p, f, m);
  }
  return p;
}

}  // namespace

Tensor fctn_compose(const FctnFactors& f) {
  return compose_all_but(f, f.order()).t;
}

Tensor fctn_compose_skip(const FctnFactors& f, Index k) {
  if (k >= f.order()) throw InvalidArgument("skip mode out of range");
  return compose_all_but(f, k).t;
}

Matrix mode_unfold(const Tensor& x, Index k) {
  if (k >= x.order()) throw InvalidArgument("mode out of range");
  std::vector<Index> order{k};
  for (Index j = 0; j < x.order(); ++j)
    if (j != k) order.push_back(j);
  return unfold(x, UnfoldingSpec(ModePermutation(std::move(order)), 1));
}

Tensor mode_fold(const Matrix& m, Index k, const Shape& shape) {
  if (k >= shape.size()) throw InvalidArgument("mode out of range");
  std::vector<Index> order{k};
  for (Index j = 0; j < shape.size(); ++j)
    if (j != k) order.push_back(j);
  return fold(m, UnfoldingSpec(ModePermutation(std::move(order)), 1), shape);
}

RankBound rank_bound_check(const Tensor& x, const FctnRank& rank, const UnfoldingSpec& spec,
                           double rel_tol) {
  if (rank.order() != x.order()) throw InvalidArgument("rank order does not match tensor");
  const auto& n = spec.perm.order();
  std::vector<Index> rows(n.begin(), n.begin() + static_cast<std::ptrdiff_t>(spec.split));
  std::vector<Index> cols(n.begin() + static_cast<std::ptrdiff_t>(spec.split), n.end());
  RankBound r;
  r.numeric_rank = numeric_rank(unfold(x, spec), rel_tol);
  r.bound = rank.cut_product(rows, cols);
  r.ok = r.numeric_rank <= r.bound;
  return r;
}

std::vector<std::vector<Index>> admissible_subsets(Index order, Index i) {
  std::vector<Index> delta;
  for (Index j = 0; j < order; ++j)
    if (j != i) delta.push_back(j);
  const Index max_size = order / 2;
  std::vector<std::vector<Index>> out;
  const Index m = delta.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<Index> s;
    for (Index b = 0; b < m; ++b)
      if (mask & (std::uint64_t{1} << b)) s.push_back(delta[b]);
    if (s.size() <= max_size) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

IncoherenceReport incoherence_mu(const FctnFactors& f, Index i,
                                 const std::vector<std::vector<Index>>& subsets) {
  f.validate();
  const Index n = f.order();
  if (i >= n) throw InvalidArgument("incoherence: mode out of range");
  const Tensor& g = f.factors[i];
  IncoherenceReport rep;
  rep.mode = i;
  for (const auto& xi_in : subsets) {
    std::vector<Index> xi = xi_in;
    std::sort(xi.begin(), xi.end());
    if (std::adjacent_find(xi.begin(), xi.end()) != xi.end())
      throw InvalidArgument("incoherence: repeated mode in subset");
    if (xi.empty() || xi.size() > n / 2)
      throw InvalidArgument("incoherence: subset size must be in [1, floor(N/2)]");
    for (Index j : xi)
      if (j >= n || j == i) throw InvalidArgument("incoherence: subset must exclude mode i");
    // Rows: bond axes in xi. Columns: data axis i, then the remaining bonds.
    std::vector<Index> order = xi;
    order.push_back(i);
    for (Index j = 0; j < n; ++j)
      if (j != i && !std::binary_search(xi.begin(), xi.end(), j)) order.push_back(j);
    const Matrix m = unfold(g, UnfoldingSpec(ModePermutation(order), xi.size()));
    SubsetIncoherence s;
    s.max_sq_column_norm = m.colwise().squaredNorm().maxCoeff();
    s.rows = static_cast<Index>(m.rows());
    s.cols = static_cast<Index>(m.cols());
    s.mu = s.max_sq_column_norm * static_cast<double>(s.cols) / static_cast<double>(s.rows);
    rep.mu = std::max(rep.mu, s.mu);
    rep.per_subset.emplace(std::move(xi), s);
  }
  return rep;
}

}  // namespace fctn
