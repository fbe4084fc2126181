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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fctn/error.hpp"
#include "fctn/network.hpp"
#include "fctn/prox.hpp"

namespace fctn {
namespace {

// A subtree of the bisection: its data modes (a contiguous ascending range)
// followed by bond axes. Bond (inner, outer) ties a mode of this node to a
// mode outside it.
struct Node {
  Tensor t;
  std::vector<Index> modes;
  std::vector<std::pair<Index, Index>> bonds;
};

struct Decomposer {
  const FctnRank& rank;
  const SvdDecomposeOptions& opts;
  std::vector<Tensor> leaves;
  std::vector<Vector> sigma;
  std::vector<double> truncation_error;

  // Axis positions of `group` modes, each followed by its own bonds.
  std::vector<Index> grouped_axes(const Node& node, const std::vector<Index>& group) const {
    std::vector<Index> axes;
    for (Index m : group) {
      const auto pos = std::find(node.modes.begin(), node.modes.end(), m) - node.modes.begin();
      axes.push_back(static_cast<Index>(pos));
      for (Index b = 0; b < node.bonds.size(); ++b)
        if (node.bonds[b].first == m) axes.push_back(node.modes.size() + b);
    }
    return axes;
  }

  Node make_child(const Node& parent, const std::vector<Index>& axes, const Matrix& basis,
                  const std::vector<std::pair<Index, Index>>& new_bonds) const {
    Shape shape;
    std::vector<std::pair<Index, Index>> names;  // (inner, outer); outer == npos for data
    constexpr Index npos = static_cast<Index>(-1);
    for (Index a : axes) {
      shape.push_back(parent.t.dim(a));
      if (a < parent.modes.size())
        names.emplace_back(parent.modes[a], npos);
      else
        names.push_back(parent.bonds[a - parent.modes.size()]);
    }
    for (const auto& b : new_bonds) {
      shape.push_back(rank(b.first, b.second));
      names.push_back(b);
    }
    Tensor t(shape, std::vector<double>(basis.data(), basis.data() + basis.size()));

    // Reorder to data modes first, bonds after, keeping relative order.
    std::vector<Index> order(names.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_partition(order.begin(), order.end(),
                          [&](Index o) { return names[o].second == npos; });
    Node child;
    for (Index o : order) {
      if (names[o].second == npos)
        child.modes.push_back(names[o].first);
      else
        child.bonds.push_back(names[o]);
    }
    child.t = permute(t, ModePermutation(std::move(order)));
    return child;
  }

  void recurse(const Node& node) {
    if (node.modes.size() == 1) {
      finish_leaf(node);
      return;
    }
    const Index d = node.modes.size() / 2;
    const std::vector<Index> left(node.modes.begin(), node.modes.begin() + static_cast<std::ptrdiff_t>(d));
    const std::vector<Index> right(node.modes.begin() + static_cast<std::ptrdiff_t>(d), node.modes.end());

    std::vector<Index> left_axes = grouped_axes(node, left);
    std::vector<Index> right_axes = grouped_axes(node, right);
    std::vector<Index> order = left_axes;
    order.insert(order.end(), right_axes.begin(), right_axes.end());
    const UnfoldingSpec spec(ModePermutation(order), left_axes.size());
    const Matrix m = unfold(node.t, spec);

    // Column index of the split enumerates (i in left, j in right) pairs with
    // i varying fastest.
    std::vector<std::pair<Index, Index>> bonds_lr, bonds_rl;
    for (Index j : right)
      for (Index i : left) {
        bonds_lr.emplace_back(i, j);
        bonds_rl.emplace_back(j, i);
      }
    const Index keep = rank.cut_product(left, right);
    const Index cap = static_cast<Index>(std::min(m.rows(), m.cols()));
    if (keep > cap)
      throw InvalidArgument("svd_fctn_decompose: bisection of modes needs rank " +
                            std::to_string(keep) + " but the " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) +
                            " unfolding admits at most " + std::to_string(cap) +
                            " (input is not subcritical for this rank)");

    const SvdResult full = thin_svd(m);
    const auto k = static_cast<Eigen::Index>(keep);
    sigma.push_back(full.s.head(k));
    truncation_error.push_back(full.s.tail(full.s.size() - k).norm());

    Matrix u = full.u.leftCols(k);
    Matrix v = full.v.leftCols(k);
    if (opts.absorb_singular_values) {
      const Vector root = full.s.head(k).cwiseSqrt();
      u = u * root.asDiagonal();
      v = v * root.asDiagonal();
    }
    const Node lchild = make_child(node, left_axes, u, bonds_lr);
    const Node rchild = make_child(node, right_axes, v, bonds_rl);
    recurse(lchild);
    recurse(rchild);
  }

  void finish_leaf(const Node& node) {
    const Index k = node.modes.front();
    const Index n = rank.order();
    std::vector<Index> order(n);
    for (Index j = 0; j < n; ++j) {
      if (j == k) {
        order[j] = 0;
        continue;
      }
      const auto it = std::find_if(node.bonds.begin(), node.bonds.end(),
                                   [&](const auto& b) { return b.second == j; });
      if (it == node.bonds.end()) throw std::logic_error("leaf is missing a bond");
      order[j] = 1 + static_cast<Index>(it - node.bonds.begin());
    }
    leaves[k] = permute(node.t, ModePermutation(std::move(order)));
  }
};

}  // namespace

SvdDecomposition svd_fctn_decompose(const Tensor& x, const FctnRank& rank,
                                    const SvdDecomposeOptions& opts) {
  const Index n = x.order();
  if (n < 3) throw InvalidArgument("svd_fctn_decompose: order must be >= 3");
  if (rank.order() != n) throw InvalidArgument("svd_fctn_decompose: rank order mismatch");

  Decomposer dec{rank, opts, std::vector<Tensor>(n), {}, {}};
  Node root;
  root.t = x;
  root.modes.resize(n);
  std::iota(root.modes.begin(), root.modes.end(), Index{0});
  dec.recurse(root);
  return {FctnFactors(std::move(dec.leaves), rank, x.shape()), std::move(dec.sigma),
          std::move(dec.truncation_error)};
}

}  // namespace fctn
