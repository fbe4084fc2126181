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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "fctn/error.hpp"
#include "fctn/tensor.hpp"
#include "fctn/tensor_io.hpp"
#include "oracles.hpp"

namespace fctn {
namespace {

Shape random_shape(std::mt19937_64& rng, Index order, Index max_dim = 4) {
  std::uniform_int_distribution<Index> d(1, max_dim);
  Shape s(order);
  for (auto& v : s) v = d(rng);
  return s;
}

std::vector<Index> random_perm(std::mt19937_64& rng, Index n) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), Index{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

TEST(Tensor, LinearIndexRoundTrip) {
  std::mt19937_64 rng(1);
  const Tensor x = oracle::random_tensor({3, 2, 4}, rng);
  for (Index l = 0; l < x.size(); ++l) EXPECT_EQ(x.linear_index(x.multi_index(l)), l);
  EXPECT_EQ(x.linear_index(std::vector<Index>{1, 0, 0}), 1u);
  EXPECT_EQ(x.linear_index(std::vector<Index>{0, 1, 0}), 3u);
  EXPECT_EQ(x.linear_index(std::vector<Index>{0, 0, 1}), 6u);
}

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(Tensor(Shape{}), InvalidArgument);
  EXPECT_THROW(Tensor(Shape{2, 0}), InvalidArgument);
  EXPECT_THROW(Tensor(Shape{2, 2}, std::vector<double>(3)), InvalidArgument);
}

TEST(Permute, IdentityAndTranspose) {
  std::mt19937_64 rng(2);
  const Tensor x = oracle::random_tensor({2, 3}, rng);
  EXPECT_EQ(permute(x, ModePermutation({0, 1})), x);
  const Tensor t = permute(x, ModePermutation({1, 0}));
  ASSERT_EQ(t.shape(), (Shape{3, 2}));
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) EXPECT_EQ(t.at({j, i}), x.at({i, j}));
}

TEST(Permute, RejectsInvalidPermutations) {
  const Tensor x(Shape{2, 3, 4});
  EXPECT_THROW(ModePermutation({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(ModePermutation({0, 3, 1}), InvalidArgument);
  EXPECT_THROW(permute(x, ModePermutation({1, 0})), InvalidArgument);
  EXPECT_THROW(ipermute(x, ModePermutation({1, 0})), InvalidArgument);
}

TEST(Permute, ElementwiseDefinition) {
  std::mt19937_64 rng(3);
  const Tensor x = oracle::random_tensor({2, 3, 4}, rng);
  const ModePermutation n({2, 0, 1});
  const Tensor p = permute(x, n);
  ASSERT_EQ(p.shape(), (Shape{4, 2, 3}));
  oracle::for_each_index(p.shape(), [&](const std::vector<Index>& j) {
    std::vector<Index> src(3);
    for (Index a = 0; a < 3; ++a) src[n[a]] = j[a];
    EXPECT_EQ(p.at(j), x.at(src));
  });
  EXPECT_EQ(ipermute(p, n), x);
}

TEST(Permute, IpermuteMatchesInversePermutation) {
  std::mt19937_64 rng(4);
  const Tensor x = oracle::random_tensor({3, 2, 2}, rng);
  const ModePermutation n({1, 2, 0});
  // inverse of [1,2,0] is [2,0,1]
  EXPECT_EQ(ipermute(x, n), permute(x, ModePermutation({2, 0, 1})));
}

TEST(Permute, RoundTripProperty) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 200; ++c) {
    const Index order = 2 + static_cast<Index>(c % 4);
    const Tensor x = oracle::random_tensor(random_shape(rng, order), rng);
    const ModePermutation n(random_perm(rng, order));
    ASSERT_EQ(ipermute(permute(x, n), n), x) << "case " << c;
  }
}

TEST(Unfold, MatrixAndOnes) {
  std::mt19937_64 rng(6);
  const Tensor x = oracle::random_tensor({2, 3}, rng);
  const Matrix m = unfold(x, UnfoldingSpec(ModePermutation({0, 1}), 1));
  ASSERT_EQ(m.rows(), 2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), x.at({i, j}));

  const Tensor ones = Tensor::ones({2, 2, 2});
  const Matrix mo = unfold(ones, UnfoldingSpec(ModePermutation({2, 0, 1}), 2));
  EXPECT_EQ(mo.rows(), 4);
  EXPECT_EQ(mo.cols(), 2);
  EXPECT_TRUE((mo.array() == 1.0).all());
}

TEST(Unfold, IndexArithmetic) {
  // perm [2,3,1] (1-based), d=2: row = i2 + 3*i3, col = i1 (0-based here).
  std::mt19937_64 rng(7);
  const Tensor x = oracle::random_tensor({2, 3, 4}, rng);
  const Matrix m = unfold(x, UnfoldingSpec(ModePermutation({1, 2, 0}), 2));
  ASSERT_EQ(m.rows(), 12);
  ASSERT_EQ(m.cols(), 2);
  oracle::for_each_index(x.shape(), [&](const std::vector<Index>& i) {
    EXPECT_EQ(m(static_cast<Eigen::Index>(i[1] + 3 * i[2]), static_cast<Eigen::Index>(i[0])),
              x.at(i));
  });
}

TEST(Unfold, InvalidSplit) {
  EXPECT_THROW(UnfoldingSpec(ModePermutation({0, 1, 2}), 0), InvalidArgument);
  EXPECT_THROW(UnfoldingSpec(ModePermutation({0, 1, 2}), 3), InvalidArgument);
}

TEST(Fold, EdgeCases) {
  const Tensor s = fold(Matrix::Constant(1, 1, 3.5), UnfoldingSpec(ModePermutation({0, 1}), 1),
                        Shape{1, 1});
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 3.5);
  const Tensor z = fold(Matrix::Zero(6, 4), UnfoldingSpec(ModePermutation({1, 0, 2}), 2),
                        Shape{2, 3, 4});
  EXPECT_EQ(z, Tensor::zeros({2, 3, 4}));
  EXPECT_THROW(fold(Matrix::Zero(5, 4), UnfoldingSpec(ModePermutation({1, 0, 2}), 2),
                    Shape{2, 3, 4}),
               InvalidArgument);
}

TEST(Fold, RoundTripProperty) {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 150; ++c) {
    const Index order = 3 + static_cast<Index>(c % 3);
    const Tensor x = oracle::random_tensor(random_shape(rng, order), rng);
    const auto perm = random_perm(rng, order);
    std::uniform_int_distribution<Index> ds(1, order - 1);
    const UnfoldingSpec spec(ModePermutation(perm), ds(rng));
    const Matrix m = unfold(x, spec);
    ASSERT_EQ(m, oracle::unfold_loops(x, perm, spec.split));
    ASSERT_EQ(fold(m, spec, x.shape()), x) << "case " << c;
  }
}

TEST(Contract, MatrixProduct) {
  std::mt19937_64 rng(9);
  const Tensor x = oracle::random_tensor({2, 3}, rng);
  const Tensor y = oracle::random_tensor({3, 2}, rng);
  const Tensor z = contract(x, y, std::vector<Index>{1}, std::vector<Index>{0});
  const Matrix expect = Eigen::Map<const Matrix>(x.data().data(), 2, 3) *
                        Eigen::Map<const Matrix>(y.data().data(), 3, 2);
  ASSERT_EQ(z.shape(), (Shape{2, 2}));
  EXPECT_LE((Eigen::Map<const Matrix>(z.data().data(), 2, 2) - expect).norm(), 1e-14);
}

TEST(Contract, DimensionMismatch) {
  const Tensor x(Shape{2, 3}), y(Shape{4, 2});
  EXPECT_THROW(contract(x, y, std::vector<Index>{1}, std::vector<Index>{0}), InvalidArgument);
  EXPECT_THROW(contract(x, y, std::vector<Index>{1}, std::vector<Index>{}), InvalidArgument);
}

TEST(Contract, TwoModesAgainstLoops) {
  std::mt19937_64 rng(10);
  const Tensor x = oracle::random_tensor({2, 3, 2}, rng);
  const Tensor y = oracle::random_tensor({3, 2, 4}, rng);
  const Tensor z = contract(x, y, std::vector<Index>{1, 2}, std::vector<Index>{0, 1});
  ASSERT_EQ(z.shape(), (Shape{2, 4}));
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (Index a = 0; a < 3; ++a)
        for (Index b = 0; b < 2; ++b) acc += x.at({i, a, b}) * y.at({a, b, j});
      EXPECT_NEAR(z.at({i, j}), acc, 1e-13);
    }
}

TEST(Contract, PropertyAgainstLoopsAndMatrixIdentity) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 120) {
    const Index nx = 1 + rng() % 4, ny = 1 + rng() % 4;
    const Index d = 1 + rng() % std::min(nx, ny);
    Shape sx = random_shape(rng, nx, 3), sy = random_shape(rng, ny, 3);
    auto px = random_perm(rng, nx), py = random_perm(rng, ny);
    std::vector<Index> mx(px.begin(), px.begin() + static_cast<std::ptrdiff_t>(d));
    std::vector<Index> my(py.begin(), py.begin() + static_cast<std::ptrdiff_t>(d));
    for (Index i = 0; i < d; ++i) sy[my[i]] = sx[mx[i]];
    if (shape_product(sx) * shape_product(sy) > 256 * 256) continue;
    const Tensor x = oracle::random_tensor(sx, rng);
    const Tensor y = oracle::random_tensor(sy, rng);
    const Tensor z = contract(x, y, mx, my);
    const Tensor ref = oracle::contract_loops(x, y, mx, my);
    ASSERT_EQ(z.shape(), ref.shape());
    ASSERT_LE(oracle::rel_diff(z, ref), 1e-12) << "case " << checked;

    // Unfold-multiply identity built from the oracle unfolding.
    std::vector<Index> rx, ry(my);
    for (Index a = 0; a < nx; ++a)
      if (std::find(mx.begin(), mx.end(), a) == mx.end()) rx.push_back(a);
    const Index free_x = rx.size();
    rx.insert(rx.end(), mx.begin(), mx.end());
    for (Index a = 0; a < ny; ++a)
      if (std::find(my.begin(), my.end(), a) == my.end()) ry.push_back(a);
    const Matrix prod = oracle::unfold_loops(x, rx, free_x) * oracle::unfold_loops(y, ry, d);
    const Eigen::Map<const Matrix> zm(z.data().data(), prod.rows(), prod.cols());
    ASSERT_LE((zm - prod).norm(), 1e-12 * std::max(1.0, prod.norm()));
    ++checked;
  }
}

TEST(Norms, Basics) {
  const Norms z = norms(Tensor::zeros({2, 3}));
  EXPECT_EQ(z.frobenius, 0.0);
  EXPECT_EQ(z.l1, 0.0);
  EXPECT_EQ(z.max_abs, 0.0);
  const Norms o = norms(Tensor::ones({2, 2, 2}));
  EXPECT_DOUBLE_EQ(o.l1, 8.0);
  EXPECT_DOUBLE_EQ(o.frobenius, std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(o.max_abs, 1.0);

  std::mt19937_64 rng(12);
  const Tensor x = oracle::random_tensor({3, 4, 5}, rng);
  const double f = norms(x).frobenius;
  EXPECT_NEAR(inner(x, x), f * f, 1e-12 * f * f);
  EXPECT_THROW(inner(x, Tensor(Shape{3, 4})), InvalidArgument);
}

TEST(Fct1, RoundTripAndLayout) {
  std::mt19937_64 rng(13);
  const Tensor x = oracle::random_tensor({2, 3, 4}, rng);
  std::stringstream ss;
  write_fct1(ss, x);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 8 + 3 * 8 + 24 * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "FCT1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 3);
  EXPECT_EQ(bytes[6], 0);
  EXPECT_EQ(bytes[7], 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);  // little-endian u64
  EXPECT_EQ(read_fct1(ss), x);
}

TEST(Fct1, RejectsCorruptInput) {
  const Tensor x = Tensor::ones({2, 2});
  std::stringstream ok;
  write_fct1(ok, x);
  const std::string good = ok.str();

  auto read = [](std::string s) {
    std::stringstream in(s);
    return read_fct1(in);
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(read(bad_magic), IoError);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_THROW(read(bad_version), IoError);
  EXPECT_THROW(read(good.substr(0, good.size() - 3)), IoError);
  EXPECT_THROW(read(good + "extra"), IoError);
}

}  // namespace
}  // namespace fctn
