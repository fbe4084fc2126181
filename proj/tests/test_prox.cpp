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

#include <random>

#include "fctn/error.hpp"
#include "fctn/prox.hpp"
#include "oracles.hpp"

namespace fctn {
namespace {

Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

double gram_deviation(const Matrix& u) {
  return (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

TEST(TruncatedSvd, Diagonal) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 3, 2, 1;
  const SvdResult r = truncated_svd(m, 2);
  ASSERT_EQ(r.s.size(), 2);
  EXPECT_NEAR(r.s[0], 3.0, 1e-14);
  EXPECT_NEAR(r.s[1], 2.0, 1e-14);
}

TEST(TruncatedSvd, FullRankIsExact) {
  std::mt19937_64 rng(1);
  const Matrix m = random_matrix(6, 4, rng);
  const SvdResult r = truncated_svd(m, 4);
  EXPECT_LE((r.reconstruct() - m).norm(), 1e-10 * m.norm());
  EXPECT_LE(gram_deviation(r.u), 1e-10);
  EXPECT_LE(gram_deviation(r.v), 1e-10);
}

TEST(TruncatedSvd, TailResidual) {
  std::mt19937_64 rng(2);
  for (int c = 0; c < 20; ++c) {
    const Matrix m = random_matrix(6, 5, rng);
    const SvdResult r = truncated_svd(m, 3);
    const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
    const double tail = s.tail(2).norm();
    EXPECT_NEAR((r.reconstruct() - m).norm(), tail, 1e-9 * tail);
  }
}

TEST(TruncatedSvd, RangeAndDeterminism) {
  std::mt19937_64 rng(3);
  const Matrix m = random_matrix(4, 3, rng);
  EXPECT_THROW(truncated_svd(m, 0), InvalidArgument);
  EXPECT_THROW(truncated_svd(m, 4), InvalidArgument);
  const SvdResult a = truncated_svd(m, 2), b = truncated_svd(m, 2);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
  for (Eigen::Index j = 0; j < a.u.cols(); ++j) {
    Eigen::Index imax;
    a.u.col(j).cwiseAbs().maxCoeff(&imax);
    EXPECT_GT(a.u(imax, j), 0.0);
  }
}

TEST(Svt, TrivialCases) {
  std::mt19937_64 rng(4);
  const Matrix m = random_matrix(5, 4, rng);
  EXPECT_LE((svt(m, 0.0) - m).norm(), 1e-10 * m.norm());
  const double smax = singular_values(m)[0];
  EXPECT_EQ(svt(m, smax).norm(), 0.0);
  EXPECT_EQ(svt(m, 2 * smax).norm(), 0.0);
  EXPECT_THROW(svt(m, -1e-3), InvalidArgument);
}

TEST(Svt, MatchesOracleAndProbes) {
  std::mt19937_64 rng(5);
  const Matrix m = random_matrix(5, 4, rng);
  const Matrix z = svt(m, 0.3);
  EXPECT_LE((z - oracle::svt_jacobi(m, 0.3)).norm(), 1e-12);
  const double fz = oracle::svt_objective(z, m, 0.3);
  EXPECT_LE(fz, oracle::svt_objective(m, m, 0.3));
  for (int p = 0; p < 10; ++p) {
    const Matrix probe = z + 0.1 * random_matrix(5, 4, rng);
    EXPECT_LE(fz, oracle::svt_objective(probe, m, 0.3));
  }
}

TEST(Svt, ProxOptimalityProperty) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> tau_d(0.0, 2.0);
  for (int c = 0; c < 20; ++c) {
    const Matrix m = random_matrix(3 + c % 4, 2 + c % 5, rng);
    const double tau = tau_d(rng);
    const Matrix z = svt(m, tau);
    const double fz = oracle::svt_objective(z, m, tau);
    const double radius = 0.1 * m.norm();
    for (int p = 0; p < 100; ++p) {
      Matrix d = random_matrix(m.rows(), m.cols(), rng);
      d *= radius * std::uniform_real_distribution<double>(0.0, 1.0)(rng) / d.norm();
      ASSERT_LE(fz, oracle::svt_objective(z + d, m, tau) + 1e-12) << "case " << c;
    }
  }
}

// Sizes past 16 columns take the divide-and-conquer path of the library SVD,
// while the oracle always uses one-sided Jacobi.
TEST(Svt, MatchesJacobiOracleProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> tau_d(0.0, 1.0);
  for (int c = 0; c < 100; ++c) {
    const Matrix m = random_matrix(1 + rng() % 40, 1 + rng() % 40, rng);
    const double tau = tau_d(rng);
    const Matrix want = oracle::svt_jacobi(m, tau);
    ASSERT_LE((svt(m, tau) - want).norm(), 1e-10 * std::max(1.0, want.norm())) << "case " << c;
  }
}

TEST(SoftThreshold, Scalars) {
  EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-2.0, 0.5), -1.5);
  EXPECT_EQ(soft_threshold(2.0, 0.5), 1.5);
  EXPECT_THROW(soft_threshold(1.0, -0.1), InvalidArgument);
}

TEST(SoftThreshold, ZeroTauIsIdentity) {
  std::mt19937_64 rng(7);
  const Tensor x = oracle::random_tensor({3, 4, 2}, rng);
  EXPECT_EQ(soft_threshold(x, 0.0), x);
  EXPECT_THROW(soft_threshold(x, -1.0), InvalidArgument);
}

TEST(SoftThreshold, ScalarProxOptimality) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0), t(0.0, 2.0);
  for (int c = 0; c < 1000; ++c) {
    const double v = u(rng), tau = t(rng);
    const double z = soft_threshold(v, tau);
    auto f = [&](double w) { return tau * std::abs(w) + 0.5 * (w - v) * (w - v); };
    // Minimizer of a 1-D convex piecewise quadratic: compare with both
    // smooth stationary points and the kink.
    const double cands[] = {0.0, v - tau, v + tau};
    double best = f(cands[0]);
    for (double w : cands) best = std::min(best, f(w));
    ASSERT_LE(f(z), best + 1e-15) << v << " " << tau;
  }
}

TEST(NumericRank, Basics) {
  EXPECT_EQ(numeric_rank(Matrix::Zero(3, 3)), 0u);
  EXPECT_EQ(numeric_rank(Matrix::Ones(4, 5)), 1u);
  std::mt19937_64 rng(9);
  const Matrix a = random_matrix(6, 2, rng), b = random_matrix(2, 7, rng);
  EXPECT_EQ(numeric_rank(a * b), 2u);
}

}  // namespace
}  // namespace fctn
