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

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/QR>

#include "fctn/error.hpp"
#include "fctn/harness.hpp"
#include "fctn/pam.hpp"
#include "oracles.hpp"

namespace fctn {
namespace {

ObservationMask random_mask(const Shape& shape, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<std::uint8_t> om(shape_product(shape));
  for (auto& v : om) v = keep(rng) ? 1 : 0;
  om[0] = 1;
  return ObservationMask(shape, std::move(om));
}

PamState random_state(const Shape& shape, const FctnRank& rank, std::mt19937_64& rng) {
  PamState s{oracle::random_factors(shape, rank, rng, -1.0, 1.0), oracle::random_tensor(shape, rng),
             oracle::random_tensor(shape, rng), oracle::random_tensor(shape, rng), 0, {}, {}};
  return s;
}

// 0.5||X - C(F)||^2 + rho/2 ||F_k - F_k^t||^2 with C from the multi-sum oracle.
double factor_objective(const PamState& s, Index k, const Tensor& fk, double rho) {
  FctnFactors f = s.factors;
  f.factors[k] = fk;
  const Tensor c = oracle::fctn_multisum(f);
  return 0.5 * (s.X.vec() - c.vec()).squaredNorm() +
         0.5 * rho * (fk.vec() - s.factors.factors[k].vec()).squaredNorm();
}

TEST(PamDefaults, Lambda) {
  EXPECT_NEAR(pam_default_lambda({20, 20, 20, 20}), 1.0 / std::sqrt(8000.0), 1e-15);
  EXPECT_NEAR(pam_default_lambda({30, 20, 10, 5}), 1.0 / std::sqrt(1500.0), 1e-15);
  // Order 3: largest side over the splits {0}|{1,2}, {1}|{0,2}, {2}|{0,1}.
  EXPECT_NEAR(pam_default_lambda({2, 3, 4}), 1.0 / std::sqrt(12.0), 1e-15);
}

TEST(PamConfig, Validation) {
  PamConfig c;
  c.rank_max = FctnRank(3, 2);
  EXPECT_NO_THROW(c.validate(3));
  EXPECT_THROW(c.validate(4), InvalidArgument);
  PamConfig bad = c;
  bad.rho = 0.0;
  EXPECT_THROW(bad.validate(3), InvalidArgument);
  bad = c;
  bad.rank_init = FctnRank(3, 3);
  EXPECT_THROW(bad.validate(3), InvalidArgument);
  bad = c;
  bad.expand_trigger = bad.eps;
  EXPECT_THROW(bad.validate(3), InvalidArgument);
  bad = c;
  bad.lambda = -1.0;
  EXPECT_THROW(bad.validate(3), InvalidArgument);
}

TEST(PamObjective, ZeroAtConsistentState) {
  std::mt19937_64 rng(1);
  const Shape shape{3, 4, 2};
  PamState s{oracle::random_factors(shape, FctnRank(3, 2), rng), Tensor(), Tensor(), Tensor(), 0,
             {}, {}};
  s.X = fctn_compose(s.factors);
  s.E = Tensor::zeros(shape);
  s.Y = s.X;
  const auto mask = random_mask(shape, 0.5, rng);
  EXPECT_NEAR(pam_objective(s, 0.3, 1.0, mask, s.Y), 0.0, 1e-24);
}

TEST(PamObjective, MaskViolationIsInfinite) {
  std::mt19937_64 rng(2);
  const Shape shape{3, 3, 3};
  PamState s = random_state(shape, FctnRank(3, 2), rng);
  const auto mask = random_mask(shape, 0.5, rng);
  Tensor o = s.Y;
  o[0] += 1.0;  // entry 0 is always observed
  EXPECT_TRUE(std::isinf(pam_objective(s, 0.1, 1.0, mask, o)));
}

TEST(PamObjective, TermByTermProperty) {
  std::mt19937_64 rng(3);
  for (int c = 0; c < 100; ++c) {
    const Shape shape{2 + rng() % 3, 2 + rng() % 2, 2 + rng() % 3};
    PamState s = random_state(shape, FctnRank(3, 1 + rng() % 2), rng);
    const auto mask = random_mask(shape, 0.6, rng);
    const double lambda = 0.01 + 0.5 * std::uniform_real_distribution<>(0, 1)(rng);
    const double beta = 0.1 + 2.0 * std::uniform_real_distribution<>(0, 1)(rng);
    const Tensor c0 = oracle::fctn_multisum(s.factors);
    double fit = 0.0, l1 = 0.0, couple = 0.0;
    for (Index l = 0; l < s.X.size(); ++l) {
      fit += 0.5 * (s.X[l] - c0[l]) * (s.X[l] - c0[l]);
      l1 += std::abs(s.E[l]);
      const double g = s.Y[l] - s.X[l] - s.E[l];
      couple += 0.5 * beta * g * g;
    }
    const double expect = fit + lambda * l1 + couple;
    EXPECT_NEAR(pam_objective(s, lambda, beta, mask, s.Y), expect, 1e-12 * (1.0 + expect));
  }
}

TEST(UpdateFactor, ProximalDominance) {
  std::mt19937_64 rng(4);
  PamState s = random_state({4, 3, 3}, FctnRank(3, 2), rng);
  for (Index k = 0; k < 3; ++k) {
    const FactorUpdate u = update_factor(s, k, 1e12);
    EXPECT_LE(oracle::rel_diff(u.factor, s.factors.factors[k]), 1e-6);
  }
}

TEST(UpdateFactor, FixedPointAtExactComposition) {
  std::mt19937_64 rng(5);
  PamState s = random_state({3, 4, 3, 2}, FctnRank(4, 2), rng);
  s.X = fctn_compose(s.factors);
  for (Index k = 0; k < 4; ++k) {
    const FactorUpdate u = update_factor(s, k, 0.1);
    EXPECT_LE(oracle::rel_diff(u.factor, s.factors.factors[k]), 1e-10) << "k=" << k;
  }
}

TEST(UpdateFactor, MatchesDenseNormalEquations) {
  std::mt19937_64 rng(6);
  for (int c = 0; c < 20; ++c) {
    const Shape shape{2 + rng() % 3, 2 + rng() % 2, 2 + rng() % 2};
    PamState s = random_state(shape, FctnRank(3, 1 + rng() % 2), rng);
    const Index k = rng() % 3;
    const double rho = 0.05 + std::uniform_real_distribution<>(0, 1)(rng);
    // Columns of the linear map F_k -> C(F) from unit factors.
    const Tensor& fk = s.factors.factors[k];
    Matrix a(s.X.size(), fk.size());
    for (Index j = 0; j < fk.size(); ++j) {
      FctnFactors f = s.factors;
      f.factors[k] = Tensor::zeros(fk.shape());
      f.factors[k][j] = 1.0;
      a.col(j) = oracle::fctn_multisum(f).vec();
    }
    Matrix lhs = a.transpose() * a;
    lhs.diagonal().array() += rho;
    const Vector rhs = a.transpose() * s.X.vec() + rho * fk.vec();
    const Vector expect = lhs.colPivHouseholderQr().solve(rhs);
    const FactorUpdate u = update_factor(s, k, rho);
    EXPECT_LE((u.factor.vec() - expect).norm(), 1e-10 * (1.0 + expect.norm()));
    EXPECT_LE(u.residual, 1e-12);
    // composed_k is the mode-k unfolding of the new composition.
    FctnFactors f = s.factors;
    f.factors[k] = u.factor;
    const Matrix ck = mode_unfold(oracle::fctn_multisum(f), k);
    EXPECT_LE((u.composed_k - ck).norm(), 1e-10 * (1.0 + ck.norm()));
  }
}

TEST(UpdateFactor, MinimizesBlockObjectiveProperty) {
  std::mt19937_64 rng(7);
  for (int c = 0; c < 100; ++c) {
    const Shape shape{2 + rng() % 2, 2 + rng() % 3, 2 + rng() % 2};
    PamState s = random_state(shape, FctnRank(3, 1 + rng() % 2), rng);
    const Index k = rng() % 3;
    const double rho = 0.01 + std::uniform_real_distribution<>(0, 1)(rng);
    const FactorUpdate u = update_factor(s, k, rho);
    const double best = factor_objective(s, k, u.factor, rho);
    const Tensor d = oracle::random_tensor(u.factor.shape(), rng);
    const Tensor probe = u.factor + 1e-2 * d;
    EXPECT_GE(factor_objective(s, k, probe, rho), best - 1e-12 * (1.0 + best));
  }
}

TEST(UpdateXPam, Cases) {
  std::mt19937_64 rng(8);
  PamState s = random_state({3, 3, 3}, FctnRank(3, 2), rng);
  const Tensor c = oracle::random_tensor({3, 3, 3}, rng);
  EXPECT_EQ(update_X_pam(s, c, 0.0, 0.0), c);

  const Tensor t = oracle::random_tensor({3, 3, 3}, rng);
  PamState fixed = s;
  fixed.X = t;
  fixed.Y = t;
  fixed.E = Tensor::zeros({3, 3, 3});
  EXPECT_LE(oracle::rel_diff(update_X_pam(fixed, t, 0.7, 0.3), t), 1e-15);

  for (int n = 0; n < 100; ++n) {
    PamState r = random_state({2, 3, 2}, FctnRank(3, 1), rng);
    const Tensor cr = oracle::random_tensor({2, 3, 2}, rng);
    const double beta = 0.1 + rng() % 5, rho = 0.01 * (1 + rng() % 50);
    const Tensor x = update_X_pam(r, cr, beta, rho);
    for (Index l = 0; l < x.size(); ++l) {
      const double e = (cr[l] + beta * (r.Y[l] - r.E[l]) + rho * r.X[l]) / (1.0 + beta + rho);
      ASSERT_NEAR(x[l], e, 1e-14);
    }
  }
}

TEST(UpdateEPam, Cases) {
  std::mt19937_64 rng(9);
  PamState s = random_state({3, 3, 3}, FctnRank(3, 2), rng);
  EXPECT_EQ(update_E_pam(s, 1e9, 1.0, 0.1), Tensor::zeros({3, 3, 3}));
  EXPECT_LE(oracle::rel_diff(update_E_pam(s, 0.0, 1.0, 0.0), s.Y - s.X), 1e-15);

  for (int n = 0; n < 100; ++n) {
    PamState r = random_state({2, 2, 3}, FctnRank(3, 1), rng);
    const double lambda = 0.05 * (rng() % 10), beta = 0.5 + rng() % 3, rho = 0.1 * (1 + rng() % 5);
    const Tensor e = update_E_pam(r, lambda, beta, rho);
    for (Index l = 0; l < e.size(); ++l) {
      const double v = (beta * (r.Y[l] - r.X[l]) + rho * r.E[l]) / (beta + rho);
      const double tau = lambda / (beta + rho);
      const double expect = v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
      ASSERT_NEAR(e[l], expect, 1e-14);
    }
  }
}

TEST(UpdateYPam, Cases) {
  std::mt19937_64 rng(10);
  const Shape shape{3, 4, 2};
  PamState s = random_state(shape, FctnRank(3, 2), rng);
  const Tensor o = oracle::random_tensor(shape, rng);
  EXPECT_EQ(update_Y_pam(s, ObservationMask::full(shape), o, 1.0, 0.1), o);

  const auto mask = random_mask(shape, 0.5, rng);
  const Tensor lim = update_Y_pam(s, mask, o, 1e12, 1.0);
  for (Index l = 0; l < lim.size(); ++l) {
    if (mask[l]) EXPECT_EQ(lim[l], o[l]);
    else EXPECT_NEAR(lim[l], s.X[l] + s.E[l], 1e-10);
  }

  for (int n = 0; n < 100; ++n) {
    PamState r = random_state(shape, FctnRank(3, 1), rng);
    const auto m = random_mask(shape, 0.3 + 0.1 * (n % 6), rng);
    const double beta = 0.5 + rng() % 3, rho = 0.1 * (1 + rng() % 5);
    const Tensor y = update_Y_pam(r, m, o, beta, rho);
    ASSERT_TRUE(m.agrees(y, o));
    for (Index l = 0; l < y.size(); ++l)
      if (!m[l])
        ASSERT_NEAR(y[l], (beta * (r.X[l] + r.E[l]) + rho * r.Y[l]) / (beta + rho), 1e-14);
  }
}

TEST(ExpandRank, NoOpAtMax) {
  std::mt19937_64 rng(11);
  FctnFactors f = oracle::random_factors({3, 3, 3}, FctnRank(3, 2), rng);
  const FctnFactors before = f;
  Rng r(1, Stream::init);
  EXPECT_FALSE(expand_rank(f, FctnRank(3, 2), 1e-2, r));
  EXPECT_EQ(f.rank, before.rank);
  for (Index k = 0; k < 3; ++k) EXPECT_EQ(f.factors[k], before.factors[k]);
}

TEST(ExpandRank, ZeroNoiseKeepsComposition) {
  std::mt19937_64 rng(12);
  FctnFactors f = oracle::random_factors({3, 4, 2, 3}, FctnRank(4, 1), rng);
  const Tensor before = fctn_compose(f);
  Rng r(2, Stream::init);
  ASSERT_TRUE(expand_rank(f, FctnRank(4, 3), 0.0, r));
  EXPECT_EQ(f.rank, FctnRank(4, 2));
  EXPECT_LE(oracle::rel_diff(fctn_compose(f), before), 1e-12);
}

TEST(ExpandRank, ShapesAndPreservedEntries) {
  std::mt19937_64 rng(13);
  const Shape sizes{4, 3, 5};
  FctnFactors f = oracle::random_factors(sizes, FctnRank(3, 1), rng);
  const FctnFactors before = f;
  FctnRank cap(3, 2);
  cap.set(0, 2, 1);  // one pair already at its maximum
  Rng r(3, Stream::init);
  ASSERT_TRUE(expand_rank(f, cap, 1e-2, r));
  EXPECT_EQ(f.factors[0].shape(), (Shape{4, 2, 1}));
  EXPECT_EQ(f.factors[1].shape(), (Shape{2, 3, 2}));
  EXPECT_EQ(f.factors[2].shape(), (Shape{1, 2, 5}));
  for (Index k = 0; k < 3; ++k) {
    const Tensor& old = before.factors[k];
    for (Index l = 0; l < old.size(); ++l)
      EXPECT_EQ(f.factors[k].at(old.multi_index(l)), old[l]);
  }
  EXPECT_NO_THROW(f.validate());
}

TEST(PamInit, ShapesScaleAndDeterminism) {
  std::mt19937_64 rng(14);
  const Shape shape{4, 4, 4};
  const Tensor o = oracle::random_tensor(shape, rng, 0.0, 1.0);
  const auto mask = random_mask(shape, 0.7, rng);
  Rng r1(5, Stream::init), r2(5, Stream::init);
  const PamState a = pam_init(o, mask, FctnRank(3, 2), r1);
  const PamState b = pam_init(o, mask, FctnRank(3, 2), r2);
  for (Index k = 0; k < 3; ++k) EXPECT_EQ(a.factors.factors[k], b.factors.factors[k]);
  EXPECT_TRUE(mask.agrees(a.Y, o));
  EXPECT_EQ(a.E, Tensor::zeros(shape));
  double mean = 0.0;
  for (Index l = 0; l < o.size(); ++l)
    if (mask[l]) mean += o[l];
  mean /= static_cast<double>(mask.count());
  for (Index l = 0; l < o.size(); ++l)
    if (!mask[l]) EXPECT_NEAR(a.X[l], mean, 1e-15);
}

struct Problem {
  Tensor x0, o;
  ObservationMask mask;
};

Problem small_problem(Index n, Index r, double rho, double s, std::uint64_t seed) {
  Synthetic syn = gen_synthetic({n, n, n, n}, FctnRank(4, r), seed);
  Corruption c = apply_sap(syn.x0, s, seed);
  ObservationMask m = sample_mask(syn.x0.shape(), rho, seed);
  Tensor o = m.project(c.corrupted);
  return {std::move(syn.x0), std::move(o), std::move(m)};
}

TEST(SolveRnc, SingleIteration) {
  const Problem p = small_problem(5, 2, 0.9, 0.05, 1);
  PamConfig cfg;
  cfg.rank_max = FctnRank(4, 2);
  cfg.max_iters = 1;
  const PamResult r = solve_rnc(p.o, p.mask, cfg);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.history[0].iter, 1u);
  EXPECT_TRUE(r.history[0].y_on_mask);
}

TEST(SolveRnc, TestModeInvariantsHoldEveryIteration) {
  const Problem p = small_problem(6, 2, 0.9, 0.05, 2);
  PamConfig cfg;
  cfg.rank_max = FctnRank(4, 2);
  cfg.rank_init = FctnRank(4, 1);
  cfg.max_iters = 100;
  cfg.check_invariants = true;
  cfg.seed = 2;
  std::optional<PamResult> res;
  ASSERT_NO_THROW(res.emplace(solve_rnc(p.o, p.mask, cfg)));
  const PamResult& r = *res;
  bool expanded = false;
  for (const auto& it : r.history) {
    EXPECT_LE(it.decrease_slack, 1e-9);
    EXPECT_LE(it.factor_residual, 1e-9);
    EXPECT_TRUE(it.y_on_mask);
    EXPECT_TRUE(std::isfinite(it.objective));
    expanded = expanded || it.expanded;
  }
  EXPECT_TRUE(expanded);
  EXPECT_EQ(r.factors.rank, FctnRank(4, 2));
  EXPECT_TRUE(p.mask.agrees(p.mask.merge(p.o, r.X + r.E), p.o));
}

TEST(SolveRnc, Deterministic) {
  const Problem p = small_problem(5, 2, 0.9, 0.05, 3);
  PamConfig cfg;
  cfg.rank_max = FctnRank(4, 2);
  cfg.max_iters = 20;
  cfg.seed = 9;
  const PamResult a = solve_rnc(p.o, p.mask, cfg);
  const PamResult b = solve_rnc(p.o, p.mask, cfg);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(a.E, b.E);
}

// Exact-rank, noiseless, fully observed data started at the true rank.
// Stalls near 2e-2 from the random start; the 1e-4 target is kept as stated.
TEST(SolveRnc, NoiselessFullObservationRecovers) {
  const Problem p = small_problem(8, 2, 1.0, 0.0, 4);
  PamConfig cfg;
  cfg.rank_max = FctnRank(4, 2);
  cfg.rank_init = FctnRank(4, 2);
  cfg.max_iters = 200;
  cfg.seed = 4;
  const PamResult r = solve_rnc(p.o, p.mask, cfg);
  EXPECT_LE(rel_error(r.X, p.x0), 1e-4);
}

TEST(SolveRnc, RejectsInvalidInput) {
  const Problem p = small_problem(4, 1, 1.0, 0.0, 5);
  PamConfig cfg;
  cfg.rank_max = FctnRank(3, 2);
  EXPECT_THROW(solve_rnc(p.o, p.mask, cfg), InvalidArgument);
  cfg.rank_max = FctnRank(4, 2);
  Tensor bad = p.o;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_rnc(bad, p.mask, cfg), InvalidArgument);
  EXPECT_THROW(solve_rnc(Tensor::zeros({4, 4}), ObservationMask::full({4, 4}), cfg),
               InvalidArgument);
}

TEST(SolveRnc, OverflowAborts) {
  const Problem p = small_problem(4, 1, 1.0, 0.0, 6);
  PamConfig cfg;
  cfg.rank_max = FctnRank(4, 1);
  cfg.max_iters = 5;
  Tensor huge = p.o;
  for (double& v : huge.data()) v *= 1e300;
  EXPECT_THROW(solve_rnc(huge, p.mask, cfg), SolverAbort);
}

}  // namespace
}  // namespace fctn
