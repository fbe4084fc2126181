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

#include "fctn/pam.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "fctn/admm.hpp"
#include "fctn/error.hpp"
#include "fctn/prox.hpp"

namespace fctn {

double pam_default_lambda(const Shape& shape) {
  if (shape.size() == 4)
    return 1.0 / std::sqrt(static_cast<double>(std::max(shape[0], shape[1]) * shape[2] * shape[3]));
  Index nbar = 0;
  for (const auto& s : enumerate_splits(shape.size())) {
    Index l = 1, r = 1;
    for (Index m : s.left) l *= shape[m];
    for (Index m : s.right) r *= shape[m];
    nbar = std::max({nbar, l, r});
  }
  return 1.0 / std::sqrt(static_cast<double>(nbar));
}

void PamConfig::validate(Index order) const {
  if (lambda && !(*lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (!(beta > 0.0) || !(rho > 0.0)) throw InvalidArgument("beta and rho must be > 0");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be > 0");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (rank_max.order() != order) throw InvalidArgument("rank_max order does not match the data");
  if (rank_init) {
    if (rank_init->order() != order) throw InvalidArgument("rank_init order does not match the data");
    if (!rank_init->all_le(rank_max)) throw InvalidArgument("rank_init must not exceed rank_max");
  }
  if (!(expand_trigger > eps)) throw InvalidArgument("expand_trigger must exceed eps");
  if (!(expand_noise_scale >= 0.0)) throw InvalidArgument("expand_noise_scale must be >= 0");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool all_finite(const Tensor& t) { return t.vec().allFinite(); }

struct Terms {
  double fit = 0.0;     // 0.5 ||X - C||^2
  double sparse = 0.0;  // lambda ||E||_1
  double couple = 0.0;  // beta/2 ||Y - X - E||^2
  double total() const { return fit + sparse + couple; }
};

Terms terms(const Tensor& composed, const Tensor& X, const Tensor& E, const Tensor& Y,
            double lambda, double beta) {
  Terms t;
  t.fit = 0.5 * (X.vec() - composed.vec()).squaredNorm();
  t.sparse = lambda * E.vec().lpNorm<1>();
  t.couple = 0.5 * beta * (Y.vec() - X.vec() - E.vec()).squaredNorm();
  return t;
}

double observed_mean(const Tensor& o, const ObservationMask& mask) {
  double mean = 0.0;
  for (Index l = 0; l < o.size(); ++l)
    if (mask[l]) mean += o[l];
  return mean / static_cast<double>(mask.count());
}

}  // namespace

PamState pam_init(const Tensor& o, const ObservationMask& mask, const FctnRank& rank, Rng& rng) {
  if (mask.shape() != o.shape()) throw InvalidArgument("mask and observation shapes differ");
  if (mask.count() == 0) throw InvalidArgument("no observed entries");
  std::vector<Tensor> g;
  for (Index k = 0; k < o.order(); ++k) {
    Tensor f(factor_shape(rank, o.shape(), k));
    const double scale = 1.0 / std::sqrt(static_cast<double>(rank.incident_product(k)));
    for (double& v : f.data()) v = scale * rng.normal();
    g.push_back(std::move(f));
  }
  PamState s{FctnFactors(std::move(g), rank, o.shape()), Tensor(), Tensor(), Tensor(), 0, {}, {}};
  s.X = mask.merge(o, Tensor(o.shape(), observed_mean(o, mask)));
  s.Y = s.X;
  s.E = Tensor::zeros(o.shape());
  return s;
}

double pam_objective(const Tensor& composed, const Tensor& X, const Tensor& E, const Tensor& Y,
                     double lambda, double beta, const ObservationMask& mask, const Tensor& o) {
  if (!mask.agrees(Y, o)) return std::numeric_limits<double>::infinity();
  return terms(composed, X, E, Y, lambda, beta).total();
}

double pam_objective(const PamState& s, double lambda, double beta, const ObservationMask& mask,
                     const Tensor& o) {
  return pam_objective(fctn_compose(s.factors), s.X, s.E, s.Y, lambda, beta, mask, o);
}

FactorUpdate update_factor(const PamState& s, Index k, double rho) {
  const FctnFactors& f = s.factors;
  const Tensor m = fctn_compose_skip(f, k);
  // Data modes come first in M, so its [data; bonds] unfolding is a reshape.
  const auto rows = static_cast<Eigen::Index>(s.X.size() / s.X.dim(k));
  const auto cols = static_cast<Eigen::Index>(m.size()) / rows;
  const Eigen::Map<const Matrix> mm(m.data().data(), rows, cols);
  const Matrix xk = mode_unfold(s.X, k);
  const Matrix fk = mode_unfold(f.factors[k], k);

  Matrix gram = mm.transpose() * mm;
  gram.diagonal().array() += rho;
  const Matrix rhs = xk * mm + rho * fk;
  const Matrix fnew = gram.llt().solve(rhs.transpose()).transpose();

  FactorUpdate u;
  u.factor = mode_fold(fnew, k, f.factors[k].shape());
  u.composed_k = fnew * mm.transpose();
  const double rn = rhs.norm();
  u.residual = (fnew * gram - rhs).norm() / (rn > 0.0 ? rn : 1.0);
  return u;
}

Tensor update_X_pam(const PamState& s, const Tensor& composed, double beta, double rho) {
  Tensor x = composed;
  x.vec() = (composed.vec() + beta * (s.Y.vec() - s.E.vec()) + rho * s.X.vec()) / (1.0 + beta + rho);
  return x;
}

Tensor update_E_pam(const PamState& s, double lambda, double beta, double rho) {
  Tensor t = s.E;
  t.vec() = (beta * (s.Y.vec() - s.X.vec()) + rho * s.E.vec()) / (beta + rho);
  return soft_threshold(t, lambda / (beta + rho));
}

Tensor update_Y_pam(const PamState& s, const ObservationMask& mask, const Tensor& o, double beta,
                    double rho) {
  Tensor half = s.Y;
  half.vec() = (beta * (s.X.vec() + s.E.vec()) + rho * s.Y.vec()) / (beta + rho);
  return mask.merge(o, half);
}

bool expand_rank(FctnFactors& f, const FctnRank& rank_max, double noise_scale, Rng& rng) {
  const Index n = f.order();
  if (rank_max.order() != n) throw InvalidArgument("rank_max order mismatch");
  FctnRank grown = f.rank;
  bool any = false;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (f.rank(i, j) < rank_max(i, j)) {
        grown.set(i, j, f.rank(i, j) + 1);
        any = true;
      }
  if (!any) return false;

  std::vector<Tensor> g;
  for (Index k = 0; k < n; ++k) {
    const Tensor& old = f.factors[k];
    const double mean = old.vec().mean();
    const double sd = std::sqrt((old.vec().array() - mean).square().mean());
    Tensor t(factor_shape(grown, f.mode_sizes, k));
    for (double& v : t.data()) v = noise_scale * sd * rng.normal();
    for (Index l = 0; l < old.size(); ++l) t.at(old.multi_index(l)) = old[l];
    g.push_back(std::move(t));
  }
  f = FctnFactors(std::move(g), grown, f.mode_sizes);
  return true;
}

PamResult solve_rnc(const Tensor& o, const ObservationMask& mask, const PamConfig& cfg,
                    const PamObserver& observer) {
  if (o.order() < 3) throw InvalidArgument("solve_rnc: tensor order must be >= 3");
  if (!all_finite(o)) throw InvalidArgument("observation contains non-finite values");
  const Index n = o.order();
  cfg.validate(n);
  FctnRank rank0 = cfg.rank_max;
  if (cfg.rank_init) {
    rank0 = *cfg.rank_init;
  } else {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) rank0.set(i, j, std::min<Index>(2, cfg.rank_max(i, j)));
  }
  Rng rng(cfg.seed, Stream::init);
  PamState s = pam_init(o, mask, rank0, rng);
  PamResult res{Tensor(), Tensor(), s.factors, 0.0, {}, false};
  res.lambda = cfg.lambda ? *cfg.lambda : pam_default_lambda(o.shape());
  const double lambda = res.lambda, beta = cfg.beta, rho = cfg.rho;
  const auto t0 = std::chrono::steady_clock::now();

  Tensor composed = fctn_compose(s.factors);
  for (Index t = 0; t < cfg.max_iters; ++t) {
    PamIteration rec;
    rec.iter = t + 1;
    double worst = -std::numeric_limits<double>::infinity();
    auto note = [&](const char* block, double f_old, double f_new, double step_sq) {
      const double slack = (f_new + 0.5 * rho * step_sq - f_old) / (1.0 + std::abs(f_old));
      worst = std::max(worst, slack);
      if (cfg.check_invariants && slack > 1e-9)
        throw SolverAbort(std::string("invariant: sufficient decrease fails at the ") + block +
                          " update of iteration " + std::to_string(t + 1));
    };

    // Factors, Gauss-Seidel. Only the fit term changes inside this loop.
    Terms cur = terms(composed, s.X, s.E, s.Y, lambda, beta);
    for (Index k = 0; k < n; ++k) {
      FactorUpdate u = update_factor(s, k, rho);
      rec.factor_residual = std::max(rec.factor_residual, u.residual);
      const double fit = 0.5 * (mode_unfold(s.X, k) - u.composed_k).squaredNorm();
      const double step = (u.factor.vec() - s.factors.factors[k].vec()).squaredNorm();
      note("factor", cur.total(), fit + cur.sparse + cur.couple, step);
      cur.fit = fit;
      s.factors.factors[k] = std::move(u.factor);
      if (k + 1 == n) composed = mode_fold(u.composed_k, k, o.shape());
    }
    if (cfg.check_invariants && rec.factor_residual > 1e-9)
      throw SolverAbort("invariant: factor normal-equation residual " +
                        std::to_string(rec.factor_residual));

    Tensor x = update_X_pam(s, composed, beta, rho);
    {
      const Terms next = terms(composed, x, s.E, s.Y, lambda, beta);
      note("X", cur.total(), next.total(), (x.vec() - s.X.vec()).squaredNorm());
      cur = next;
    }
    const double xn = s.X.vec().norm();
    const double dx = (x.vec() - s.X.vec()).norm();
    rec.rel_change = xn > 0.0 ? dx / xn : (dx > 0.0 ? 1.0 : 0.0);
    s.X = std::move(x);

    Tensor e = update_E_pam(s, lambda, beta, rho);
    {
      const Terms next = terms(composed, s.X, e, s.Y, lambda, beta);
      note("E", cur.total(), next.total(), (e.vec() - s.E.vec()).squaredNorm());
      cur = next;
    }
    s.E = std::move(e);

    Tensor y = update_Y_pam(s, mask, o, beta, rho);
    {
      const Terms next = terms(composed, s.X, s.E, y, lambda, beta);
      note("Y", cur.total(), next.total(), (y.vec() - s.Y.vec()).squaredNorm());
      cur = next;
    }
    s.Y = std::move(y);
    rec.y_on_mask = mask.agrees(s.Y, o);
    if (cfg.check_invariants && !rec.y_on_mask)
      throw SolverAbort("invariant: P_Omega(Y) != P_Omega(O)");

    if (!all_finite(s.X) || !all_finite(s.E) || !all_finite(composed))
      throw SolverAbort("solve_rnc: non-finite iterate at iteration " + std::to_string(t + 1));

    rec.objective = cur.total();
    rec.gap_y = (s.Y.vec() - s.X.vec() - s.E.vec()).norm();
    rec.decrease_slack = worst;
    rec.rank = s.factors.rank;
    ++s.iter;
    s.objective_history.push_back(rec.objective);
    s.rel_change_history.push_back(rec.rel_change);

    const bool done = rec.rel_change <= cfg.eps;
    if (!done && rec.rel_change <= cfg.expand_trigger &&
        expand_rank(s.factors, cfg.rank_max, cfg.expand_noise_scale, rng)) {
      rec.expanded = true;
      composed = fctn_compose(s.factors);
    }
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    if (observer) observer(res.history.back());
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.X = std::move(s.X);
  res.E = std::move(s.E);
  res.factors = std::move(s.factors);
  return res;
}

}  // namespace fctn
