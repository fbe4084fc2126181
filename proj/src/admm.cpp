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

#include "fctn/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "fctn/error.hpp"
#include "fctn/prox.hpp"

namespace fctn {

UnfoldingSpec ModeSplit::spec() const {
  std::vector<Index> perm = left;
  perm.insert(perm.end(), right.begin(), right.end());
  return UnfoldingSpec(ModePermutation(std::move(perm)), left.size());
}

std::vector<ModeSplit> enumerate_splits(Index order) {
  if (order < 3) throw InvalidArgument("enumerate_splits: order must be >= 3");
  const Index h = order / 2;
  std::vector<ModeSplit> out;
  // Walk h-subsets in lexicographic order via a selection bitmap.
  std::vector<bool> pick(order, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(h), true);
  do {
    ModeSplit s;
    for (Index j = 0; j < order; ++j) (pick[j] ? s.left : s.right).push_back(j);
    if (order % 2 == 1 || s.left.front() == 0) out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  for (auto& s : out) s.weight = 1.0 / static_cast<double>(out.size());
  return out;
}

namespace {

void check_splits(const std::vector<ModeSplit>& splits, Index order) {
  if (splits.empty()) throw InvalidArgument("no mode splits");
  double total = 0.0;
  for (const auto& s : splits) {
    if (s.left.size() + s.right.size() != order)
      throw InvalidArgument("mode split does not cover the tensor order");
    if (!(s.weight >= 0.0)) throw InvalidArgument("mode split weight must be >= 0");
    total += s.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mode split weights must sum to 1");
}

Index side_product(const Shape& shape, const std::vector<Index>& modes) {
  Index p = 1;
  for (Index m : modes) p *= shape.at(m);
  return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool all_finite(const Tensor& t) { return t.vec().allFinite(); }

}  // namespace

double fctn_nuclear_norm(const Tensor& x, const std::vector<ModeSplit>& splits) {
  check_splits(splits, x.order());
  double total = 0.0;
  for (const auto& s : splits) total += s.weight * singular_values(unfold(x, s.spec())).sum();
  return total;
}

double lambda_hat(double rho_obs, const std::vector<ModeSplit>& splits, const Shape& shape) {
  if (!(rho_obs > 0.0 && rho_obs <= 1.0)) throw InvalidArgument("sampling ratio must be in (0, 1]");
  check_splits(splits, shape.size());
  double total = 0.0;
  for (const auto& s : splits) {
    const double nbar = static_cast<double>(std::max(side_product(shape, s.left),
                                                     side_product(shape, s.right)));
    total += s.weight / std::sqrt(rho_obs * nbar);
  }
  return total;
}

void AdmmConfig::validate(Index n_splits) const {
  if (lambda && !(*lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (!mu.empty() && mu.size() != n_splits)
    throw InvalidArgument("mu needs one entry per mode split (" + std::to_string(n_splits) + ")");
  for (double m : mu)
    if (!(m > 0.0)) throw InvalidArgument("mu must be > 0");
  if (!(gamma > 0.0) || !(sigma > 0.0)) throw InvalidArgument("gamma and sigma must be > 0");
  if (!(delta > 0.0 && delta <= (1.0 + std::sqrt(5.0)) / 2.0))
    throw InvalidArgument("delta must be in (0, (1+sqrt 5)/2]");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be > 0");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(penalty_growth >= 1.0)) throw InvalidArgument("penalty_growth must be >= 1");
  if (!(penalty_cap > 0.0)) throw InvalidArgument("penalty_cap must be > 0");
}

AdmmState admm_init(const Tensor& o, const ObservationMask& mask,
                    const std::vector<ModeSplit>& splits, const AdmmConfig& cfg) {
  if (mask.shape() != o.shape()) throw InvalidArgument("mask and observation shapes differ");
  if (mask.count() == 0) throw InvalidArgument("no observed entries");
  double mean = 0.0;
  for (Index l = 0; l < o.size(); ++l)
    if (mask[l]) mean += o[l];
  mean /= static_cast<double>(mask.count());

  AdmmState s;
  s.X = mask.merge(o, Tensor(o.shape(), mean));
  s.E = Tensor::zeros(o.shape());
  s.S = s.E;
  s.Y = s.X;
  s.P = s.E;
  s.Q = s.E;
  s.L.assign(splits.size(), s.X);
  s.Z.assign(splits.size(), s.E);
  s.mu = cfg.mu.empty() ? std::vector<double>(splits.size(), kAdmmDefaultPenalty) : cfg.mu;
  s.gamma = cfg.gamma;
  s.sigma = cfg.sigma;
  return s;
}

Tensor update_L(const AdmmState& s, const std::vector<ModeSplit>& splits, Index k,
                double* nuclear_norm) {
  const ModeSplit& sp = splits.at(k);
  const double mu = s.mu.at(k);
  Tensor target = s.X;
  target.vec() -= s.Z[k].vec() / mu;
  const UnfoldingSpec spec = sp.spec();
  return fold(svt(unfold(target, spec), sp.weight / mu, nuclear_norm), spec, s.X.shape());
}

Tensor update_S(const AdmmState& s, double lambda) {
  Tensor target = s.E;
  target.vec() -= s.Q.vec() / s.sigma;
  return soft_threshold(target, lambda / s.sigma);
}

Tensor update_Y(const AdmmState& s, const ObservationMask& mask, const Tensor& o) {
  Tensor fill = s.X;
  fill.vec() += s.E.vec() - s.P.vec() / s.gamma;
  return mask.merge(o, fill);
}

namespace {

struct Rhs {
  Tensor M, N;
  double mu_sum = 0.0;
};

Rhs xe_rhs(const AdmmState& s) {
  Rhs r;
  r.M = s.Y;
  r.M.vec() = s.gamma * s.Y.vec() + s.P.vec();
  r.N = r.M;
  for (Index k = 0; k < s.L.size(); ++k) {
    r.M.vec() += s.mu[k] * s.L[k].vec() + s.Z[k].vec();
    r.mu_sum += s.mu[k];
  }
  r.N.vec() += s.sigma * s.S.vec() + s.Q.vec();
  return r;
}

}  // namespace

XeUpdate update_XE(const AdmmState& s) {
  const Rhs r = xe_rhs(s);
  const double g = s.gamma, a = r.mu_sum + g, c = g + s.sigma;
  const double den = g * g - a * c;
  XeUpdate u{r.M, r.N};
  u.X.vec() = (g * r.N.vec() - c * r.M.vec()) / den;
  u.E.vec() = (g * r.M.vec() - a * r.N.vec()) / den;
  return u;
}

XeResidual xe_stationarity(const AdmmState& s, const Tensor& X, const Tensor& E) {
  const Rhs r = xe_rhs(s);
  const double g = s.gamma;
  const double scale = r.M.vec().norm() + r.N.vec().norm();
  const double denom = scale > 0.0 ? scale : 1.0;
  XeResidual out;
  out.x_eq = ((r.mu_sum + g) * X.vec() + g * E.vec() - r.M.vec()).norm() / denom;
  out.e_eq = (g * X.vec() + (g + s.sigma) * E.vec() - r.N.vec()).norm() / denom;
  return out;
}

void update_multipliers(AdmmState& s, double delta) {
  for (Index k = 0; k < s.Z.size(); ++k)
    s.Z[k].vec() += delta * s.mu[k] * (s.L[k].vec() - s.X.vec());
  s.P.vec() += delta * s.gamma * (s.Y.vec() - s.X.vec() - s.E.vec());
  s.Q.vec() += delta * s.sigma * (s.S.vec() - s.E.vec());
}

namespace {

// Test-mode check: the prox output must beat random nearby points on its own
// subproblem objective.
class ProbeChecker {
 public:
  ProbeChecker(Index probes, std::uint64_t seed) : probes_(probes), rng_(seed) {}

  template <class Objective>
  void check(const char* what, const Tensor& best, double radius, const Objective& f,
             const ObservationMask* frozen = nullptr) {
    const double fb = f(best);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Index p = 0; p < probes_; ++p) {
      Tensor d(best.shape());
      for (Index l = 0; l < d.size(); ++l)
        if (!frozen || !(*frozen)[l]) d.data()[l] = n(rng_);
      const double dn = d.vec().norm();
      if (dn == 0.0) continue;
      d.vec() *= radius * u(rng_) / dn;
      d += best;
      const double fp = f(d);
      if (fb > fp + 1e-12 * (1.0 + std::abs(fb)))
        throw SolverAbort(std::string("invariant: ") + what + " update is beaten by a probe (" +
                          std::to_string(fb) + " > " + std::to_string(fp) + ")");
    }
  }

 private:
  Index probes_;
  std::mt19937_64 rng_;
};

double probe_radius(const Tensor& t) { return 0.1 * std::max(t.vec().norm(), 1e-3); }

}  // namespace

AdmmResult solve_rc(const Tensor& o, const ObservationMask& mask, const AdmmConfig& cfg,
                    const AdmmObserver& observer) {
  if (o.order() < 3) throw InvalidArgument("solve_rc: tensor order must be >= 3");
  if (!all_finite(o)) throw InvalidArgument("observation contains non-finite values");
  AdmmResult res;
  res.splits = enumerate_splits(o.order());
  cfg.validate(res.splits.size());
  AdmmState s = admm_init(o, mask, res.splits, cfg);
  res.lambda = cfg.lambda ? *cfg.lambda : lambda_hat(mask.ratio(), res.splits, o.shape());
  ProbeChecker probes(cfg.probes, cfg.probe_seed);
  const auto t0 = std::chrono::steady_clock::now();
  const Index nk = res.splits.size();

  for (Index t = 0; t < cfg.max_iters; ++t) {
    AdmmIteration rec;
    rec.iter = t + 1;

    // Group 1: L_k, S, Y from (X^t, E^t).
    std::vector<Tensor> L(nk);
    double nuclear = 0.0;
    for (Index k = 0; k < nk; ++k) {
      double nk_norm = 0.0;
      L[k] = update_L(s, res.splits, k, &nk_norm);
      nuclear += res.splits[k].weight * nk_norm;
      if (cfg.check_invariants) {
        Tensor target = s.X;
        target.vec() -= s.Z[k].vec() / s.mu[k];
        const ModeSplit& sp = res.splits[k];
        const double mu = s.mu[k];
        probes.check("L", L[k], probe_radius(target), [&](const Tensor& z) {
          return sp.weight * singular_values(unfold(z, sp.spec())).sum() +
                 0.5 * mu * (z.vec() - target.vec()).squaredNorm();
        });
      }
    }
    Tensor S = update_S(s, res.lambda);
    Tensor Y = update_Y(s, mask, o);
    if (cfg.check_invariants) {
      Tensor st = s.E;
      st.vec() -= s.Q.vec() / s.sigma;
      probes.check("S", S, probe_radius(st), [&](const Tensor& z) {
        return res.lambda * z.vec().lpNorm<1>() + 0.5 * s.sigma * (z.vec() - st.vec()).squaredNorm();
      });
      Tensor yt = s.X;
      yt.vec() += s.E.vec() - s.P.vec() / s.gamma;
      probes.check("Y", Y, probe_radius(yt),
                   [&](const Tensor& z) { return 0.5 * s.gamma * (z.vec() - yt.vec()).squaredNorm(); },
                   &mask);
    }
    s.L = std::move(L);
    s.S = std::move(S);
    s.Y = std::move(Y);
    rec.y_on_mask = mask.agrees(s.Y, o);

    // Group 2: X, E.
    XeUpdate xe = update_XE(s);
    const XeResidual xr = xe_stationarity(s, xe.X, xe.E);
    rec.xe_residual = std::max(xr.x_eq, xr.e_eq);
    if (!all_finite(xe.X) || !all_finite(xe.E))
      throw SolverAbort("solve_rc: non-finite iterate at iteration " + std::to_string(t + 1));
    const double xn = s.X.vec().norm();
    const double dx = (xe.X.vec() - s.X.vec()).norm();
    rec.rel_change = xn > 0.0 ? dx / xn : (dx > 0.0 ? 1.0 : 0.0);
    s.X = std::move(xe.X);
    s.E = std::move(xe.E);

    update_multipliers(s, cfg.delta);
    for (double& m : s.mu) m = std::min(m * cfg.penalty_growth, std::max(m, cfg.penalty_cap));
    s.gamma = std::min(s.gamma * cfg.penalty_growth, std::max(s.gamma, cfg.penalty_cap));
    s.sigma = std::min(s.sigma * cfg.penalty_growth, std::max(s.sigma, cfg.penalty_cap));
    ++s.iter;
    s.rel_change_history.push_back(rec.rel_change);

    rec.gap_y = (s.Y.vec() - s.X.vec() - s.E.vec()).norm();
    rec.gap_e = (s.E.vec() - s.S.vec()).norm();
    for (const auto& l : s.L) rec.gap_l = std::max(rec.gap_l, (s.X.vec() - l.vec()).norm());
    rec.objective = nuclear + res.lambda * s.S.vec().lpNorm<1>();
    rec.wall_time = seconds_since(t0);
    res.history.push_back(rec);
    if (observer) observer(rec);

    if (cfg.check_invariants) {
      if (!rec.y_on_mask) throw SolverAbort("invariant: P_Omega(Y) != P_Omega(O)");
      if (rec.xe_residual > 1e-10)
        throw SolverAbort("invariant: (X, E) normal-equation residual " +
                          std::to_string(rec.xe_residual));
    }
    if (rec.rel_change <= cfg.eps) {
      res.converged = true;
      break;
    }
  }
  res.X = std::move(s.X);
  res.E = std::move(s.E);
  return res;
}

}  // namespace fctn
