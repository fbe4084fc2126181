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

#include <functional>
#include <optional>
#include <vector>

#include "fctn/mask.hpp"
#include "fctn/tensor.hpp"

namespace fctn {

/// Balanced bipartition of the modes used by the FCTN nuclear norm.
struct ModeSplit {
  std::vector<Index> left;   // sorted, floor(N/2) modes
  std::vector<Index> right;  // sorted complement
  double weight = 0.0;

  UnfoldingSpec spec() const;
};

/// N even: every floor(N/2)-subset containing mode 0. N odd: every
/// floor(N/2)-subset. Lexicographic order, uniform weights.
std::vector<ModeSplit> enumerate_splits(Index order);

/// sum_k alpha_k * ||X_[left_k; right_k]||_*.
double fctn_nuclear_norm(const Tensor& x, const std::vector<ModeSplit>& splits);

/// sum_k alpha_k / sqrt(rho_obs * nbar_k), nbar_k the larger side of split k.
double lambda_hat(double rho_obs, const std::vector<ModeSplit>& splits, const Shape& shape);

inline constexpr double kAdmmDefaultPenalty = 1e-2;

struct AdmmConfig {
  /// Sparse weight. Defaults to lambda_hat at the mask's observed ratio.
  std::optional<double> lambda;
  /// Initial mu_k, one per split. Empty means kAdmmDefaultPenalty for all.
  std::vector<double> mu;
  double gamma = kAdmmDefaultPenalty;
  double sigma = kAdmmDefaultPenalty;
  double delta = 1.0;
  double eps = 1e-4;
  Index max_iters = 500;
  /// Per-iteration multiplicative growth of every penalty; 1 keeps them fixed.
  double penalty_growth = 1.05;
  double penalty_cap = 1e2;
  /// Test mode: assert the per-iteration invariants and probe each prox step.
  bool check_invariants = false;
  Index probes = 20;
  std::uint64_t probe_seed = 0;

  void validate(Index n_splits) const;
};

struct AdmmState {
  Tensor X, E, S, Y, P, Q;
  std::vector<Tensor> L, Z;
  std::vector<double> mu;
  double gamma = 0.0;
  double sigma = 0.0;
  Index iter = 0;
  std::vector<double> rel_change_history;
};

/// X0 = o on Omega and the mean of the observed entries elsewhere; Y0 = L_k0 =
/// X0; E, S and all multipliers zero.
AdmmState admm_init(const Tensor& o, const ObservationMask& mask,
                    const std::vector<ModeSplit>& splits, const AdmmConfig& cfg);

/// L_k = fold(svt(unfold(X - Z_k/mu_k), alpha_k/mu_k)). `nuclear_norm`
/// receives the nuclear norm of the new unfolding.
Tensor update_L(const AdmmState& s, const std::vector<ModeSplit>& splits, Index k,
                double* nuclear_norm = nullptr);
/// S = soft(E - Q/sigma, lambda/sigma).
Tensor update_S(const AdmmState& s, double lambda);
/// Y = o on Omega, X + E - P/gamma elsewhere.
Tensor update_Y(const AdmmState& s, const ObservationMask& mask, const Tensor& o);

struct XeUpdate {
  Tensor X, E;
};
/// Joint minimizer over (X, E) by Cramer's rule on the 2x2 normal equations.
XeUpdate update_XE(const AdmmState& s);

/// Residuals of both (X, E) normal equations relative to ||M|| + ||N||.
struct XeResidual {
  double x_eq = 0.0;
  double e_eq = 0.0;
};
XeResidual xe_stationarity(const AdmmState& s, const Tensor& X, const Tensor& E);

/// Z_k += delta mu_k (L_k - X); P += delta gamma (Y - X - E);
/// Q += delta sigma (S - E).
void update_multipliers(AdmmState& s, double delta);

struct AdmmIteration {
  Index iter = 0;
  double rel_change = 0.0;
  double gap_y = 0.0;  // ||Y - X - E||_F
  double gap_e = 0.0;  // ||E - S||_F
  double gap_l = 0.0;  // max_k ||X - L_k||_F
  double objective = 0.0;  // sum_k alpha_k ||L_k||_* + lambda ||S||_1
  double xe_residual = 0.0;
  bool y_on_mask = true;
  double wall_time = 0.0;
};

struct AdmmResult {
  Tensor X, E;
  std::vector<ModeSplit> splits;
  double lambda = 0.0;
  std::vector<AdmmIteration> history;
  bool converged = false;
};

using AdmmObserver = std::function<void(const AdmmIteration&)>;

/// ADMM for the convex model. Throws SolverAbort on non-finite iterates and,
/// in test mode, on any violated invariant.
AdmmResult solve_rc(const Tensor& o, const ObservationMask& mask, const AdmmConfig& cfg,
                    const AdmmObserver& observer = {});

}  // namespace fctn
