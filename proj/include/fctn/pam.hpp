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

#include "fctn/harness.hpp"
#include "fctn/mask.hpp"
#include "fctn/network.hpp"

namespace fctn {

/// 1/sqrt(max(I_1, I_2) I_3 I_4) for order 4; otherwise 1/sqrt of the largest
/// side product over the balanced mode splits.
double pam_default_lambda(const Shape& shape);

struct PamConfig {
  std::optional<double> lambda;
  double beta = 1.0;
  double rho = 0.1;
  double eps = 1e-4;
  Index max_iters = 500;
  /// Defaults to all R_ij = 2, clipped to rank_max.
  std::optional<FctnRank> rank_init;
  FctnRank rank_max{3, 2};
  double expand_trigger = 1e-2;
  double expand_noise_scale = 1e-2;
  std::uint64_t seed = 0;
  /// Test mode: assert sufficient decrease and the mask invariant per block.
  bool check_invariants = false;

  void validate(Index order) const;
};

struct PamState {
  FctnFactors factors;
  Tensor X, E, Y;
  Index iter = 0;
  std::vector<double> objective_history;
  std::vector<double> rel_change_history;
};

/// Factors i.i.d. N(0,1)/sqrt(prod of the factor's rank dims) from the init
/// stream; Y0 = X0 = o on Omega and the observed mean elsewhere; E0 = 0.
PamState pam_init(const Tensor& o, const ObservationMask& mask, const FctnRank& rank, Rng& rng);

/// 0.5||X - C||^2 + lambda ||E||_1 + beta/2 ||Y - X - E||^2 with C the
/// composition of the factors, or +inf when P_Omega(Y) != P_Omega(o).
double pam_objective(const PamState& s, double lambda, double beta, const ObservationMask& mask,
                     const Tensor& o);
double pam_objective(const Tensor& composed, const Tensor& X, const Tensor& E, const Tensor& Y,
                     double lambda, double beta, const ObservationMask& mask, const Tensor& o);

struct FactorUpdate {
  Tensor factor;
  /// Mode-k unfolding of the composition with the new factor.
  Matrix composed_k;
  /// ||F (M^T M + rho I) - (X_(k) M + rho F^t)||_F relative to the right side.
  double residual = 0.0;
};

/// Proximal least-squares update of factor k against X (Gauss-Seidel: uses
/// the factors as currently stored in `s`).
FactorUpdate update_factor(const PamState& s, Index k, double rho);

/// X = [C + beta (Y - E) + rho X^t] / (1 + beta + rho).
Tensor update_X_pam(const PamState& s, const Tensor& composed, double beta, double rho);
/// E = soft([beta (Y - X) + rho E^t] / (beta + rho), lambda / (beta + rho)).
Tensor update_E_pam(const PamState& s, double lambda, double beta, double rho);
/// Y = [beta (X + E) + rho Y^t] / (beta + rho) off Omega, o on Omega.
Tensor update_Y_pam(const PamState& s, const ObservationMask& mask, const Tensor& o, double beta,
                    double rho);

/// Raises every R_ij below its maximum by one and pads the affected factor
/// axes with N(0, (noise_scale * std(factor))^2) entries. Returns false when
/// already at rank_max.
bool expand_rank(FctnFactors& f, const FctnRank& rank_max, double noise_scale, Rng& rng);

struct PamIteration {
  Index iter = 0;
  double rel_change = 0.0;
  double objective = 0.0;
  double gap_y = 0.0;  // ||Y - X - E||_F
  /// Worst (f_new + rho/2 ||delta||^2 - f_old) / (1 + |f_old|) over the blocks.
  double decrease_slack = 0.0;
  double factor_residual = 0.0;
  bool y_on_mask = true;
  bool expanded = false;
  FctnRank rank{3, 1};
  double wall_time = 0.0;
};

struct PamResult {
  Tensor X, E;
  FctnFactors factors;
  double lambda = 0.0;
  std::vector<PamIteration> history;
  bool converged = false;
};

using PamObserver = std::function<void(const PamIteration&)>;

/// Proximal alternating minimization with rank growth. Throws SolverAbort on
/// non-finite iterates and, in test mode, on any violated invariant.
PamResult solve_rnc(const Tensor& o, const ObservationMask& mask, const PamConfig& cfg,
                    const PamObserver& observer = {});

}  // namespace fctn
