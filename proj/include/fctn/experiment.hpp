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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fctn/admm.hpp"
#include "fctn/mask.hpp"
#include "fctn/network.hpp"
#include "fctn/pam.hpp"

namespace fctn {

enum class SolverKind { rc, rnc };

SolverKind parse_solver(const std::string& name);
const char* solver_name(SolverKind kind);

/// Solver choice, both configs, and whether the observed data is divided by
/// its largest observed entry before solving (results are scaled back).
struct SolveSettings {
  SolverKind solver = SolverKind::rc;
  AdmmConfig admm;
  PamConfig pam;
  bool normalize = true;
};

/// Defaults for an order-N problem; the rnc rank cap defaults to all 2s.
SolveSettings default_settings(SolverKind solver, Index order);

/// Applies a JSON object over the selected solver's config. Keys: "normalize"
/// and the solver fields by name ("lambda", "mu", "gamma", "sigma", "delta",
/// "eps", "max_iters", "penalty_growth", "penalty_cap", "check_invariants",
/// "probes", "probe_seed" for rc; "lambda", "beta", "rho", "eps",
/// "max_iters", "rank_init", "rank_max", "expand_trigger",
/// "expand_noise_scale", "seed", "check_invariants" for rnc). Ranks are an
/// integer or an N x N matrix; "eps" may be the string "inf". Unknown keys
/// throw InvalidArgument.
void apply_overlay(SolveSettings& s, const std::string& json_text, Index order);

/// Settings as a JSON object.
std::string settings_json(const SolveSettings& s);

struct SolveOutput {
  Tensor X, E;
  double lambda = 0.0;
  double scale = 1.0;
  Index iters = 0;
  bool converged = false;
  double wall_time = 0.0;
};

/// Runs the selected solver. With a non-empty `out_dir` writes manifest.json,
/// iterations.csv (streamed per iteration) and x.fct1 / e.fct1. `context` is
/// a JSON object merged into the manifest. On SolverAbort the manifest is
/// written with status "aborted" and the exception is rethrown.
SolveOutput solve(const Tensor& o, const ObservationMask& mask, const SolveSettings& s,
                  const std::filesystem::path& out_dir = {}, const std::string& context = "{}");

struct ExperimentSpec {
  Shape shape{20, 20, 20, 20};
  FctnRank rank_true{4, 2};
  double sampling_ratio = 1.0;
  double sap_density = 0.0;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::rc;
  /// Overlay for apply_overlay. For rnc, rank_max defaults to rank_true.
  std::string config = "{}";

  void validate() const;
};

struct Metrics {
  double rel_error = 0.0;
  double mpsnr = 0.0;
  double mssim = 0.0;
  double wall_time = 0.0;
  Index iters = 0;
  bool converged = false;
};

/// Metrics of x against x0. MPSNR and MSSIM use both tensors divided by
/// max(x0) and frames on modes (0, 1).
Metrics evaluate(const Tensor& x, const Tensor& x0);

struct ExperimentResult {
  Metrics metrics;
  Tensor X, E;
};

/// gen_synthetic -> apply_sap -> sample_mask -> solve -> evaluate, all from
/// spec.seed. With a non-empty `out_dir` writes the solve() artifacts plus the
/// spec and metrics in the manifest.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir = {});

struct SweepSpec {
  std::vector<Index> sizes{20};
  /// Uniform rank r = round(fraction * I), at least 1.
  std::vector<double> rank_fractions{0.1, 0.2};
  std::vector<double> sampling_ratios{1.0, 0.9};
  std::vector<double> sap_densities{0.05, 0.1};
  Index order = 4;
  Index trials = 3;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::rc;
  std::string config = "{}";
  /// Runs executed concurrently.
  Index jobs = 1;

  void validate() const;
};

struct TrialRecord {
  Index size = 0;
  Index rank = 0;
  double rho = 0.0;
  double s = 0.0;
  Index trial = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
};

struct CellRecord {
  Index size = 0;
  Index rank = 0;
  double rho = 0.0;
  double s = 0.0;
  double rel_error = 0.0;  // median over trials
};

struct SweepResult {
  std::vector<CellRecord> cells;
  std::vector<TrialRecord> trials;
};

/// Grid over sizes x rank fractions x sampling ratios x densities, trial t
/// using seed + t. Writes table1.csv (size,rank,rho,s,rel_error), trials.csv
/// and runs/<cell>_t<t>/{x,e}.fct1 under `out_dir`. Wall time is not written
/// so reruns with the same spec produce identical files.
SweepResult sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

}  // namespace fctn
