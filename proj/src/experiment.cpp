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


#include "fctn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "fctn/error.hpp"
#include "fctn/harness.hpp"
#include "fctn/tensor_io.hpp"

namespace fctn {

namespace fs = std::filesystem;
using json = nlohmann::json;

SolverKind parse_solver(const std::string& name) {
  if (name == "rc") return SolverKind::rc;
  if (name == "rnc") return SolverKind::rnc;
  throw InvalidArgument("unknown solver '" + name + "' (expected rc or rnc)");
}

const char* solver_name(SolverKind kind) { return kind == SolverKind::rc ? "rc" : "rnc"; }

SolveSettings default_settings(SolverKind solver, Index order) {
  SolveSettings s;
  s.solver = solver;
  s.pam.rank_max = FctnRank(order, 2);
  return s;
}

namespace {

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text.empty() ? std::string("{}") : text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument(std::string(what) + ": expected a JSON object");
  return j;
}

double get_double(const json& v, const std::string& key) {
  if (v.is_string() && (v == "inf" || v == "Infinity"))
    return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw InvalidArgument("config key '" + key + "' must be a number");
  return v.get<double>();
}

Index get_index(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw InvalidArgument("config key '" + key + "' must be >= 0");
  return v.get<Index>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw InvalidArgument("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

FctnRank get_rank(const json& v, const std::string& key, Index order) {
  if (v.is_number_unsigned()) return FctnRank(order, v.get<Index>());
  try {
    auto m = v.get<std::vector<std::vector<Index>>>();
    if (m.size() != order) throw InvalidArgument("config key '" + key + "' has wrong order");
    return FctnRank::from_matrix(m);
  } catch (const json::exception&) {
    throw InvalidArgument("config key '" + key + "' must be an integer or N x N matrix");
  }
}

json rank_json(const FctnRank& r) { return r.matrix(); }

json num(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

}  // namespace

void apply_overlay(SolveSettings& s, const std::string& json_text, Index order) {
  const json j = parse_object(json_text, "config");
  for (const auto& [key, v] : j.items()) {
    if (key == "normalize") {
      s.normalize = get_bool(v, key);
    } else if (s.solver == SolverKind::rc) {
      AdmmConfig& c = s.admm;
      if (key == "lambda") c.lambda = get_double(v, key);
      else if (key == "mu") {
        if (v.is_array()) {
          c.mu.clear();
          for (const auto& x : v) c.mu.push_back(get_double(x, key));
        } else {
          c.mu.assign(enumerate_splits(order).size(), get_double(v, key));
        }
      } else if (key == "gamma") c.gamma = get_double(v, key);
      else if (key == "sigma") c.sigma = get_double(v, key);
      else if (key == "delta") c.delta = get_double(v, key);
      else if (key == "eps") c.eps = get_double(v, key);
      else if (key == "max_iters") c.max_iters = get_index(v, key);
      else if (key == "penalty_growth") c.penalty_growth = get_double(v, key);
      else if (key == "penalty_cap") c.penalty_cap = get_double(v, key);
      else if (key == "check_invariants") c.check_invariants = get_bool(v, key);
      else if (key == "probes") c.probes = get_index(v, key);
      else if (key == "probe_seed") c.probe_seed = get_index(v, key);
      else throw InvalidArgument("unknown rc config key '" + key + "'");
    } else {
      PamConfig& c = s.pam;
      if (key == "lambda") c.lambda = get_double(v, key);
      else if (key == "beta") c.beta = get_double(v, key);
      else if (key == "rho") c.rho = get_double(v, key);
      else if (key == "eps") c.eps = get_double(v, key);
      else if (key == "max_iters") c.max_iters = get_index(v, key);
      else if (key == "rank_init") c.rank_init = get_rank(v, key, order);
      else if (key == "rank_max") c.rank_max = get_rank(v, key, order);
      else if (key == "expand_trigger") c.expand_trigger = get_double(v, key);
      else if (key == "expand_noise_scale") c.expand_noise_scale = get_double(v, key);
      else if (key == "seed") c.seed = get_index(v, key);
      else if (key == "check_invariants") c.check_invariants = get_bool(v, key);
      else throw InvalidArgument("unknown rnc config key '" + key + "'");
    }
  }
}

namespace {

json settings_object(const SolveSettings& s) {
  json j;
  j["solver"] = solver_name(s.solver);
  j["normalize"] = s.normalize;
  if (s.solver == SolverKind::rc) {
    const AdmmConfig& c = s.admm;
    if (c.lambda) j["lambda"] = *c.lambda;
    j["mu"] = c.mu;
    j["gamma"] = c.gamma;
    j["sigma"] = c.sigma;
    j["delta"] = c.delta;
    j["eps"] = num(c.eps);
    j["max_iters"] = c.max_iters;
    j["penalty_growth"] = c.penalty_growth;
    j["penalty_cap"] = c.penalty_cap;
    j["check_invariants"] = c.check_invariants;
    j["probes"] = c.probes;
    j["probe_seed"] = c.probe_seed;
  } else {
    const PamConfig& c = s.pam;
    if (c.lambda) j["lambda"] = *c.lambda;
    j["beta"] = c.beta;
    j["rho"] = c.rho;
    j["eps"] = num(c.eps);
    j["max_iters"] = c.max_iters;
    if (c.rank_init) j["rank_init"] = rank_json(*c.rank_init);
    j["rank_max"] = rank_json(c.rank_max);
    j["expand_trigger"] = c.expand_trigger;
    j["expand_noise_scale"] = c.expand_noise_scale;
    j["seed"] = c.seed;
    j["check_invariants"] = c.check_invariants;
  }
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string rank_cell(const FctnRank& r) {
  std::string out;
  for (Index i = 0; i < r.order(); ++i)
    for (Index j = i + 1; j < r.order(); ++j) {
      if (!out.empty()) out += ';';
      out += std::to_string(r(i, j));
    }
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

class CsvLog {
 public:
  CsvLog(const fs::path& dir, const char* header) {
    if (dir.empty()) return;
    os_.open(dir / "iterations.csv");
    if (!os_) throw IoError("cannot write " + (dir / "iterations.csv").string());
    os_ << header << '\n';
  }
  bool active() const { return os_.is_open(); }
  void row(const std::string& line) {
    if (!active()) return;
    os_ << line << '\n';
    os_.flush();
  }

 private:
  std::ofstream os_;
};

double observed_max(const Tensor& o, const ObservationMask& mask) {
  double m = 0.0;
  for (Index i = 0; i < o.size(); ++i)
    if (mask[i]) m = std::max(m, std::abs(o[i]));
  return m;
}

}  // namespace

std::string settings_json(const SolveSettings& s) { return settings_object(s).dump(); }

SolveOutput solve(const Tensor& o, const ObservationMask& mask, const SolveSettings& s,
                  const fs::path& out_dir, const std::string& context) {
  if (mask.shape() != o.shape()) throw InvalidArgument("solve: mask shape differs from data");
  json manifest = parse_object(context, "manifest context");
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  }

  SolveOutput out;
  out.scale = 1.0;
  if (s.normalize) {
    const double m = observed_max(o, mask);
    if (m > 0.0) out.scale = m;
  }
  Tensor on = o;
  if (out.scale != 1.0) on *= 1.0 / out.scale;

  manifest["config"] = settings_object(s);
  manifest["shape"] = o.shape();
  manifest["observed"] = mask.count();
  manifest["scale"] = out.scale;
  manifest["log"] = "iterations.csv";

  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](const char* status) {
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out_dir.empty()) return;
    manifest["status"] = status;
    manifest["iters"] = out.iters;
    manifest["converged"] = out.converged;
    manifest["wall_time"] = out.wall_time;
    write_json(out_dir / "manifest.json", manifest);
  };

  try {
    if (s.solver == SolverKind::rc) {
      CsvLog log(out_dir, "iter,rel_change,gap_y,gap_e,gap_l,objective,wall_time");
      auto observer = [&](const AdmmIteration& it) {
        out.iters = it.iter;
        log.row(std::to_string(it.iter) + ',' + fmt(it.rel_change) + ',' + fmt(it.gap_y) + ',' +
                fmt(it.gap_e) + ',' + fmt(it.gap_l) + ',' + fmt(it.objective) + ',' +
                fmt(it.wall_time));
      };
      AdmmResult r = solve_rc(on, mask, s.admm, observer);
      out.X = std::move(r.X);
      out.E = std::move(r.E);
      out.lambda = r.lambda;
      out.converged = r.converged;
      json splits = json::array();
      for (const auto& sp : r.splits)
        splits.push_back({{"left", sp.left}, {"right", sp.right}, {"weight", sp.weight}});
      manifest["splits"] = splits;
    } else {
      CsvLog log(out_dir, "iter,rel_change,gap_y,objective,decrease_slack,rank,wall_time");
      auto observer = [&](const PamIteration& it) {
        out.iters = it.iter;
        log.row(std::to_string(it.iter) + ',' + fmt(it.rel_change) + ',' + fmt(it.gap_y) + ',' +
                fmt(it.objective) + ',' + fmt(it.decrease_slack) + ',' + rank_cell(it.rank) +
                ',' + fmt(it.wall_time));
      };
      PamResult r = solve_rnc(on, mask, s.pam, observer);
      out.X = std::move(r.X);
      out.E = std::move(r.E);
      out.lambda = r.lambda;
      out.converged = r.converged;
      manifest["final_rank"] = rank_json(r.factors.rank);
    }
  } catch (const SolverAbort& e) {
    manifest["error"] = e.what();
    finish("aborted");
    throw;
  }

  if (out.scale != 1.0) {
    out.X *= out.scale;
    out.E *= out.scale;
  }
  manifest["lambda"] = out.lambda;
  if (!out_dir.empty()) {
    save_tensor(out_dir / "x.fct1", out.X);
    save_tensor(out_dir / "e.fct1", out.E);
  }
  finish("ok");
  return out;
}

void ExperimentSpec::validate() const {
  if (shape.empty()) throw InvalidArgument("experiment: empty shape");
  for (Index d : shape)
    if (d == 0) throw InvalidArgument("experiment: zero mode size");
  if (rank_true.order() != shape.size())
    throw InvalidArgument("experiment: rank order differs from shape order");
  if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0))
    throw InvalidArgument("experiment: sampling ratio must be in (0, 1]");
  if (!(sap_density >= 0.0 && sap_density < 1.0))
    throw InvalidArgument("experiment: SaP density must be in [0, 1)");
}

Metrics evaluate(const Tensor& x, const Tensor& x0) {
  Metrics m;
  m.rel_error = rel_error(x, x0);
  if (x0.order() >= 2) {
    double peak = 0.0;
    for (double v : x0.data()) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) peak = 1.0;
    const Tensor xs = (1.0 / peak) * x;
    const Tensor x0s = (1.0 / peak) * x0;
    m.mpsnr = mpsnr(xs, x0s);
    m.mssim = mssim(xs, x0s);
  }
  return m;
}

namespace {

struct Instance {
  Synthetic syn;
  Corruption cor;
  ObservationMask mask;
};

Instance make_instance(const ExperimentSpec& spec) {
  Synthetic syn = gen_synthetic(spec.shape, spec.rank_true, spec.seed);
  Corruption cor = apply_sap(syn.x0, spec.sap_density, spec.seed);
  ObservationMask mask = sample_mask(spec.shape, spec.sampling_ratio, spec.seed);
  return {std::move(syn), std::move(cor), std::move(mask)};
}

SolveSettings experiment_settings(const ExperimentSpec& spec) {
  SolveSettings s = default_settings(spec.solver, spec.shape.size());
  s.pam.rank_max = spec.rank_true;
  s.pam.seed = spec.seed;
  s.admm.probe_seed = spec.seed;
  apply_overlay(s, spec.config, spec.shape.size());
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const fs::path& out_dir) {
  spec.validate();
  const SolveSettings settings = experiment_settings(spec);
  Instance inst = make_instance(spec);

  json ctx;
  ctx["experiment"] = {{"shape", spec.shape},
                       {"rank_true", rank_json(spec.rank_true)},
                       {"sampling_ratio", spec.sampling_ratio},
                       {"sap_density", spec.sap_density},
                       {"seed", spec.seed},
                       {"solver", solver_name(spec.solver)}};
  const Tensor observed = inst.mask.project(inst.cor.corrupted);
  SolveOutput out = solve(observed, inst.mask, settings, out_dir, ctx.dump());

  ExperimentResult res;
  res.metrics = evaluate(out.X, inst.syn.x0);
  res.metrics.wall_time = out.wall_time;
  res.metrics.iters = out.iters;
  res.metrics.converged = out.converged;
  if (!out_dir.empty()) {
    const fs::path path = out_dir / "manifest.json";
    json manifest;
    {
      std::ifstream is(path);
      manifest = json::parse(is);
    }
    manifest["metrics"] = {{"rel_error", res.metrics.rel_error},
                           {"mpsnr", res.metrics.mpsnr},
                           {"mssim", res.metrics.mssim}};
    write_json(path, manifest);
  }
  res.X = std::move(out.X);
  res.E = std::move(out.E);
  return res;
}

void SweepSpec::validate() const {
  if (sizes.empty() || rank_fractions.empty() || sampling_ratios.empty() || sap_densities.empty())
    throw InvalidArgument("sweep: every grid axis needs at least one value");
  if (order < 2) throw InvalidArgument("sweep: order must be >= 2");
  if (trials == 0) throw InvalidArgument("sweep: trials must be >= 1");
  if (jobs == 0) throw InvalidArgument("sweep: jobs must be >= 1");
  for (Index n : sizes)
    if (n == 0) throw InvalidArgument("sweep: zero size");
  for (double f : rank_fractions)
    if (!(f > 0.0)) throw InvalidArgument("sweep: rank fractions must be positive");
  for (double r : sampling_ratios)
    if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("sweep: sampling ratio must be in (0, 1]");
  for (double d : sap_densities)
    if (!(d >= 0.0 && d < 1.0)) throw InvalidArgument("sweep: SaP density must be in [0, 1)");
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

SweepResult sweep(const SweepSpec& spec, const fs::path& out_dir) {
  spec.validate();
  SolveSettings probe = default_settings(spec.solver, spec.order);
  apply_overlay(probe, spec.config, spec.order);  // reject a bad overlay before any run

  SweepResult result;
  for (Index n : spec.sizes)
    for (double f : spec.rank_fractions) {
      const Index r = std::max<Index>(1, static_cast<Index>(std::lround(f * n)));
      for (double rho : spec.sampling_ratios)
        for (double s : spec.sap_densities) {
          result.cells.push_back({n, r, rho, s, 0.0});
          for (Index t = 0; t < spec.trials; ++t)
            result.trials.push_back({n, r, rho, s, t, spec.seed + t, {}});
        }
    }

  std::error_code ec;
  fs::create_directories(out_dir / "runs", ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  auto run_dir = [&](const TrialRecord& tr) {
    return out_dir / "runs" /
           ("I" + std::to_string(tr.size) + "_r" + std::to_string(tr.rank) + "_rho" +
            short_fmt(tr.rho) + "_s" + short_fmt(tr.s) + "_t" + std::to_string(tr.trial));
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.trials.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      TrialRecord& tr = result.trials[i];
      try {
        ExperimentSpec es;
        es.shape.assign(spec.order, tr.size);
        es.rank_true = FctnRank(spec.order, tr.rank);
        es.sampling_ratio = tr.rho;
        es.sap_density = tr.s;
        es.seed = tr.seed;
        es.solver = spec.solver;
        es.config = spec.config;
        ExperimentResult er = run_experiment(es);
        tr.metrics = er.metrics;
        const fs::path dir = run_dir(tr);
        fs::create_directories(dir);
        save_tensor(dir / "x.fct1", er.X);
        save_tensor(dir / "e.fct1", er.E);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const Index jobs = std::min<Index>(spec.jobs, result.trials.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (Index j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::string trials_csv = "size,rank,rho,s,trial,seed,rel_error,mpsnr,mssim,iters,converged\n";
  for (const auto& tr : result.trials)
    trials_csv += std::to_string(tr.size) + ',' + std::to_string(tr.rank) + ',' +
                  short_fmt(tr.rho) + ',' + short_fmt(tr.s) + ',' + std::to_string(tr.trial) +
                  ',' + std::to_string(tr.seed) + ',' + fmt(tr.metrics.rel_error) + ',' +
                  fmt(tr.metrics.mpsnr) + ',' + fmt(tr.metrics.mssim) + ',' +
                  std::to_string(tr.metrics.iters) + ',' + (tr.metrics.converged ? "1" : "0") +
                  '\n';
  std::string table_csv = "size,rank,rho,s,rel_error\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    std::vector<double> errs;
    for (Index t = 0; t < spec.trials; ++t)
      errs.push_back(result.trials[c * spec.trials + t].metrics.rel_error);
    CellRecord& cell = result.cells[c];
    cell.rel_error = median(errs);
    table_csv += std::to_string(cell.size) + ',' + std::to_string(cell.rank) + ',' +
                 short_fmt(cell.rho) + ',' + short_fmt(cell.s) + ',' + fmt(cell.rel_error) + '\n';
  }
  write_text(out_dir / "trials.csv", trials_csv);
  write_text(out_dir / "table1.csv", table_csv);
  return result;
}

}  // namespace fctn
