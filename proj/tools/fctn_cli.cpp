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


// Command-line front end. Links only the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fctn/fctn.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInternal = 1;

// Carries a status out of a subcommand.
struct Failure {
  fctn_status status;
  std::string message;
};

void check(fctn_status st) {
  if (st != FCTN_OK) throw Failure{st, fctn_last_error()};
}

void invalid(const std::string& message) { throw Failure{FCTN_INVALID_ARGUMENT, message}; }

int exit_code(fctn_status st) {
  switch (st) {
    case FCTN_OK:
      return kExitOk;
    case FCTN_INVALID_ARGUMENT:
    case FCTN_IO_ERROR:
      return kExitInvalid;
    case FCTN_SOLVER_ABORT:
      return kExitSolver;
    default:
      return kExitInternal;
  }
}

struct Tensor {
  fctn_tensor* p = nullptr;
  Tensor() = default;
  Tensor(const Tensor&) = delete;
  Tensor& operator=(const Tensor&) = delete;
  Tensor(Tensor&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Tensor() { fctn_tensor_free(p); }
};

struct Factors {
  fctn_factors* p = nullptr;
  Factors() = default;
  Factors(const Factors&) = delete;
  Factors& operator=(const Factors&) = delete;
  ~Factors() { fctn_factors_free(p); }
};

struct CString {
  char* p = nullptr;
  CString() = default;
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  ~CString() { fctn_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

Tensor load(const std::string& path) {
  Tensor t;
  check(fctn_tensor_load(path.c_str(), &t.p));
  return t;
}

// A single value R for every pair, or the N(N-1)/2 upper-triangle entries in
// row order. Returns the row-major N x N matrix.
std::vector<size_t> rank_matrix(const std::vector<size_t>& r, size_t order) {
  const size_t pairs = order * (order - 1) / 2;
  if (r.size() != 1 && r.size() != pairs)
    invalid("rank needs 1 or " + std::to_string(pairs) + " values for order " +
            std::to_string(order));
  std::vector<size_t> m(order * order, 0);
  size_t k = 0;
  for (size_t i = 0; i < order; ++i)
    for (size_t j = i + 1; j < order; ++j) {
      const size_t v = r.size() == 1 ? r[0] : r[k++];
      m[i * order + j] = m[j * order + i] = v;
    }
  return m;
}

json rank_json(const std::vector<size_t>& r, size_t order) {
  const auto m = rank_matrix(r, order);
  json out = json::array();
  for (size_t i = 0; i < order; ++i)
    out.push_back(std::vector<size_t>(m.begin() + i * order, m.begin() + (i + 1) * order));
  return out;
}

// --config accepts a file path or an inline JSON object.
json read_config(const std::string& arg) {
  if (arg.empty()) return json::object();
  std::string text = arg;
  if (arg.front() != '{') {
    std::ifstream is(arg);
    if (!is) throw Failure{FCTN_IO_ERROR, "cannot read config " + arg};
    std::stringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid(std::string("config: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");
  return j;
}

std::string join(const std::string& dir, const char* name) { return dir + "/" + name; }

void print(const json& j) { std::printf("%s\n", j.dump(2).c_str()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust tensor completion with fully-connected tensor networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fctn_version()));

  // synth
  std::vector<size_t> shape{20, 20, 20, 20};
  std::vector<size_t> rank{2};
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* synth = app.add_subcommand("synth", "Synthetic exact-rank tensor x0 and its factors");
  synth->add_option("--shape", shape, "Mode sizes")->delimiter(',');
  synth->add_option("--rank", rank, "Uniform rank, or the upper triangle of the rank matrix")
      ->delimiter(',');
  synth->add_option("--seed", seed, "Seed");
  synth->add_option("--out", out_dir, "Output directory (x0.fct1, factors/)")->required();

  // corrupt
  std::string input;
  double sap = 0.0;
  double ratio = 1.0;
  auto* corrupt = app.add_subcommand("corrupt", "Salt-and-pepper noise and an observation mask");
  corrupt->add_option("--input", input, "Clean tensor (FCT1)")->required();
  corrupt->add_option("--sap-density", sap, "Fraction of corrupted entries in [0, 1)");
  corrupt->add_option("--sampling-ratio", ratio, "Fraction of observed entries in (0, 1]");
  corrupt->add_option("--seed", seed, "Seed");
  corrupt->add_option("--out", out_dir, "Output directory (observed, mask, e_true .fct1)")
      ->required();

  // solve-rc / solve-rnc
  std::string observed_path, mask_path, reference_path, config_arg;
  std::vector<size_t> rank_max, rank_init;
  auto add_solve = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--observed", observed_path, "Observed tensor (FCT1)")->required();
    c->add_option("--mask", mask_path, "0/1 mask tensor (FCT1)")->required();
    c->add_option("--config", config_arg, "Config overlay: JSON file or inline object");
    c->add_option("--reference", reference_path, "Ground truth for metrics (FCT1)");
    c->add_option("--out", out_dir, "Output directory for the manifest, log and results");
    return c;
  };
  auto* solve_rc = add_solve("solve-rc", "Convex robust completion (ADMM)");
  auto* solve_rnc = add_solve("solve-rnc", "Nonconvex robust completion (PAM)");
  solve_rnc->add_option("--rank-max", rank_max, "Rank cap (uniform or upper triangle)")
      ->delimiter(',');
  solve_rnc->add_option("--rank-init", rank_init, "Initial rank (uniform or upper triangle)")
      ->delimiter(',');
  solve_rnc->add_option("--seed", seed, "Seed for the factor initialization");

  // decompose
  auto* decompose = app.add_subcommand("decompose", "SVD-based FCTN decomposition");
  decompose->add_option("--input", input, "Tensor (FCT1)")->required();
  decompose->add_option("--rank", rank, "Uniform rank, or the upper triangle")
      ->delimiter(',')
      ->required();
  decompose->add_option("--out", out_dir, "Factor directory")->required();

  // metrics
  std::string x_path, x0_path;
  std::vector<size_t> frame_axes{0, 1};
  auto* metrics = app.add_subcommand("metrics", "Relative error, MPSNR and MSSIM");
  metrics->add_option("--x", x_path, "Estimate (FCT1)")->required();
  metrics->add_option("--x0", x0_path, "Reference (FCT1)")->required();
  metrics->add_option("--frame-axes", frame_axes, "Row and column modes of each frame")
      ->delimiter(',')
      ->expected(2);

  // sweep
  std::vector<size_t> sizes{20};
  std::vector<double> rank_fractions{0.1, 0.2}, sampling_ratios{1.0, 0.9},
      sap_densities{0.05, 0.1};
  size_t order = 4, trials = 3, jobs = 1;
  std::string solver = "rc";
  auto* sweep = app.add_subcommand("sweep", "Exact-recovery grid; writes table1.csv and trials.csv");
  sweep->add_option("--seed", seed, "Base seed; trial t uses seed + t")->required();
  sweep->add_option("--sizes", sizes, "Mode sizes I")->delimiter(',');
  sweep->add_option("--rank-fractions", rank_fractions, "Ranks as fractions of I")->delimiter(',');
  sweep->add_option("--sampling-ratios", sampling_ratios, "Sampling ratios")->delimiter(',');
  sweep->add_option("--sap-densities", sap_densities, "SaP densities")->delimiter(',');
  sweep->add_option("--order", order, "Tensor order");
  sweep->add_option("--trials", trials, "Trials per cell");
  sweep->add_option("--solver", solver, "rc or rnc")->check(CLI::IsMember({"rc", "rnc"}));
  sweep->add_option("--config", config_arg, "Config overlay: JSON file or inline object");
  sweep->add_option("--jobs", jobs, "Concurrent runs");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (synth->parsed()) {
      const auto m = rank_matrix(rank, shape.size());
      Tensor x0;
      Factors f;
      check(fctn_synth(shape.size(), shape.data(), m.data(), seed, &x0.p, &f.p));
      std::filesystem::create_directories(out_dir);
      check(fctn_tensor_save(x0.p, join(out_dir, "x0.fct1").c_str()));
      check(fctn_factors_save(f.p, join(out_dir, "factors").c_str()));
    } else if (corrupt->parsed()) {
      Tensor x = load(input);
      Tensor obs, mask, e;
      check(fctn_corrupt(x.p, sap, ratio, seed, &obs.p, &mask.p, &e.p));
      std::filesystem::create_directories(out_dir);
      check(fctn_tensor_save(obs.p, join(out_dir, "observed.fct1").c_str()));
      check(fctn_tensor_save(mask.p, join(out_dir, "mask.fct1").c_str()));
      check(fctn_tensor_save(e.p, join(out_dir, "e_true.fct1").c_str()));
    } else if (solve_rc->parsed() || solve_rnc->parsed()) {
      const bool rnc = solve_rnc->parsed();
      Tensor obs = load(observed_path);
      Tensor mask = load(mask_path);
      json cfg = read_config(config_arg);
      const size_t n = fctn_tensor_order(obs.p);
      if (rnc) {
        if (!rank_max.empty()) cfg["rank_max"] = rank_json(rank_max, n);
        if (!rank_init.empty()) cfg["rank_init"] = rank_json(rank_init, n);
        if (solve_rnc->count("--seed")) cfg["seed"] = seed;
      }
      Tensor x, e;
      CString report;
      const std::string cfg_text = cfg.dump();
      check(fctn_solve(rnc ? "rnc" : "rc", obs.p, mask.p, cfg_text.c_str(),
                       out_dir.empty() ? nullptr : out_dir.c_str(), &x.p, &e.p, &report.p));
      json r = json::parse(report.str());
      if (!reference_path.empty()) {
        Tensor ref = load(reference_path);
        CString m;
        check(fctn_metrics(x.p, ref.p, 0, 1, &m.p));
        r["metrics"] = json::parse(m.str());
      }
      print(r);
    } else if (decompose->parsed()) {
      Tensor x = load(input);
      const auto m = rank_matrix(rank, fctn_tensor_order(x.p));
      Factors f;
      CString trunc;
      check(fctn_decompose(x.p, m.data(), &f.p, &trunc.p));
      check(fctn_factors_save(f.p, out_dir.c_str()));
      Tensor rec;
      check(fctn_factors_compose(f.p, &rec.p));
      CString met;
      check(fctn_metrics(rec.p, x.p, 0, 1, &met.p));
      json r = json::parse(trunc.str());
      r["rel_error"] = json::parse(met.str())["rel_error"];
      print(r);
    } else if (metrics->parsed()) {
      Tensor x = load(x_path);
      Tensor x0 = load(x0_path);
      CString r;
      check(fctn_metrics(x.p, x0.p, frame_axes[0], frame_axes[1], &r.p));
      print(json::parse(r.str()));
    } else if (sweep->parsed()) {
      json spec{{"sizes", sizes},
                {"rank_fractions", rank_fractions},
                {"sampling_ratios", sampling_ratios},
                {"sap_densities", sap_densities},
                {"order", order},
                {"trials", trials},
                {"seed", seed},
                {"solver", solver},
                {"config", read_config(config_arg)},
                {"jobs", jobs}};
      CString r;
      check(fctn_sweep(spec.dump().c_str(), out_dir.c_str(), &r.p));
      print(json::parse(r.str()));
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return exit_code(f.status);
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitOk;
}
