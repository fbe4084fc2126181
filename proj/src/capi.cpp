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


#include "fctn/fctn.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include <json.hpp>

#include "fctn/error.hpp"
#include "fctn/experiment.hpp"
#include "fctn/factor_io.hpp"
#include "fctn/harness.hpp"
#include "fctn/network.hpp"
#include "fctn/tensor_io.hpp"

struct fctn_tensor {
  fctn::Tensor t;
};

struct fctn_factors {
  fctn::FctnFactors f;
};

namespace {

using json = nlohmann::json;
using fctn::Index;

thread_local std::string g_last_error;

fctn_status fail(fctn_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
fctn_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return FCTN_OK;
  } catch (const fctn::Error& e) {
    switch (e.code()) {
      case fctn::Errc::invalid_argument:
        return fail(FCTN_INVALID_ARGUMENT, e.what());
      case fctn::Errc::io:
        return fail(FCTN_IO_ERROR, e.what());
      case fctn::Errc::solver_abort:
        return fail(FCTN_SOLVER_ABORT, e.what());
    }
    return fail(FCTN_INTERNAL_ERROR, e.what());
  } catch (const json::exception& e) {
    return fail(FCTN_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FCTN_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(FCTN_INTERNAL_ERROR, e.what());
  }
}

void require(const void* p, const char* name) {
  if (!p) throw fctn::InvalidArgument(std::string(name) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fctn::FctnRank rank_from(size_t order, const size_t* m) {
  require(m, "rank_matrix");
  std::vector<std::vector<Index>> full(order, std::vector<Index>(order, 0));
  for (size_t i = 0; i < order; ++i)
    for (size_t j = i + 1; j < order; ++j) full[i][j] = m[i * order + j];
  return fctn::FctnRank::from_matrix(full);
}

fctn::FctnRank rank_from_json(const json& v, Index order) {
  if (v.is_number_unsigned()) return fctn::FctnRank(order, v.get<Index>());
  return fctn::FctnRank::from_matrix(v.get<std::vector<std::vector<Index>>>());
}

std::string config_text(const json& spec) {
  if (!spec.contains("config")) return "{}";
  const json& c = spec.at("config");
  return c.is_string() ? c.get<std::string>() : c.dump();
}

fctn::ObservationMask mask_from(const fctn::Tensor& m) {
  for (double v : m.data())
    if (v != 0.0 && v != 1.0) throw fctn::InvalidArgument("mask entries must be 0 or 1");
  return fctn::ObservationMask::from_tensor(m);
}

fctn_tensor* wrap(fctn::Tensor t) { return new fctn_tensor{std::move(t)}; }

json metrics_json(const fctn::Metrics& m) {
  return {{"rel_error", m.rel_error}, {"mpsnr", m.mpsnr},         {"mssim", m.mssim},
          {"wall_time", m.wall_time}, {"iters", m.iters},         {"converged", m.converged}};
}

}  // namespace

extern "C" {

const char* fctn_last_error(void) { return g_last_error.c_str(); }

const char* fctn_version(void) { return "1.0.0"; }

void fctn_string_free(char* s) { delete[] s; }

fctn_status fctn_tensor_create(size_t order, const size_t* dims, const double* data,
                               fctn_tensor** out) {
  return guarded([&] {
    require(dims, "dims");
    require(out, "out");
    fctn::Shape shape(dims, dims + order);
    fctn::Tensor t(shape);
    if (data) std::memcpy(t.data().data(), data, t.size() * sizeof(double));
    *out = wrap(std::move(t));
  });
}

void fctn_tensor_free(fctn_tensor* t) { delete t; }

size_t fctn_tensor_order(const fctn_tensor* t) { return t ? t->t.order() : 0; }

void fctn_tensor_dims(const fctn_tensor* t, size_t* dims) {
  if (!t || !dims) return;
  for (size_t i = 0; i < t->t.order(); ++i) dims[i] = t->t.dim(i);
}

size_t fctn_tensor_size(const fctn_tensor* t) { return t ? t->t.size() : 0; }

const double* fctn_tensor_data(const fctn_tensor* t) { return t ? t->t.data().data() : nullptr; }

fctn_status fctn_tensor_load(const char* path, fctn_tensor** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(fctn::load_tensor(path));
  });
}

fctn_status fctn_tensor_save(const fctn_tensor* t, const char* path) {
  return guarded([&] {
    require(t, "tensor");
    require(path, "path");
    fctn::save_tensor(path, t->t);
  });
}

void fctn_factors_free(fctn_factors* f) { delete f; }

fctn_status fctn_factors_load(const char* dir, fctn_factors** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new fctn_factors{fctn::load_factors(dir)};
  });
}

fctn_status fctn_factors_save(const fctn_factors* f, const char* dir) {
  return guarded([&] {
    require(f, "factors");
    require(dir, "dir");
    fctn::save_factors(dir, f->f);
  });
}

fctn_status fctn_factors_compose(const fctn_factors* f, fctn_tensor** out) {
  return guarded([&] {
    require(f, "factors");
    require(out, "out");
    *out = wrap(fctn::fctn_compose(f->f));
  });
}

fctn_status fctn_synth(size_t order, const size_t* dims, const size_t* rank_matrix, uint64_t seed,
                       fctn_tensor** x0, fctn_factors** factors) {
  return guarded([&] {
    require(dims, "dims");
    fctn::Shape shape(dims, dims + order);
    fctn::Synthetic syn = fctn::gen_synthetic(shape, rank_from(order, rank_matrix), seed);
    if (x0) *x0 = wrap(std::move(syn.x0));
    if (factors) *factors = new fctn_factors{std::move(syn.factors)};
  });
}

fctn_status fctn_corrupt(const fctn_tensor* x, double sap, double sampling_ratio, uint64_t seed,
                         fctn_tensor** observed, fctn_tensor** mask, fctn_tensor** e_true) {
  return guarded([&] {
    require(x, "x");
    if (!(sap >= 0.0 && sap < 1.0)) throw fctn::InvalidArgument("SaP density must be in [0, 1)");
    if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0))
      throw fctn::InvalidArgument("sampling ratio must be in (0, 1]");
    fctn::Corruption c = fctn::apply_sap(x->t, sap, seed);
    fctn::ObservationMask m = fctn::sample_mask(x->t.shape(), sampling_ratio, seed);
    if (observed) *observed = wrap(m.project(c.corrupted));
    if (mask) *mask = wrap(m.to_tensor());
    if (e_true) *e_true = wrap(std::move(c.e_true));
  });
}

fctn_status fctn_decompose(const fctn_tensor* x, const size_t* rank_matrix, fctn_factors** out,
                           char** truncation_json) {
  return guarded([&] {
    require(x, "x");
    require(out, "out");
    fctn::SvdDecomposition d =
        fctn::svd_fctn_decompose(x->t, rank_from(x->t.order(), rank_matrix));
    if (truncation_json) *truncation_json = dup_string(json{{"truncation_error", d.truncation_error}}.dump());
    *out = new fctn_factors{std::move(d.factors)};
  });
}

fctn_status fctn_solve(const char* solver, const fctn_tensor* observed, const fctn_tensor* mask,
                       const char* config_json, const char* out_dir, fctn_tensor** x,
                       fctn_tensor** e, char** report_json) {
  return guarded([&] {
    require(solver, "solver");
    require(observed, "observed");
    require(mask, "mask");
    const Index order = observed->t.order();
    fctn::SolveSettings s = fctn::default_settings(fctn::parse_solver(solver), order);
    fctn::apply_overlay(s, config_json ? config_json : "{}", order);
    fctn::SolveOutput out =
        fctn::solve(observed->t, mask_from(mask->t), s, out_dir ? out_dir : "", "{}");
    if (report_json)
      *report_json = dup_string(json{{"iters", out.iters},
                                     {"converged", out.converged},
                                     {"lambda", out.lambda},
                                     {"scale", out.scale},
                                     {"wall_time", out.wall_time}}
                                    .dump());
    if (x) *x = wrap(std::move(out.X));
    if (e) *e = wrap(std::move(out.E));
  });
}

fctn_status fctn_metrics(const fctn_tensor* x, const fctn_tensor* x0, size_t frame_rows,
                         size_t frame_cols, char** report_json) {
  return guarded([&] {
    require(x, "x");
    require(x0, "x0");
    require(report_json, "report_json");
    const fctn::FrameAxes axes{frame_rows, frame_cols};
    json r{{"rel_error", fctn::rel_error(x->t, x0->t)},
           {"mpsnr", fctn::mpsnr(x->t, x0->t, axes)},
           {"mssim", fctn::mssim(x->t, x0->t, axes)}};
    *report_json = dup_string(r.dump());
  });
}

fctn_status fctn_run_experiment(const char* spec_json, const char* out_dir, char** report_json) {
  return guarded([&] {
    require(spec_json, "spec_json");
    const json j = json::parse(spec_json);
    fctn::ExperimentSpec spec;
    spec.shape = j.at("shape").get<fctn::Shape>();
    spec.rank_true = rank_from_json(j.at("rank"), spec.shape.size());
    spec.sampling_ratio = j.value("sampling_ratio", 1.0);
    spec.sap_density = j.value("sap_density", 0.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.solver = fctn::parse_solver(j.value("solver", std::string("rc")));
    spec.config = config_text(j);
    fctn::ExperimentResult r = fctn::run_experiment(spec, out_dir ? out_dir : "");
    if (report_json) *report_json = dup_string(metrics_json(r.metrics).dump());
  });
}

fctn_status fctn_sweep(const char* spec_json, const char* out_dir, char** report_json) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out_dir, "out_dir");
    const json j = json::parse(spec_json);
    fctn::SweepSpec spec;
    if (j.contains("sizes")) spec.sizes = j.at("sizes").get<std::vector<Index>>();
    if (j.contains("rank_fractions"))
      spec.rank_fractions = j.at("rank_fractions").get<std::vector<double>>();
    if (j.contains("sampling_ratios"))
      spec.sampling_ratios = j.at("sampling_ratios").get<std::vector<double>>();
    if (j.contains("sap_densities"))
      spec.sap_densities = j.at("sap_densities").get<std::vector<double>>();
    spec.order = j.value("order", spec.order);
    spec.trials = j.value("trials", spec.trials);
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.solver = fctn::parse_solver(j.value("solver", std::string("rc")));
    spec.config = config_text(j);
    spec.jobs = j.value("jobs", spec.jobs);
    fctn::SweepResult r = fctn::sweep(spec, out_dir);
    if (report_json) {
      json cells = json::array();
      for (const auto& c : r.cells)
        cells.push_back({{"size", c.size},
                         {"rank", c.rank},
                         {"rho", c.rho},
                         {"s", c.s},
                         {"rel_error", c.rel_error}});
      *report_json = dup_string(json{{"cells", cells}}.dump());
    }
  });
}

}  // extern "C"
