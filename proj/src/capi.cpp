// SPDX-License-Identifier: Apache-2.0
#include "abtl/abtl.h"

#include <chrono>
#include <new>
#include <string>

#include "abtl/errors.hpp"
#include "abtl/evaluation.hpp"
#include "abtl/problems_io.hpp"

using namespace abtl;

struct abtl_system {
  BenchmarkBundle bundle;
};

struct abtl_model {
  AnyReducedModel model;
  ReductionMetadata metadata;
  std::vector<abtl_iteration> history;
};

namespace {

thread_local std::string last_error;

abtl_status map(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return ABTL_E_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return ABTL_E_DIMENSION;
    case ErrorCode::singular_shift: return ABTL_E_SINGULAR_SHIFT;
    case ErrorCode::breakdown: return ABTL_E_BREAKDOWN;
    case ErrorCode::deflation: return ABTL_E_DEFLATION;
    case ErrorCode::structure_loss: return ABTL_E_STRUCTURE_LOSS;
    case ErrorCode::singular_mass: return ABTL_E_SINGULAR_MASS;
    case ErrorCode::degenerate: return ABTL_E_DEGENERATE;
    case ErrorCode::parse: return ABTL_E_PARSE;
    case ErrorCode::io: return ABTL_E_IO;
    case ErrorCode::unsupported: return ABTL_E_UNSUPPORTED;
  }
  return ABTL_E_INTERNAL;
}

abtl_status fail(abtl_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
abtl_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ABTL_OK;
  } catch (const Error& e) {
    return fail(map(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ABTL_E_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(ABTL_E_INTERNAL, e.what());
  } catch (...) {
    return fail(ABTL_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

std::optional<std::string> optional_path(const char* p) {
  if (p == nullptr || *p == '\0') return std::nullopt;
  return std::string(p);
}

void write_matrix(const ComplexMatrix& H, double* out) {
  for (Index j = 0; j < H.cols(); ++j) {
    for (Index i = 0; i < H.rows(); ++i) {
      const Index k = 2 * (j * H.rows() + i);
      out[k] = H(i, j).real();
      out[k + 1] = H(i, j).imag();
    }
  }
}

Transfer system_transfer(const abtl_system& sys) {
  if (sys.bundle.second_order()) return transfer_of(std::get<SecondOrderSystem>(sys.bundle.system));
  return transfer_of(std::get<FirstOrderSystem>(sys.bundle.system));
}

Transfer model_transfer(const abtl_model& m) {
  return std::visit([](const auto& rm) { return transfer_of(rm); }, m.model);
}

abtl_iteration to_c(const IterationRecord& r) {
  return {r.iteration,      r.sigma.real(),   r.sigma.imag(),  r.mu.real(), r.mu.imag(),
          r.residual_right, r.residual_left, r.biorthogonality, r.seconds};
}

AbtlOptions to_cpp(const abtl_options* o) {
  AbtlOptions opt;
  if (o != nullptr) {
    require(o->block_width >= 1, "block_width must be >= 1");
    require(o->max_iterations >= 1, "max_iterations must be >= 1");
    require(o->tol >= 0.0, "tol must be nonnegative");
    opt.block_width = o->block_width;
    opt.max_iterations = static_cast<int>(o->max_iterations);
    opt.tol = o->tol;
    opt.hermite = o->hermite != 0;
    opt.initial_shift = cplx{o->initial_shift, 0.0};
  }
  return opt;
}

}  // namespace

extern "C" {

const char* abtl_last_error(void) { return last_error.c_str(); }

const char* abtl_status_string(abtl_status status) {
  switch (status) {
    case ABTL_OK: return "ok";
    case ABTL_E_INVALID_ARGUMENT: return "invalid argument";
    case ABTL_E_DIMENSION: return "dimension mismatch";
    case ABTL_E_SINGULAR_SHIFT: return "singular shift";
    case ABTL_E_BREAKDOWN: return "breakdown";
    case ABTL_E_DEFLATION: return "deflation";
    case ABTL_E_STRUCTURE_LOSS: return "structure loss";
    case ABTL_E_SINGULAR_MASS: return "singular mass matrix";
    case ABTL_E_DEGENERATE: return "degenerate residual";
    case ABTL_E_PARSE: return "parse error";
    case ABTL_E_IO: return "i/o error";
    case ABTL_E_UNSUPPORTED: return "unsupported";
    case ABTL_E_OUT_OF_MEMORY: return "out of memory";
    case ABTL_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

abtl_status abtl_system_generate_fdm(int n0, int64_t ports, uint64_t seed, abtl_system** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    FdmSpec spec;
    spec.n0 = n0;
    spec.ports = ports;
    spec.seed = seed;
    BundleMetadata meta;
    meta.name = "FDM" + std::to_string(static_cast<long long>(n0) * n0);
    meta.order = static_cast<Index>(n0) * n0;
    meta.ports = ports;
    meta.random_input = meta.random_output = true;
    *out = new abtl_system{{generate_fdm(spec), meta}};
  });
}

abtl_status abtl_system_load_first_order(const char* a_path, const char* b_path, const char* c_path,
                                         int64_t ports, uint64_t seed, abtl_system** out) {
  return guarded([&] {
    require(out != nullptr && a_path != nullptr, "null argument");
    InputOutputSources io{optional_path(b_path), optional_path(c_path), ports, seed};
    *out = new abtl_system{load_first_order(a_path, io)};
  });
}

abtl_status abtl_system_load_second_order(const char* m_path, const char* d_path, const char* k_path,
                                          const char* b_path, const char* c_path, int64_t ports, uint64_t seed,
                                          abtl_system** out) {
  return guarded([&] {
    require(out != nullptr && d_path != nullptr && k_path != nullptr, "null argument");
    InputOutputSources io{optional_path(b_path), optional_path(c_path), ports, seed};
    *out = new abtl_system{load_second_order(optional_path(m_path), d_path, k_path, io)};
  });
}

abtl_status abtl_system_save(const abtl_system* sys, const char* directory) {
  return guarded([&] {
    require(sys != nullptr && directory != nullptr, "null argument");
    std::visit([&](const auto& s) { save_system(s, directory); }, sys->bundle.system);
  });
}

abtl_status abtl_system_info_get(const abtl_system* sys, abtl_system_info* out) {
  return guarded([&] {
    require(sys != nullptr && out != nullptr, "null argument");
    const auto& m = sys->bundle.metadata;
    *out = {m.order, m.ports, sys->bundle.second_order() ? 1 : 0, m.random_input ? 1 : 0, m.random_output ? 1 : 0};
  });
}

abtl_status abtl_system_transfer(const abtl_system* sys, double re, double im, double* out) {
  return guarded([&] {
    require(sys != nullptr && out != nullptr, "null argument");
    write_matrix(system_transfer(*sys)(cplx{re, im}), out);
  });
}

void abtl_system_free(abtl_system* sys) { delete sys; }

void abtl_options_default(abtl_options* options) {
  if (options == nullptr) return;
  const AbtlOptions d;
  *options = {d.block_width, d.max_iterations, d.tol, d.hermite ? 1 : 0, d.initial_shift.real()};
}

abtl_status abtl_reduce(const abtl_system* sys, const abtl_options* options, int second_order,
                        abtl_iteration_callback callback, void* user, abtl_model** out) {
  return guarded([&] {
    require(sys != nullptr && out != nullptr, "null argument");
    const AbtlOptions opt = to_cpp(options);
    const IterationObserver observer = [&](const IterationRecord& r) {
      if (callback) {
        const abtl_iteration rec = to_c(r);
        callback(&rec, user);
      }
    };
    auto model = std::make_unique<abtl_model>();
    if (second_order) {
      if (!sys->bundle.second_order()) {
        throw Error(ErrorCode::invalid_argument, "second-order reduction needs a second-order system");
      }
      SecondOrderReduction red = reduce_second_order(std::get<SecondOrderSystem>(sys->bundle.system), opt, observer);
      model->metadata = make_metadata(red.run, true);
      for (const auto& r : red.run.history) model->history.push_back(to_c(r));
      model->model = std::move(red.model);
    } else if (sys->bundle.second_order()) {
      const LinearizedSystem linear(normalize_mass(std::get<SecondOrderSystem>(sys->bundle.system)));
      AbtlResult run = run_abtl(linear, opt, observer);
      model->metadata = make_metadata(run, false);
      for (const auto& r : run.history) model->history.push_back(to_c(r));
      model->model = std::move(run.model);
    } else {
      AbtlResult run = run_abtl(std::get<FirstOrderSystem>(sys->bundle.system), opt, observer);
      model->metadata = make_metadata(run, false);
      for (const auto& r : run.history) model->history.push_back(to_c(r));
      model->model = std::move(run.model);
    }
    *out = model.release();
  });
}

abtl_status abtl_model_info_get(const abtl_model* model, abtl_model_info* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto& m = model->metadata;
    const auto [order, ports] = std::visit([](const auto& rm) { return std::pair{rm.order(), rm.ports()}; },
                                           model->model);
    *out = {order, ports, m.iterations, m.block_width,
            std::holds_alternative<SecondOrderReducedModel>(model->model) ? 1 : 0, m.converged ? 1 : 0,
            m.exhausted ? 1 : 0,
            static_cast<int64_t>(model->history.size())};
  });
}

abtl_status abtl_model_history(const abtl_model* model, int64_t index, abtl_iteration* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    require(index >= 0 && index < static_cast<int64_t>(model->history.size()), "history index out of range");
    *out = model->history[static_cast<std::size_t>(index)];
  });
}

abtl_status abtl_model_transfer(const abtl_model* model, double re, double im, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    write_matrix(model_transfer(*model)(cplx{re, im}), out);
  });
}

abtl_status abtl_model_save(const abtl_model* model, const char* directory, const char* config_json) {
  return guarded([&] {
    require(model != nullptr && directory != nullptr, "null argument");
    ReductionMetadata meta = model->metadata;
    if (config_json != nullptr) meta.config_json = config_json;
    save_reduced(model->model, meta, directory);
  });
}

abtl_status abtl_model_load(const char* directory, abtl_model** out) {
  return guarded([&] {
    require(directory != nullptr && out != nullptr, "null argument");
    LoadedReducedModel loaded = load_reduced(directory);
    auto model = std::make_unique<abtl_model>();
    const auto& m = loaded.metadata;
    const std::size_t count = std::min({m.residual_right.size(), m.residual_left.size(), m.shifts_right.size(),
                                        m.shifts_left.size()});
    for (std::size_t i = 0; i < count; ++i) {
      abtl_iteration rec{};
      rec.iteration = static_cast<int64_t>(i + 1);
      rec.sigma_re = m.shifts_right[i].real();
      rec.sigma_im = m.shifts_right[i].imag();
      rec.mu_re = m.shifts_left[i].real();
      rec.mu_im = m.shifts_left[i].imag();
      rec.residual_right = m.residual_right[i];
      rec.residual_left = m.residual_left[i];
      model->history.push_back(rec);
    }
    model->model = std::move(loaded.model);
    model->metadata = std::move(loaded.metadata);
    *out = model.release();
  });
}

void abtl_model_free(abtl_model* model) { delete model; }

abtl_status abtl_evaluate(const abtl_system* sys, const abtl_model* model, double omega_min, double omega_max,
                          int64_t count, const char* csv_path, abtl_error_summary* out) {
  return guarded([&] {
    require(sys != nullptr && model != nullptr && out != nullptr, "null argument");
    const FrequencyGrid grid = log_grid(omega_min, omega_max, count);
    const Transfer full = system_transfer(*sys);
    const Transfer reduced = model_transfer(*model);
    const FrequencyResponse error = error_curve(full, reduced, grid);
    if (csv_path != nullptr) {
      write_response_csv(csv_path, response(full, grid), response(reduced, grid), error);
    }
    *out = {hinf_estimate(error), grid.count(), error.skipped_count()};
  });
}

}  // extern "C"
