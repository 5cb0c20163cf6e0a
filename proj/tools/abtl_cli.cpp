// SPDX-License-Identifier: Apache-2.0
// abtl: generate, reduce and evaluate models from the command line.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abtl/abtl.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(abtl_status status) {
  switch (status) {
    case ABTL_E_SINGULAR_SHIFT:
    case ABTL_E_BREAKDOWN:
    case ABTL_E_DEFLATION:
    case ABTL_E_STRUCTURE_LOSS:
    case ABTL_E_SINGULAR_MASS:
    case ABTL_E_DEGENERATE:
    case ABTL_E_OUT_OF_MEMORY:
    case ABTL_E_INTERNAL:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

void check(abtl_status status, const char* what) {
  if (status == ABTL_OK) return;
  throw Failure{exit_code_for(status),
                std::string(what) + ": " + abtl_status_string(status) + ": " + abtl_last_error()};
}

struct SystemDeleter {
  void operator()(abtl_system* s) const { abtl_system_free(s); }
};
struct ModelDeleter {
  void operator()(abtl_model* m) const { abtl_model_free(m); }
};
using SystemPtr = std::unique_ptr<abtl_system, SystemDeleter>;
using ModelPtr = std::unique_ptr<abtl_model, ModelDeleter>;

struct Config {
  std::string input;
  std::vector<std::string> mdk;
  std::string b, c;
  int64_t ports = 1;
  uint64_t seed = 0;
  int n0 = 10;
  int64_t m_max = 10;
  int64_t s = 1;
  double tol = 0.0;
  bool hermite = false;
  bool second_order = false;
  double grid_min = 1e-6;
  double grid_max = 1e6;
  int64_t grid_count = 200;
  std::vector<int64_t> m_list;
  std::string model;
  std::string out;
};

std::string existing(const fs::path& p) { return fs::exists(p) ? p.string() : std::string(); }

const char* c_str_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// --input is a matrix file or a directory holding A.mtx or D.mtx/K.mtx
// (with optional M.mtx, B.mtx, C.mtx).
SystemPtr load_system(const Config& cfg) {
  if (cfg.input.empty() == cfg.mdk.empty()) throw Failure{kExitUsage, "give exactly one of --input or --mdk"};
  std::string b = cfg.b, c = cfg.c;
  abtl_system* sys = nullptr;
  if (!cfg.mdk.empty()) {
    const std::string& m = cfg.mdk[0];
    check(abtl_system_load_second_order(m == "-" || m == "I" ? nullptr : m.c_str(), cfg.mdk[1].c_str(),
                                        cfg.mdk[2].c_str(), c_str_or_null(b), c_str_or_null(c), cfg.ports, cfg.seed,
                                        &sys),
          "loading M, D, K");
    return SystemPtr(sys);
  }
  const fs::path in(cfg.input);
  if (!fs::is_directory(in)) {
    check(abtl_system_load_first_order(cfg.input.c_str(), c_str_or_null(b), c_str_or_null(c), cfg.ports, cfg.seed,
                                       &sys),
          "loading A");
    return SystemPtr(sys);
  }
  if (b.empty()) b = existing(in / "B.mtx");
  if (c.empty()) c = existing(in / "C.mtx");
  if (fs::exists(in / "A.mtx")) {
    check(abtl_system_load_first_order((in / "A.mtx").c_str(), c_str_or_null(b), c_str_or_null(c), cfg.ports,
                                       cfg.seed, &sys),
          "loading A");
  } else if (fs::exists(in / "K.mtx") && fs::exists(in / "D.mtx")) {
    const std::string m = existing(in / "M.mtx");
    check(abtl_system_load_second_order(c_str_or_null(m), (in / "D.mtx").c_str(), (in / "K.mtx").c_str(),
                                        c_str_or_null(b), c_str_or_null(c), cfg.ports, cfg.seed, &sys),
          "loading M, D, K");
  } else {
    throw Failure{kExitUsage, cfg.input + ": no A.mtx or D.mtx/K.mtx found"};
  }
  return SystemPtr(sys);
}

abtl_system_info info_of(const abtl_system* sys) {
  abtl_system_info info{};
  check(abtl_system_info_get(sys, &info), "system info");
  return info;
}

abtl_options options_of(const Config& cfg, int64_t m) {
  abtl_options opt;
  abtl_options_default(&opt);
  opt.block_width = cfg.s;
  opt.max_iterations = m;
  opt.tol = cfg.tol;
  opt.hermite = cfg.hermite ? 1 : 0;
  return opt;
}

json config_json(const std::string& command, const Config& cfg) {
  json j;
  j["command"] = command;
  if (!cfg.input.empty()) j["input"] = cfg.input;
  if (!cfg.mdk.empty()) j["mdk"] = cfg.mdk;
  if (!cfg.b.empty()) j["b"] = cfg.b;
  if (!cfg.c.empty()) j["c"] = cfg.c;
  j["p"] = cfg.ports;
  j["seed"] = cfg.seed;
  j["m_max"] = cfg.m_max;
  j["s"] = cfg.s;
  j["tol"] = cfg.tol;
  j["hermite"] = cfg.hermite;
  j["second_order"] = cfg.second_order;
  return j;
}

void print_row(const abtl_iteration& r) {
  std::printf("%4lld  %12.5e%+12.5ei  %12.5e%+12.5ei  %11.4e  %11.4e  %9.3f\n", static_cast<long long>(r.iteration),
              r.sigma_re, r.sigma_im, r.mu_re, r.mu_im, r.residual_right, r.residual_left, r.seconds);
  std::fflush(stdout);
}

void write_history(const std::string& path, const abtl_model* model) {
  abtl_model_info info{};
  check(abtl_model_info_get(model, &info), "model info");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Failure{kExitUsage, "cannot write " + path};
  std::fprintf(f, "iteration,sigma_re,sigma_im,mu_re,mu_im,residual_right,residual_left,biorthogonality\n");
  for (int64_t i = 0; i < info.history_length; ++i) {
    abtl_iteration r{};
    check(abtl_model_history(model, i, &r), "model history");
    std::fprintf(f, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(r.iteration),
                 r.sigma_re, r.sigma_im, r.mu_re, r.mu_im, r.residual_right, r.residual_left, r.biorthogonality);
  }
  std::fclose(f);
}

int cmd_gen_fdm(const Config& cfg) {
  if (cfg.out.empty()) throw Failure{kExitUsage, "--out is required"};
  abtl_system* raw = nullptr;
  check(abtl_system_generate_fdm(cfg.n0, cfg.ports, cfg.seed, &raw), "generating FDM system");
  SystemPtr sys(raw);
  check(abtl_system_save(sys.get(), cfg.out.c_str()), "saving system");
  const abtl_system_info info = info_of(sys.get());
  std::printf("wrote %s: n=%lld p=%lld\n", cfg.out.c_str(), static_cast<long long>(info.order),
              static_cast<long long>(info.ports));
  return 0;
}

int cmd_reduce(const Config& cfg) {
  if (cfg.out.empty()) throw Failure{kExitUsage, "--out is required"};
  SystemPtr sys = load_system(cfg);
  const abtl_system_info info = info_of(sys.get());
  if (cfg.second_order && !info.second_order) {
    throw Failure{kExitUsage, "--second-order needs a second-order system (--mdk)"};
  }
  const abtl_options opt = options_of(cfg, cfg.m_max);
  std::printf("%4s  %25s  %25s  %11s  %11s  %9s\n", "it", "sigma", "mu", "res_right", "res_left", "time[s]");
  abtl_model* raw = nullptr;
  const auto t0 = std::chrono::steady_clock::now();
  check(abtl_reduce(sys.get(), &opt, cfg.second_order ? 1 : 0,
                    [](const abtl_iteration* r, void*) { print_row(*r); }, nullptr, &raw),
        "reduction");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ModelPtr model(raw);

  check(abtl_model_save(model.get(), cfg.out.c_str(), config_json("reduce", cfg).dump().c_str()), "saving model");
  write_history((fs::path(cfg.out) / "history.csv").string(), model.get());
  {
    std::ofstream timing(fs::path(cfg.out) / "timing.json");
    json per_iteration = json::array();
    abtl_model_info mi{};
    check(abtl_model_info_get(model.get(), &mi), "model info");
    for (int64_t i = 0; i < mi.history_length; ++i) {
      abtl_iteration r{};
      check(abtl_model_history(model.get(), i, &r), "model history");
      per_iteration.push_back(r.seconds);
    }
    timing << json{{"reduce_seconds", seconds}, {"iteration_seconds", per_iteration}}.dump() << '\n';
  }
  abtl_model_info mi{};
  check(abtl_model_info_get(model.get(), &mi), "model info");
  std::printf("reduced order %lld (%lld iterations, s=%lld)%s in %.3f s -> %s\n", static_cast<long long>(mi.order),
              static_cast<long long>(mi.iterations), static_cast<long long>(mi.block_width),
              mi.converged ? ", converged" : mi.exhausted ? ", space exhausted" : "", seconds, cfg.out.c_str());
  return 0;
}

int cmd_eval(const Config& cfg) {
  if (cfg.model.empty()) throw Failure{kExitUsage, "--model is required"};
  SystemPtr sys = load_system(cfg);
  abtl_model* raw = nullptr;
  check(abtl_model_load(cfg.model.c_str(), &raw), "loading model");
  ModelPtr model(raw);

  double reduce_seconds = -1.0;
  if (std::ifstream timing(fs::path(cfg.model) / "timing.json"); timing) {
    try {
      reduce_seconds = json::parse(timing).value("reduce_seconds", -1.0);
    } catch (const json::exception&) {
    }
  }
  const std::string csv = cfg.out.empty() ? (fs::path(cfg.model) / "response.csv").string() : cfg.out;
  abtl_error_summary summary{};
  const auto t0 = std::chrono::steady_clock::now();
  check(abtl_evaluate(sys.get(), model.get(), cfg.grid_min, cfg.grid_max, cfg.grid_count, csv.c_str(), &summary),
        "evaluation");
  const double eval_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("hinf_estimate(sampled)=%.17g points=%lld skipped=%lld time=%.3f eval_time=%.3f csv=%s\n",
              summary.hinf_estimate, static_cast<long long>(summary.count), static_cast<long long>(summary.skipped),
              reduce_seconds, eval_seconds, csv.c_str());
  return 0;
}

int cmd_compare(const Config& cfg) {
  if (cfg.m_list.empty()) throw Failure{kExitUsage, "--m-list is required"};
  for (int64_t m : cfg.m_list) {
    if (m < 1) throw Failure{kExitUsage, "--m-list entries must be >= 1"};
  }
  SystemPtr sys = load_system(cfg);
  const abtl_system_info info = info_of(sys.get());
  if (cfg.second_order && !info.second_order) {
    throw Failure{kExitUsage, "--second-order needs a second-order system (--mdk)"};
  }
  std::FILE* out = cfg.out.empty() ? nullptr : std::fopen(cfg.out.c_str(), "w");
  if (!cfg.out.empty() && !out) throw Failure{kExitUsage, "cannot write " + cfg.out};
  if (out) std::fprintf(out, "m,order,time,hinf_estimate\n");
  std::printf("%6s  %8s  %10s  %24s\n", "m", "order", "time[s]", "err_hinf(sampled)");
  for (int64_t m : cfg.m_list) {
    const abtl_options opt = options_of(cfg, m);
    abtl_model* raw = nullptr;
    const auto t0 = std::chrono::steady_clock::now();
    check(abtl_reduce(sys.get(), &opt, cfg.second_order ? 1 : 0, nullptr, nullptr, &raw), "reduction");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ModelPtr model(raw);
    abtl_model_info mi{};
    check(abtl_model_info_get(model.get(), &mi), "model info");
    abtl_error_summary summary{};
    check(abtl_evaluate(sys.get(), model.get(), cfg.grid_min, cfg.grid_max, cfg.grid_count, nullptr, &summary),
          "evaluation");
    std::printf("%6lld  %8lld  %10.3f  %24.17g\n", static_cast<long long>(m), static_cast<long long>(mi.order),
                seconds, summary.hinf_estimate);
    if (out) {
      std::fprintf(out, "%lld,%lld,%.17g,%.17g\n", static_cast<long long>(m), static_cast<long long>(mi.order),
                   seconds, summary.hinf_estimate);
    }
  }
  if (out) std::fclose(out);
  return 0;
}

void add_system_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--input", cfg.input, "A.mtx, or a directory with A.mtx or D.mtx/K.mtx");
  cmd->add_option("--mdk", cfg.mdk, "M D K paths (M may be '-' for the identity)")->expected(3);
  cmd->add_option("--b", cfg.b, "input matrix B (n x p)");
  cmd->add_option("--c", cfg.c, "output matrix C (p x n)");
  cmd->add_option("--p", cfg.ports, "port count for random B, C")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "seed for random B, C");
}

void add_reduce_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--s", cfg.s, "block width")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", cfg.tol, "relative residual tolerance, 0 runs to m-max")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--hermite", cfg.hermite, "same shifts and directions on both sides");
  cmd->add_flag("--second-order", cfg.second_order, "keep the second-order structure");
}

void add_grid_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--grid-min", cfg.grid_min, "smallest frequency")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-max", cfg.grid_max, "largest frequency")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-count", cfg.grid_count, "number of log-spaced frequencies")->check(CLI::Range(2, 100000000));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive block tangential Lanczos model reduction"};
  app.require_subcommand(1);
  Config cfg;

  auto* gen = app.add_subcommand("gen-fdm", "generate the convection-diffusion FDM test system");
  gen->add_option("--n0", cfg.n0, "inner grid points per direction (n = n0^2)")->check(CLI::Range(2, 100000));
  gen->add_option("--p", cfg.ports, "inputs and outputs")->check(CLI::PositiveNumber);
  gen->add_option("--seed", cfg.seed, "seed for B, C");
  gen->add_option("--out", cfg.out, "output directory")->required();

  auto* reduce = app.add_subcommand("reduce", "reduce a system and write the model");
  add_system_flags(reduce, cfg);
  add_reduce_flags(reduce, cfg);
  reduce->add_option("--m-max", cfg.m_max, "maximum number of iterations")->check(CLI::PositiveNumber);
  reduce->add_option("--out", cfg.out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "sample full and reduced transfer functions");
  add_system_flags(eval, cfg);
  add_grid_flags(eval, cfg);
  eval->add_option("--model", cfg.model, "reduced model directory")->required();
  eval->add_option("--out", cfg.out, "CSV path (default <model>/response.csv)");

  auto* compare = app.add_subcommand("compare", "time and sampled H-infinity error for several m");
  add_system_flags(compare, cfg);
  add_reduce_flags(compare, cfg);
  add_grid_flags(compare, cfg);
  compare->add_option("--m-list", cfg.m_list, "iteration counts, e.g. 10,20,40")->delimiter(',')->required();
  compare->add_option("--out", cfg.out, "CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cfg.grid_min >= cfg.grid_max) throw Failure{kExitUsage, "--grid-min must be below --grid-max"};
    if (*gen) return cmd_gen_fdm(cfg);
    if (*reduce) return cmd_reduce(cfg);
    if (*eval) return cmd_eval(cfg);
    return cmd_compare(cfg);
  } catch (const Failure& f) {
    std::fprintf(stderr, "abtl: %s\n", f.message.c_str());
    return f.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "abtl: %s\n", e.what());
    return kExitNumerical;
  }
}
