// SPDX-License-Identifier: Apache-2.0
#include "abtl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "abtl/errors.hpp"

namespace abtl {

FrequencyGrid log_grid(double omega_min, double omega_max, Index count) {
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || !std::isfinite(omega_max)) {
    throw Error(ErrorCode::invalid_argument, "frequency grid needs 0 < omega_min < omega_max");
  }
  if (count < 2) throw Error(ErrorCode::invalid_argument, "frequency grid needs at least 2 points");
  FrequencyGrid grid;
  grid.omega_min = omega_min;
  grid.omega_max = omega_max;
  grid.points.resize(static_cast<std::size_t>(count));
  const double ratio = omega_max / omega_min;
  for (Index k = 0; k < count; ++k) {
    grid.points[k] = omega_min * std::pow(ratio, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  grid.points.front() = omega_min;
  grid.points.back() = omega_max;
  return grid;
}

Transfer transfer_of(const FirstOrderSystem& sys) {
  return [&sys](cplx omega) { return eval_transfer(sys, omega); };
}

Transfer transfer_of(const LinearSystem& sys) {
  return [&sys](cplx omega) { return eval_transfer(sys, omega); };
}

Transfer transfer_of(const ReducedModel& rm) {
  return [rm](cplx omega) { return eval_reduced_transfer(rm, omega); };
}

Transfer transfer_of(const SecondOrderSystem& sos) {
  return [&sos](cplx omega) { return eval_second_order_transfer(sos, omega); };
}

Transfer transfer_of(const SecondOrderReducedModel& rm) {
  return [rm](cplx omega) { return eval_second_order_reduced(rm, omega); };
}

Index FrequencyResponse::skipped_count() const {
  return static_cast<Index>(std::count(skipped.begin(), skipped.end(), true));
}

namespace {

FrequencyResponse sample(const FrequencyGrid& grid, bool keep_values,
                         const std::function<ComplexMatrix(cplx)>& eval) {
  FrequencyResponse out;
  out.grid = grid;
  const std::size_t count = grid.points.size();
  out.gains.assign(count, 0.0);
  out.skipped.assign(count, false);
  if (keep_values) out.values.emplace(count);
  for (std::size_t k = 0; k < count; ++k) {
    try {
      const ComplexMatrix value = eval(cplx{0.0, grid.points[k]});
      const double gain = spectral_norm(value);
      if (!std::isfinite(gain)) {
        out.skipped[k] = true;
        continue;
      }
      out.gains[k] = gain;
      if (keep_values) (*out.values)[k] = value;
    } catch (const SingularShiftError&) {
      out.skipped[k] = true;
    }
  }
  return out;
}

}  // namespace

FrequencyResponse response(const Transfer& h, const FrequencyGrid& grid, bool keep_values) {
  return sample(grid, keep_values, h);
}

FrequencyResponse error_curve(const Transfer& full, const Transfer& reduced, const FrequencyGrid& grid) {
  return sample(grid, false, [&](cplx omega) -> ComplexMatrix {
    const ComplexMatrix a = full(omega);
    const ComplexMatrix b = reduced(omega);
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      throw DimensionError("full and reduced transfer functions have different port counts");
    }
    return a - b;
  });
}

double hinf_estimate(const FrequencyResponse& error) {
  double best = 0.0;
  for (std::size_t k = 0; k < error.gains.size(); ++k) {
    if (!error.skipped[k]) best = std::max(best, error.gains[k]);
  }
  return best;
}

double hinf_estimate(const Transfer& full, const Transfer& reduced, const FrequencyGrid& grid) {
  return hinf_estimate(error_curve(full, reduced, grid));
}

void write_response_csv(std::ostream& os, const FrequencyResponse& full, const FrequencyResponse& reduced,
                        const FrequencyResponse& error) {
  const std::size_t count = full.grid.points.size();
  if (reduced.grid.points.size() != count || error.grid.points.size() != count) {
    throw DimensionError("responses are sampled on different grids");
  }
  const auto field = [](double v, bool skipped) {
    if (skipped) return std::string("nan");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "omega,gain_full,gain_reduced,error\n";
  for (std::size_t k = 0; k < count; ++k) {
    os << field(full.grid.points[k], false) << ',' << field(full.gains[k], full.skipped[k]) << ','
       << field(reduced.gains[k], reduced.skipped[k]) << ',' << field(error.gains[k], error.skipped[k])
       << '\n';
  }
}

void write_response_csv(const std::string& path, const FrequencyResponse& full,
                        const FrequencyResponse& reduced, const FrequencyResponse& error) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  write_response_csv(os, full, reduced, error);
  if (!os) throw Error(ErrorCode::io, "write failed for " + path);
}

}  // namespace abtl
