// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abtl/second_order.hpp"
#include "abtl/system.hpp"

namespace abtl {

/// Logarithmically spaced frequencies (rad/s), endpoints included.
struct FrequencyGrid {
  double omega_min = 1e-6;
  double omega_max = 1e6;
  std::vector<double> points;

  Index count() const { return static_cast<Index>(points.size()); }
};

inline constexpr double kDefaultGridMin = 1e-6;
inline constexpr double kDefaultGridMax = 1e6;
inline constexpr Index kDefaultGridCount = 200;

/// points[k] = omega_min (omega_max / omega_min)^(k / (count - 1)).
FrequencyGrid log_grid(double omega_min = kDefaultGridMin, double omega_max = kDefaultGridMax,
                       Index count = kDefaultGridCount);

/// Anything that returns the p x p sample at a complex point.
using Transfer = std::function<ComplexMatrix(cplx)>;

Transfer transfer_of(const FirstOrderSystem& sys);  // holds a reference, uncached solves
Transfer transfer_of(const LinearSystem& sys);       // holds a reference
Transfer transfer_of(const ReducedModel& rm);
Transfer transfer_of(const SecondOrderSystem& sos);  // holds a reference
Transfer transfer_of(const SecondOrderReducedModel& rm);

struct FrequencyResponse {
  FrequencyGrid grid;
  std::vector<double> gains;  // ||H(j omega)||_2, 0 where skipped
  std::vector<bool> skipped;  // singular solve at this point
  std::optional<std::vector<ComplexMatrix>> values;

  Index skipped_count() const;
};

/// Gains at j*omega for every grid point. Points where the evaluation hits
/// a singular solve are flagged and skipped.
FrequencyResponse response(const Transfer& h, const FrequencyGrid& grid, bool keep_values = false);

/// Pointwise ||H(j omega) - H_m(j omega)||_2.
FrequencyResponse error_curve(const Transfer& full, const Transfer& reduced, const FrequencyGrid& grid);

/// Max of the error curve over the non-skipped points. A sampled value,
/// so only a lower bound of the H-infinity norm of the error.
double hinf_estimate(const Transfer& full, const Transfer& reduced, const FrequencyGrid& grid);
double hinf_estimate(const FrequencyResponse& error);

/// Writes "omega,gain_full,gain_reduced,error" rows with 17 significant
/// digits. All three responses must share the grid.
void write_response_csv(std::ostream& os, const FrequencyResponse& full, const FrequencyResponse& reduced,
                        const FrequencyResponse& error);
void write_response_csv(const std::string& path, const FrequencyResponse& full,
                        const FrequencyResponse& reduced, const FrequencyResponse& error);

}  // namespace abtl
