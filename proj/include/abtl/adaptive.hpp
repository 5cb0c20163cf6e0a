// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "abtl/btl.hpp"

namespace abtl {

/// Sampling policy for the shift search region.
struct RegionOptions {
  int points_per_edge = 20;
  int max_interior_points = 200;
  int segment_points = 100;
  /// Floor for the real part of reflected candidates.
  double min_real_part = 1e-8;
};

/// Convex hull of the mirrored Ritz values {-lambda_i} and a finite sample of
/// it restricted to the open right half-plane.
struct ShiftSearchRegion {
  std::vector<cplx> ritz_values;
  std::vector<cplx> hull_vertices;  // counter-clockwise; 1 or 2 entries when degenerate
  std::vector<cplx> candidates;
};

/// Counter-clockwise convex hull (monotone chain); collinear input collapses
/// to its two extreme points, coincident input to a single point.
std::vector<cplx> convex_hull(std::vector<cplx> points);

ShiftSearchRegion ritz_region(const ComplexMatrix& A_m, const RegionOptions& options = {});
ShiftSearchRegion region_from_ritz_values(const std::vector<cplx>& ritz_values,
                                          const RegionOptions& options = {});

enum class ResidualFormula {
  /// ||R_B(w)|| = ||L_B [I - R G^{-1} U_B(w)]|| from the skinny QR of
  /// (I - V W^T) B; needs square, well-conditioned G and Q.
  economical,
  /// ||R_B(w)|| = ||Z [I; U_B(w)]|| from the skinny QR Z of
  /// [(I - V W^T) B, A V - V A_m]; valid for any bases.
  projected,
};

/// Evaluates the residual norms of the current reduced model at arbitrary
/// points with cost independent of n. Read-only after construction.
class ResidualEvaluator {
 public:
  /// Condition bound above which the economical formula is not trusted.
  static constexpr double kMaxCondition = 1e12;

  ResidualEvaluator(const ReductionState& state, const LinearSystem& sys, const ReducedModel& rm,
                    std::optional<ResidualFormula> formula = std::nullopt);

  ResidualFormula formula() const { return formula_; }

  /// Small k x p matrix (k = p for the economical formula) with the same
  /// singular values and right singular vectors as the n x p R_B(omega).
  ComplexMatrix right_residual_factor(cplx omega) const;
  ComplexMatrix left_residual_factor(cplx omega) const;

  double residual_norm_right(cplx omega) const;
  double residual_norm_left(cplx omega) const;

  double input_norm() const { return input_norm_; }
  double output_norm() const { return output_norm_; }
  Index ports() const { return ports_; }

 private:
  ResidualFormula formula_;
  Index ports_;
  ReducedModel rm_;
  double input_norm_;
  double output_norm_;
  // economical
  ComplexMatrix right_factor_;  // p x p
  ComplexMatrix left_factor_;   // p x p
  ComplexMatrix RGinv_;         // p x ms
  ComplexMatrix LQinv_;         // p x ms
  // projected
  ComplexMatrix right_stack_;  // (p + ms) x (p + ms) triangular factor
  ComplexMatrix left_stack_;
};

struct ShiftChoice {
  cplx shift;
  double residual = 0.0;
  /// True when every candidate was excluded and the centroid fallback was used.
  bool fallback = false;
};

ShiftChoice next_shift_right(const ResidualEvaluator& ev, const ShiftSearchRegion& region);
ShiftChoice next_shift_left(const ResidualEvaluator& ev, const ShiftSearchRegion& region);

/// Top-s right singular vectors of R_B(sigma) as orthonormal columns, each
/// phase-normalized so its first nonzero entry is positive real.
ComplexMatrix next_direction_right(const ResidualEvaluator& ev, cplx sigma, Index s);
ComplexMatrix next_direction_left(const ResidualEvaluator& ev, cplx mu, Index s);

/// Top-s right singular vectors of M with the phase convention above.
ComplexMatrix dominant_right_vectors(const ComplexMatrix& M, Index s);

struct AbtlOptions {
  Index block_width = 1;
  int max_iterations = 10;
  /// Stop when the right residual maximum is below tol ||B|| and the left one
  /// below tol ||C^T||. Zero disables early stopping.
  double tol = 1e-8;
  /// Use the right shift and direction on both sides (sigma_i = mu_i,
  /// R_i = L_i), giving Hermite interpolation.
  bool hermite = false;
  cplx initial_shift = {1.0, 0.0};
  RegionOptions region;
  BtlOptions btl;
  std::optional<ResidualFormula> formula;
};

struct IterationRecord {
  int iteration = 0;  // 1-based block index
  cplx sigma;         // shift of block `iteration`
  cplx mu;
  ComplexMatrix R;
  ComplexMatrix L;
  /// Maximum residual norms of the model with `iteration` blocks over its
  /// search region.
  double residual_right = 0.0;
  double residual_left = 0.0;
  double biorthogonality = 0.0;  // max |W^T V - I|
  double seconds = 0.0;          // cumulative wall time
};

struct AbtlResult {
  ReducedModel model;
  ReductionState state;
  std::vector<IterationRecord> history;
  bool converged = false;
  /// The last requested block lay in the span of the previous ones, so the
  /// run stopped early with the current model.
  bool exhausted = false;
};

/// Callback invoked after each completed iteration record.
using IterationObserver = std::function<void(const IterationRecord&)>;

/// Initial directions: top-s right (R_1) and left (L_1) singular vectors of
/// C B, or leading identity columns when C B vanishes.
std::pair<ComplexMatrix, ComplexMatrix> initial_directions(const LinearSystem& sys, Index s);

AbtlResult run_abtl(const LinearSystem& sys, const AbtlOptions& options,
                    const IterationObserver& observer = {});

/// max |W^T V - I|.
double biorthogonality_error(const ReductionState& state);

}  // namespace abtl
