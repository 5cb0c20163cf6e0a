// SPDX-License-Identifier: Apache-2.0
#include "abtl/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "abtl/errors.hpp"

namespace abtl {

namespace {

double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

bool lex_less(cplx a, cplx b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

void add_unique(std::vector<cplx>& out, cplx z) {
  if (std::find(out.begin(), out.end(), z) == out.end()) out.push_back(z);
}

// Upper-triangular factor of a skinny QR, padded to at least `cols` rows.
ComplexMatrix triangular_factor(const ComplexMatrix& X) {
  Eigen::HouseholderQR<ComplexMatrix> qr(X);
  const Index k = std::min(X.rows(), X.cols());
  ComplexMatrix R = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  return R;
}

// Prefers larger residual; near-equal values go to the larger imaginary,
// then larger real part.
bool better(double value, cplx z, double best, cplx best_z) {
  constexpr double kTieTol = 1e-12;
  if (value > best * (1.0 + kTieTol)) return true;
  if (value < best * (1.0 - kTieTol)) return false;
  if (z.imag() != best_z.imag()) return z.imag() > best_z.imag();
  return z.real() > best_z.real();
}

template <typename Residual>
ShiftChoice argmax_shift(const ShiftSearchRegion& region, Residual&& residual) {
  if (region.candidates.empty()) throw Error(ErrorCode::invalid_argument, "empty shift search region");
  ShiftChoice best{region.candidates.front(), -1.0, false};
  bool found = false;
  for (const cplx z : region.candidates) {
    double value;
    try {
      value = residual(z);
    } catch (const SingularShiftError&) {
      continue;  // Ritz-coincident candidate
    }
    if (!std::isfinite(value)) continue;
    if (!found || better(value, z, best.residual, best.shift)) {
      best = {z, value, false};
      found = true;
    }
  }
  if (found) return best;

  cplx centroid{0.0, 0.0};
  for (const cplx v : region.hull_vertices) centroid += v;
  centroid /= static_cast<double>(std::max<std::size_t>(region.hull_vertices.size(), 1));
  centroid = {std::max(std::abs(centroid.real()), 1e-8) * (1.0 + 1e-8) + 1e-8, centroid.imag()};
  ShiftChoice fallback{centroid, std::numeric_limits<double>::quiet_NaN(), true};
  try {
    fallback.residual = residual(centroid);
  } catch (const SingularShiftError&) {
  }
  return fallback;
}

}  // namespace

std::vector<cplx> convex_hull(std::vector<cplx> points) {
  points.erase(std::remove_if(points.begin(), points.end(),
                              [](cplx z) { return !std::isfinite(z.real()) || !std::isfinite(z.imag()); }),
               points.end());
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "convex hull of an empty point set");
  std::sort(points.begin(), points.end(), lex_less);
  points.erase(std::unique(points.begin(), points.end()), points.end());

  double scale = 0.0;
  for (const cplx z : points) scale = std::max(scale, std::abs(z - points.front()));
  if (scale == 0.0 || points.size() == 1) return {points.front()};
  const double eps = 1e-12 * scale * scale;

  std::vector<cplx> hull(2 * points.size());
  std::size_t k = 0;
  for (const cplx z : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], z) <= eps) --k;
    hull[k++] = z;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = points.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= eps) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return {points.front(), points.back()};
  return hull;
}

ShiftSearchRegion region_from_ritz_values(const std::vector<cplx>& ritz_values,
                                          const RegionOptions& options) {
  ShiftSearchRegion region;
  region.ritz_values = ritz_values;
  std::vector<cplx> mirrored;
  mirrored.reserve(ritz_values.size());
  for (const cplx l : ritz_values) mirrored.push_back(-l);
  region.hull_vertices = convex_hull(mirrored);

  const auto& hull = region.hull_vertices;
  std::vector<cplx> raw;
  if (hull.size() == 1) {
    raw.push_back(hull.front());
  } else if (hull.size() == 2) {
    const int count = std::max(options.segment_points, 2);
    for (int k = 0; k < count; ++k) {
      const double t = static_cast<double>(k) / (count - 1);
      raw.push_back(hull[0] + t * (hull[1] - hull[0]));
    }
  } else {
    const std::size_t edges = hull.size();
    const int per_edge = std::max(options.points_per_edge, 1);
    for (std::size_t e = 0; e < edges; ++e) {
      const cplx a = hull[e];
      const cplx b = hull[(e + 1) % edges];
      for (int k = 0; k < per_edge; ++k) raw.push_back(a + (static_cast<double>(k) / per_edge) * (b - a));
    }
    // Interior: centroid plus scaled copies of the boundary (rings).
    cplx centroid{0.0, 0.0};
    for (const cplx v : hull) centroid += v;
    centroid /= static_cast<double>(edges);
    if (options.max_interior_points > 0) {
      raw.push_back(centroid);
      constexpr int kRings = 3;
      const int budget = options.max_interior_points - 1;
      const int per_ring_edge = budget / static_cast<int>(kRings * edges);
      if (per_ring_edge >= 1) {
        for (int ring = 1; ring <= kRings; ++ring) {
          const double r = static_cast<double>(ring) / (kRings + 1);
          for (std::size_t e = 0; e < edges; ++e) {
            const cplx a = centroid + r * (hull[e] - centroid);
            const cplx b = centroid + r * (hull[(e + 1) % edges] - centroid);
            for (int k = 0; k < per_ring_edge; ++k) {
              raw.push_back(a + (static_cast<double>(k) / per_ring_edge) * (b - a));
            }
          }
        }
      }
    }
  }

  for (cplx z : raw) {
    if (!(z.real() > 0.0)) z = {std::max(-z.real(), options.min_real_part), z.imag()};
    add_unique(region.candidates, z);
  }
  return region;
}

ShiftSearchRegion ritz_region(const ComplexMatrix& A_m, const RegionOptions& options) {
  if (A_m.rows() != A_m.cols() || A_m.size() == 0) throw DimensionError("ritz_region requires a square matrix");
  Eigen::ComplexEigenSolver<ComplexMatrix> eig(A_m, false);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::degenerate, "Ritz value computation failed");
  const ComplexVector& lambda = eig.eigenvalues();
  return region_from_ritz_values(std::vector<cplx>(lambda.data(), lambda.data() + lambda.size()), options);
}

ResidualEvaluator::ResidualEvaluator(const ReductionState& state, const LinearSystem& sys,
                                     const ReducedModel& rm, std::optional<ResidualFormula> formula)
    : ports_(sys.ports()), rm_(rm) {
  const ComplexMatrix B = sys.input().cast<cplx>();
  const ComplexMatrix Ct = sys.output().transpose().cast<cplx>();
  input_norm_ = spectral_norm(B);
  output_norm_ = spectral_norm(Ct);

  const ComplexMatrix& V = state.V();
  const ComplexMatrix& W = state.W();
  const ComplexMatrix right0 = B - V * rm.B;
  const ComplexMatrix left0 = Ct - W * rm.C.transpose();

  bool infinite = false;
  for (const cplx z : state.shifts_right()) infinite = infinite || is_infinite(z);
  for (const cplx z : state.shifts_left()) infinite = infinite || is_infinite(z);

  HessenbergAssembly assembly = assemble(state);
  const bool economical_ok = !infinite && assembly.square() && assembly.cond_G < kMaxCondition &&
                             assembly.cond_Q < kMaxCondition;
  formula_ = formula.value_or(economical_ok ? ResidualFormula::economical : ResidualFormula::projected);
  if (formula_ == ResidualFormula::economical && !(assembly.square() && !infinite)) {
    throw Error(ErrorCode::invalid_argument,
                "economical residual formula needs square coefficient matrices and finite shifts");
  }

  if (formula_ == ResidualFormula::economical) {
    right_factor_ = triangular_factor(right0);
    left_factor_ = triangular_factor(left0);
    // R G^{-1} = (G^{-T} R^T)^T
    RGinv_ = assembly.G.transpose().partialPivLu().solve(assembly.R.transpose()).transpose();
    LQinv_ = assembly.Q.transpose().partialPivLu().solve(assembly.L.transpose()).transpose();
  } else {
    const ComplexMatrix AV = sys.apply(V);
    const ComplexMatrix AtW = sys.apply_transposed(W);
    ComplexMatrix right(V.rows(), ports_ + rm.order());
    right << right0, AV - V * rm.A;
    ComplexMatrix left(W.rows(), ports_ + rm.order());
    left << left0, AtW - W * rm.A.transpose();
    right_stack_ = triangular_factor(right);
    left_stack_ = triangular_factor(left);
  }
}

ComplexMatrix ResidualEvaluator::right_residual_factor(cplx omega) const {
  const ComplexMatrix U = dense_resolvent(rm_.A, omega).solve(rm_.B);
  if (formula_ == ResidualFormula::economical) {
    return right_factor_ * (ComplexMatrix::Identity(ports_, ports_) - RGinv_ * U);
  }
  ComplexMatrix stacked(ports_ + U.rows(), ports_);
  stacked << ComplexMatrix::Identity(ports_, ports_), U;
  return right_stack_ * stacked;
}

ComplexMatrix ResidualEvaluator::left_residual_factor(cplx omega) const {
  const ComplexMatrix U = dense_resolvent(rm_.A, omega).transpose().solve(rm_.C.transpose());
  if (formula_ == ResidualFormula::economical) {
    return left_factor_ * (ComplexMatrix::Identity(ports_, ports_) - LQinv_ * U);
  }
  ComplexMatrix stacked(ports_ + U.rows(), ports_);
  stacked << ComplexMatrix::Identity(ports_, ports_), U;
  return left_stack_ * stacked;
}

double ResidualEvaluator::residual_norm_right(cplx omega) const {
  return spectral_norm(right_residual_factor(omega));
}

double ResidualEvaluator::residual_norm_left(cplx omega) const {
  return spectral_norm(left_residual_factor(omega));
}

ShiftChoice next_shift_right(const ResidualEvaluator& ev, const ShiftSearchRegion& region) {
  return argmax_shift(region, [&](cplx z) { return ev.residual_norm_right(z); });
}

ShiftChoice next_shift_left(const ResidualEvaluator& ev, const ShiftSearchRegion& region) {
  return argmax_shift(region, [&](cplx z) { return ev.residual_norm_left(z); });
}

ComplexMatrix dominant_right_vectors(const ComplexMatrix& M, Index s) {
  if (s < 1 || s > M.cols()) throw DimensionError("direction width must be in 1..p");
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullV);
  ComplexMatrix out = svd.matrixV().leftCols(s);
  for (Index j = 0; j < s; ++j) {
    const double norm = out.col(j).norm();
    for (Index i = 0; i < out.rows(); ++i) {
      const cplx x = out(i, j);
      if (std::abs(x) > 1e-12 * norm) {
        out.col(j) *= std::conj(x) / std::abs(x);
        out(i, j) = std::abs(out(i, j));
        break;
      }
    }
  }
  return out;
}

namespace {

ComplexMatrix direction_from_factor(const ComplexMatrix& factor, double scale, Index s) {
  const double top = spectral_norm(factor);
  if (!(top > 1e-14 * std::max(scale, std::numeric_limits<double>::min()))) {
    throw Error(ErrorCode::degenerate, "residual is numerically zero; the reduction has converged");
  }
  return dominant_right_vectors(factor, s);
}

}  // namespace

ComplexMatrix next_direction_right(const ResidualEvaluator& ev, cplx sigma, Index s) {
  if (s > ev.ports()) throw DimensionError("direction width exceeds p");
  return direction_from_factor(ev.right_residual_factor(sigma), ev.input_norm(), s);
}

ComplexMatrix next_direction_left(const ResidualEvaluator& ev, cplx mu, Index s) {
  if (s > ev.ports()) throw DimensionError("direction width exceeds p");
  return direction_from_factor(ev.left_residual_factor(mu), ev.output_norm(), s);
}

std::pair<ComplexMatrix, ComplexMatrix> initial_directions(const LinearSystem& sys, Index s) {
  const Index p = sys.ports();
  if (s < 1 || s > p) throw DimensionError("block width s must satisfy 1 <= s <= p");
  const ComplexMatrix CB = (sys.output() * sys.input()).cast<cplx>();
  if (spectral_norm(CB) == 0.0) {
    const ComplexMatrix I = ComplexMatrix::Identity(p, s);
    return {I, I};
  }
  return {dominant_right_vectors(CB, s), dominant_right_vectors(CB.transpose(), s)};
}

double biorthogonality_error(const ReductionState& state) {
  const ComplexMatrix G = state.W().transpose() * state.V();
  return (G - ComplexMatrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

AbtlResult run_abtl(const LinearSystem& sys, const AbtlOptions& options, const IterationObserver& observer) {
  const Index s = options.block_width;
  if (s < 1 || s > sys.ports()) throw DimensionError("block width s must satisfy 1 <= s <= p");
  if (options.max_iterations < 1) throw Error(ErrorCode::invalid_argument, "m_max must be at least 1");
  if (options.tol < 0.0) throw Error(ErrorCode::invalid_argument, "tol must be nonnegative");

  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  auto [R1, L1] = initial_directions(sys, s);
  if (options.hermite) L1 = R1;
  const cplx sigma1 = options.initial_shift;
  AbtlResult result{ReducedModel{}, btl_init(sys, sigma1, sigma1, R1, L1, options.btl), {}, false};

  const double b_norm = spectral_norm(sys.input().cast<cplx>());
  const double c_norm = spectral_norm(sys.output().transpose().cast<cplx>());

  for (int m = 1;; ++m) {
    result.model = project(result.state, sys);
    const ShiftSearchRegion region = ritz_region(result.model.A, options.region);
    const ResidualEvaluator ev(result.state, sys, result.model, options.formula);
    const ShiftChoice right = next_shift_right(ev, region);
    const ShiftChoice left = options.hermite ? right : next_shift_left(ev, region);

    IterationRecord record;
    record.iteration = m;
    record.sigma = result.state.shifts_right().back();
    record.mu = result.state.shifts_left().back();
    record.R = result.state.directions_right().back();
    record.L = result.state.directions_left().back();
    record.residual_right = right.residual;
    record.residual_left = options.hermite ? ev.residual_norm_left(right.shift) : left.residual;
    record.biorthogonality = biorthogonality_error(result.state);

    const bool small = options.tol > 0.0 && record.residual_right <= options.tol * b_norm &&
                       record.residual_left <= options.tol * c_norm;
    if (small || m >= options.max_iterations) {
      result.converged = small;
      record.seconds = elapsed();
      result.history.push_back(record);
      if (observer) observer(result.history.back());
      break;
    }

    ComplexMatrix R;
    ComplexMatrix L;
    try {
      R = next_direction_right(ev, right.shift, s);
      L = options.hermite ? R : next_direction_left(ev, left.shift, s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
      result.converged = true;
      record.seconds = elapsed();
      result.history.push_back(record);
      if (observer) observer(result.history.back());
      break;
    }
    record.seconds = elapsed();
    result.history.push_back(record);
    if (observer) observer(result.history.back());

    try {
      btl_extend(result.state, sys, right.shift, left.shift, R, L, options.btl);
    } catch (const DeflationError&) {
      result.exhausted = true;
      break;
    }
  }
  return result;
}

}  // namespace abtl
