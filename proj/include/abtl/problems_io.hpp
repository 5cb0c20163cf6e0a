// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "abtl/adaptive.hpp"
#include "abtl/second_order.hpp"
#include "abtl/system.hpp"

namespace abtl {

/// Portable uniform [0, 1) stream: std::mt19937_64 (fully specified by the
/// standard) with the top 53 bits mapped to a double.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// rows x cols matrix filled column by column from the stream.
Matrix random_matrix(UniformStream& stream, Index rows, Index cols);

/// Coefficients of L(u) = Lap(u) - f u_x - g u_y - h u.
struct FdmCoefficients {
  std::function<double(double, double)> f;
  std::function<double(double, double)> g;
  std::function<double(double, double)> h;

  /// f = log(x + 2y + 1), g = exp(x + y), h = x + y.
  static FdmCoefficients standard();
  static FdmCoefficients laplacian();
};

struct FdmSpec {
  int n0 = 10;  // inner grid points per direction, n = n0^2
  Index ports = 6;
  std::uint64_t seed = 0;
  FdmCoefficients coefficients = FdmCoefficients::standard();
};

/// Centered 5-point discretization of L on the unit square with homogeneous
/// Dirichlet boundary, mesh width 1/(n0+1), unknown (i, j) at x = i h,
/// y = j h stored at index (j-1) n0 + (i-1). B (n x p) and then C (p x n)
/// are drawn from one UniformStream(seed).
FirstOrderSystem generate_fdm(const FdmSpec& spec);
SparseMatrix fdm_matrix(int n0, const FdmCoefficients& coefficients);

// Matrix Market ------------------------------------------------------------

enum class MarketField { real, integer, complex, pattern };
enum class MarketSymmetry { general, symmetric, skew_symmetric, hermitian };

struct MarketMatrix {
  Index rows = 0;
  Index cols = 0;
  bool coordinate = true;
  MarketField field = MarketField::real;
  MarketSymmetry symmetry = MarketSymmetry::general;
  /// Expanded entries; duplicates are summed on conversion.
  std::vector<Eigen::Triplet<cplx>> entries;

  SparseMatrix to_sparse() const;
  Matrix to_dense() const;
  ComplexMatrix to_complex_dense() const;
};

/// Parses coordinate and array files; symmetric storage is expanded. Raises
/// ParseError with the offending line number.
MarketMatrix read_market(const std::string& path);

/// Real sparse/dense readers; complex and pattern files raise ErrorCode::unsupported.
SparseMatrix read_market_sparse(const std::string& path);
Matrix read_market_dense(const std::string& path);
ComplexMatrix read_market_complex_dense(const std::string& path);

/// Coordinate real general, 17 significant digits.
void write_market(const std::string& path, const SparseMatrix& A);
/// Array real general, 17 significant digits.
void write_market(const std::string& path, const Matrix& A);
/// Array complex general when any imaginary part is nonzero, real otherwise.
void write_market(const std::string& path, const ComplexMatrix& A);

// Benchmarks ---------------------------------------------------------------

struct BundleMetadata {
  std::string name;
  Index order = 0;
  Index ports = 0;
  Index recommended_block_width = 0;
  bool random_input = false;
  bool random_output = false;
  std::vector<std::string> symmetric_matrices;
};

struct BenchmarkBundle {
  std::variant<FirstOrderSystem, SecondOrderSystem> system;
  BundleMetadata metadata;

  bool second_order() const { return std::holds_alternative<SecondOrderSystem>(system); }
};

struct InputOutputSources {
  std::optional<std::string> input;   // B, n x p
  std::optional<std::string> output;  // C, p x n
  /// Used when B or C is missing.
  Index ports = 1;
  std::uint64_t seed = 0;
};

BenchmarkBundle load_first_order(const std::string& a_path, const InputOutputSources& io,
                                 const std::string& name = "");
BenchmarkBundle load_second_order(const std::optional<std::string>& m_path, const std::string& d_path,
                                  const std::string& k_path, const InputOutputSources& io,
                                  const std::string& name = "");

/// Writes A.mtx, B.mtx, C.mtx (first order) or M.mtx (when present), D.mtx,
/// K.mtx, B.mtx, C.mtx into `directory`.
void save_system(const FirstOrderSystem& sys, const std::string& directory);
void save_system(const SecondOrderSystem& sys, const std::string& directory);

// Reduced models -----------------------------------------------------------

struct ReductionMetadata {
  bool second_order = false;
  Index iterations = 0;
  Index block_width = 0;
  bool converged = false;
  bool exhausted = false;
  std::vector<cplx> shifts_right;
  std::vector<cplx> shifts_left;
  std::vector<ComplexMatrix> directions_right;
  std::vector<ComplexMatrix> directions_left;
  std::vector<double> residual_right;
  std::vector<double> residual_left;
  /// Opaque JSON text recorded verbatim (run configuration).
  std::string config_json = "{}";
};

ReductionMetadata make_metadata(const AbtlResult& result, bool second_order);

using AnyReducedModel = std::variant<ReducedModel, SecondOrderReducedModel>;

/// Dense Matrix Market files (A.mtx | D.mtx, K.mtx; B.mtx; C.mtx) plus
/// model.json with the metadata.
void save_reduced(const AnyReducedModel& model, const ReductionMetadata& metadata,
                  const std::string& directory);

struct LoadedReducedModel {
  AnyReducedModel model;
  ReductionMetadata metadata;
};

LoadedReducedModel load_reduced(const std::string& directory);

}  // namespace abtl
