// SPDX-License-Identifier: Apache-2.0
#include "abtl/problems_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "abtl/errors.hpp"

namespace abtl {

namespace fs = std::filesystem;
using nlohmann::json;

Matrix random_matrix(UniformStream& stream, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) M(i, j) = stream.next();
  }
  return M;
}

FdmCoefficients FdmCoefficients::standard() {
  return {[](double x, double y) { return std::log(x + 2.0 * y + 1.0); },
          [](double x, double y) { return std::exp(x + y); },
          [](double x, double y) { return x + y; }};
}

FdmCoefficients FdmCoefficients::laplacian() {
  const auto zero = [](double, double) { return 0.0; };
  return {zero, zero, zero};
}

SparseMatrix fdm_matrix(int n0, const FdmCoefficients& c) {
  if (n0 < 2) throw Error(ErrorCode::invalid_argument, "FDM grid needs n0 >= 2");
  const Index n = static_cast<Index>(n0) * n0;
  const double h = 1.0 / (n0 + 1);
  const double inv_h2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * n));
  for (int j = 1; j <= n0; ++j) {
    for (int i = 1; i <= n0; ++i) {
      const Index k = static_cast<Index>(j - 1) * n0 + (i - 1);
      const double x = i * h;
      const double y = j * h;
      const double f = c.f(x, y);
      const double g = c.g(x, y);
      triplets.emplace_back(k, k, -4.0 * inv_h2 - c.h(x, y));
      if (i > 1) triplets.emplace_back(k, k - 1, inv_h2 + f / (2.0 * h));
      if (i < n0) triplets.emplace_back(k, k + 1, inv_h2 - f / (2.0 * h));
      if (j > 1) triplets.emplace_back(k, k - n0, inv_h2 + g / (2.0 * h));
      if (j < n0) triplets.emplace_back(k, k + n0, inv_h2 - g / (2.0 * h));
    }
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

FirstOrderSystem generate_fdm(const FdmSpec& spec) {
  SparseMatrix A = fdm_matrix(spec.n0, spec.coefficients);
  if (spec.ports < 1 || spec.ports > A.rows()) {
    throw Error(ErrorCode::invalid_argument, "FDM port count must be in [1, n]");
  }
  UniformStream stream(spec.seed);
  Matrix B = random_matrix(stream, A.rows(), spec.ports);
  Matrix C = random_matrix(stream, spec.ports, A.rows());
  return FirstOrderSystem(std::move(A), std::move(B), std::move(C));
}

// Matrix Market ------------------------------------------------------------

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

double parse_number(const std::string& token, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw ParseError(path, line, "bad number '" + token + "'");
  return v;
}

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  return os;
}

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::io, "write failed for " + path);
}

}  // namespace

MarketMatrix read_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  ++lineno;

  MarketMatrix mm;
  {
    std::istringstream header(line);
    std::string banner, object, format_, field, symmetry;
    header >> banner >> object >> format_ >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError(path, lineno, "missing %%MatrixMarket banner");
    if (lower(object) != "matrix") throw ParseError(path, lineno, "object must be 'matrix'");
    format_ = lower(format_);
    if (format_ == "coordinate") mm.coordinate = true;
    else if (format_ == "array") mm.coordinate = false;
    else throw ParseError(path, lineno, "unknown format '" + format_ + "'");
    field = lower(field);
    if (field == "real" || field == "double") mm.field = MarketField::real;
    else if (field == "integer") mm.field = MarketField::integer;
    else if (field == "complex") mm.field = MarketField::complex;
    else if (field == "pattern") mm.field = MarketField::pattern;
    else throw ParseError(path, lineno, "unknown field '" + field + "'");
    symmetry = lower(symmetry);
    if (symmetry == "general") mm.symmetry = MarketSymmetry::general;
    else if (symmetry == "symmetric") mm.symmetry = MarketSymmetry::symmetric;
    else if (symmetry == "skew-symmetric") mm.symmetry = MarketSymmetry::skew_symmetric;
    else if (symmetry == "hermitian") mm.symmetry = MarketSymmetry::hermitian;
    else throw ParseError(path, lineno, "unknown symmetry '" + symmetry + "'");
    if (!mm.coordinate && mm.field == MarketField::pattern) {
      throw ParseError(path, lineno, "array format cannot be 'pattern'");
    }
  }

  // size line
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (blank(line)) continue;
    break;
  }
  if (!in && line.empty()) throw ParseError(path, lineno, "missing size line");
  Index nnz = 0;
  {
    std::istringstream size(line);
    long long r = -1, c = -1, z = -1;
    size >> r >> c;
    if (mm.coordinate) size >> z;
    if (!size || r < 0 || c < 0 || (mm.coordinate && z < 0)) throw ParseError(path, lineno, "bad size line");
    mm.rows = r;
    mm.cols = c;
    nnz = mm.coordinate ? z : 0;
  }
  if (mm.symmetry != MarketSymmetry::general && mm.rows != mm.cols) {
    throw ParseError(path, lineno, "symmetric storage requires a square matrix");
  }

  const bool is_complex = mm.field == MarketField::complex;
  const auto push = [&](Index i, Index j, cplx v) {
    mm.entries.emplace_back(i, j, v);
    if (i == j) return;
    switch (mm.symmetry) {
      case MarketSymmetry::general: break;
      case MarketSymmetry::symmetric: mm.entries.emplace_back(j, i, v); break;
      case MarketSymmetry::skew_symmetric: mm.entries.emplace_back(j, i, -v); break;
      case MarketSymmetry::hermitian: mm.entries.emplace_back(j, i, std::conj(v)); break;
    }
  };

  // array storage order: column major, lower triangle for symmetric kinds
  Index expected = 0;
  if (mm.coordinate) {
    expected = nnz;
  } else if (mm.symmetry == MarketSymmetry::general) {
    expected = mm.rows * mm.cols;
  } else if (mm.symmetry == MarketSymmetry::skew_symmetric) {
    expected = mm.rows * (mm.rows - 1) / 2;
  } else {
    expected = mm.rows * (mm.rows + 1) / 2;
  }
  mm.entries.reserve(static_cast<std::size_t>(mm.coordinate && mm.symmetry != MarketSymmetry::general ? 2 * expected : expected));

  Index read = 0;
  Index ai = 0, aj = 0;  // array cursor
  if (!mm.coordinate && mm.symmetry == MarketSymmetry::skew_symmetric) ai = 1;
  while (read < expected && std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '%') continue;
    std::istringstream tokens(line);
    std::vector<std::string> t;
    for (std::string tok; tokens >> tok;) t.push_back(tok);
    if (mm.coordinate) {
      const std::size_t want = 2 + (mm.field == MarketField::pattern ? 0 : (is_complex ? 2 : 1));
      if (t.size() != want) throw ParseError(path, lineno, "expected " + std::to_string(want) + " fields");
      const double ri = parse_number(t[0], path, lineno);
      const double cj = parse_number(t[1], path, lineno);
      const Index i = static_cast<Index>(ri) - 1;
      const Index j = static_cast<Index>(cj) - 1;
      if (ri != std::floor(ri) || cj != std::floor(cj) || i < 0 || j < 0 || i >= mm.rows || j >= mm.cols) {
        throw ParseError(path, lineno, "index out of range");
      }
      if (mm.symmetry != MarketSymmetry::general && i < j) {
        throw ParseError(path, lineno, "symmetric storage must list the lower triangle");
      }
      cplx v{1.0, 0.0};
      if (mm.field != MarketField::pattern) {
        v = cplx{parse_number(t[2], path, lineno), is_complex ? parse_number(t[3], path, lineno) : 0.0};
      }
      push(i, j, v);
    } else {
      const std::size_t want = is_complex ? 2 : 1;
      if (t.size() != want) throw ParseError(path, lineno, "expected " + std::to_string(want) + " fields");
      const cplx v{parse_number(t[0], path, lineno), is_complex ? parse_number(t[1], path, lineno) : 0.0};
      push(ai, aj, v);
      ++ai;
      if (ai >= mm.rows) {
        ++aj;
        ai = mm.symmetry == MarketSymmetry::general ? 0
             : mm.symmetry == MarketSymmetry::skew_symmetric ? aj + 1
                                                           : aj;
      }
    }
    ++read;
  }
  if (read < expected) {
    throw ParseError(path, lineno, "expected " + std::to_string(expected) + " entries, found " + std::to_string(read));
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line) && line[0] != '%') throw ParseError(path, lineno, "trailing data after the last entry");
  }
  return mm;
}

SparseMatrix MarketMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> real;
  real.reserve(entries.size());
  for (const auto& e : entries) real.emplace_back(e.row(), e.col(), e.value().real());
  SparseMatrix A(rows, cols);
  A.setFromTriplets(real.begin(), real.end());
  A.makeCompressed();
  return A;
}

Matrix MarketMatrix::to_dense() const { return to_complex_dense().real(); }

ComplexMatrix MarketMatrix::to_complex_dense() const {
  ComplexMatrix A = ComplexMatrix::Zero(rows, cols);
  for (const auto& e : entries) A(e.row(), e.col()) += e.value();
  return A;
}

namespace {

MarketMatrix read_real(const std::string& path) {
  MarketMatrix mm = read_market(path);
  if (mm.field == MarketField::complex || mm.field == MarketField::pattern) {
    throw Error(ErrorCode::unsupported, path + ": complex and pattern matrices are not supported here");
  }
  return mm;
}

}  // namespace

SparseMatrix read_market_sparse(const std::string& path) { return read_real(path).to_sparse(); }

Matrix read_market_dense(const std::string& path) { return read_real(path).to_dense(); }

ComplexMatrix read_market_complex_dense(const std::string& path) {
  MarketMatrix mm = read_market(path);
  if (mm.field == MarketField::pattern) {
    throw Error(ErrorCode::unsupported, path + ": pattern matrices are not supported here");
  }
  return mm.to_complex_dense();
}

void write_market(const std::string& path, const SparseMatrix& A) {
  std::ofstream os = open_out(path);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (Index j = 0; j < A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format(it.value()) << '\n';
    }
  }
  finish(os, path);
}

void write_market(const std::string& path, const Matrix& A) {
  std::ofstream os = open_out(path);
  os << "%%MatrixMarket matrix array real general\n";
  os << A.rows() << ' ' << A.cols() << '\n';
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) os << format(A(i, j)) << '\n';
  }
  finish(os, path);
}

void write_market(const std::string& path, const ComplexMatrix& A) {
  if (A.imag().isZero(0.0)) {
    write_market(path, Matrix(A.real()));
    return;
  }
  std::ofstream os = open_out(path);
  os << "%%MatrixMarket matrix array complex general\n";
  os << A.rows() << ' ' << A.cols() << '\n';
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) os << format(A(i, j).real()) << ' ' << format(A(i, j).imag()) << '\n';
  }
  finish(os, path);
}

// Benchmarks ---------------------------------------------------------------

namespace {

struct PortMatrices {
  Matrix B;
  Matrix C;
  bool random_input = false;
  bool random_output = false;
};

PortMatrices read_ports(Index n, const InputOutputSources& io) {
  PortMatrices out;
  Index p = io.ports;
  if (io.input) {
    out.B = read_market_dense(*io.input);
    if (out.B.rows() != n) throw DimensionError(*io.input + ": B must have " + std::to_string(n) + " rows");
    p = out.B.cols();
  }
  if (io.output) {
    out.C = read_market_dense(*io.output);
    if (out.C.cols() != n) throw DimensionError(*io.output + ": C must have " + std::to_string(n) + " columns");
    if (io.input && out.C.rows() != p) throw DimensionError("C and B have different port counts");
    p = out.C.rows();
  }
  if (p < 1) throw Error(ErrorCode::invalid_argument, "port count must be positive");
  UniformStream stream(io.seed);
  if (!io.input) {
    out.B = random_matrix(stream, n, p);
    out.random_input = true;
  }
  if (!io.output) {
    out.C = random_matrix(stream, p, n);
    out.random_output = true;
  }
  return out;
}

MarketMatrix read_square(const std::string& path, const char* what) {
  MarketMatrix mm = read_real(path);
  if (mm.rows != mm.cols) throw DimensionError(path + ": " + what + " must be square");
  return mm;
}

}  // namespace

BenchmarkBundle load_first_order(const std::string& a_path, const InputOutputSources& io,
                                 const std::string& name) {
  const MarketMatrix a = read_square(a_path, "A");
  PortMatrices ports = read_ports(a.rows, io);
  BundleMetadata meta;
  meta.name = name.empty() ? fs::path(a_path).stem().string() : name;
  meta.order = a.rows;
  meta.ports = ports.B.cols();
  meta.random_input = ports.random_input;
  meta.random_output = ports.random_output;
  if (a.symmetry != MarketSymmetry::general) meta.symmetric_matrices.push_back("A");
  return {FirstOrderSystem(a.to_sparse(), std::move(ports.B), std::move(ports.C)), meta};
}

BenchmarkBundle load_second_order(const std::optional<std::string>& m_path, const std::string& d_path,
                                  const std::string& k_path, const InputOutputSources& io,
                                  const std::string& name) {
  const MarketMatrix k = read_square(k_path, "K");
  const MarketMatrix d = read_square(d_path, "D");
  if (d.rows != k.rows) throw DimensionError(d_path + ": D and K have different orders");
  std::optional<SparseMatrix> M;
  BundleMetadata meta;
  if (m_path) {
    const MarketMatrix m = read_square(*m_path, "M");
    if (m.rows != k.rows) throw DimensionError(*m_path + ": M and K have different orders");
    if (m.symmetry != MarketSymmetry::general) meta.symmetric_matrices.push_back("M");
    M = m.to_sparse();
  }
  if (d.symmetry != MarketSymmetry::general) meta.symmetric_matrices.push_back("D");
  if (k.symmetry != MarketSymmetry::general) meta.symmetric_matrices.push_back("K");
  PortMatrices ports = read_ports(k.rows, io);
  meta.name = name.empty() ? fs::path(k_path).stem().string() : name;
  meta.order = k.rows;
  meta.ports = ports.B.cols();
  meta.random_input = ports.random_input;
  meta.random_output = ports.random_output;
  return {SecondOrderSystem(std::move(M), d.to_sparse(), k.to_sparse(), std::move(ports.B), std::move(ports.C)),
          meta};
}

namespace {

void ensure_directory(const std::string& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create directory " + directory + ": " + ec.message());
}

std::string join(const std::string& dir, const char* file) { return (fs::path(dir) / file).string(); }

}  // namespace

void save_system(const FirstOrderSystem& sys, const std::string& directory) {
  ensure_directory(directory);
  write_market(join(directory, "A.mtx"), sys.state_matrix());
  write_market(join(directory, "B.mtx"), sys.input());
  write_market(join(directory, "C.mtx"), sys.output());
}

void save_system(const SecondOrderSystem& sys, const std::string& directory) {
  ensure_directory(directory);
  if (sys.mass()) write_market(join(directory, "M.mtx"), *sys.mass());
  write_market(join(directory, "D.mtx"), sys.damping());
  write_market(join(directory, "K.mtx"), sys.stiffness());
  write_market(join(directory, "B.mtx"), sys.input());
  write_market(join(directory, "C.mtx"), sys.output());
}

// Reduced models -----------------------------------------------------------

ReductionMetadata make_metadata(const AbtlResult& result, bool second_order) {
  ReductionMetadata meta;
  meta.second_order = second_order;
  meta.iterations = result.model.iterations;
  meta.block_width = result.model.block_width;
  meta.converged = result.converged;
  meta.exhausted = result.exhausted;
  meta.shifts_right = result.state.shifts_right();
  meta.shifts_left = result.state.shifts_left();
  meta.directions_right = result.state.directions_right();
  meta.directions_left = result.state.directions_left();
  for (const auto& rec : result.history) {
    meta.residual_right.push_back(rec.residual_right);
    meta.residual_left.push_back(rec.residual_left);
  }
  return meta;
}

namespace {

json complex_json(cplx z) {
  const auto num = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
  };
  return json::array({num(z.real()), num(z.imag())});
}

double real_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorCode::parse, "bad number '" + s + "' in model.json");
  }
  return j.get<double>();
}

cplx complex_from_json(const json& j) { return {real_from_json(j.at(0)), real_from_json(j.at(1))}; }

json matrix_json(const ComplexMatrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(complex_json(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  ComplexMatrix M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j.at(r).size()) != cols) throw Error(ErrorCode::parse, "ragged matrix in model.json");
    for (Index c = 0; c < cols; ++c) M(r, c) = complex_from_json(j.at(r).at(c));
  }
  return M;
}

}  // namespace

void save_reduced(const AnyReducedModel& model, const ReductionMetadata& meta, const std::string& directory) {
  ensure_directory(directory);
  if (const auto* rm = std::get_if<ReducedModel>(&model)) {
    write_market(join(directory, "A.mtx"), rm->A);
    write_market(join(directory, "B.mtx"), rm->B);
    write_market(join(directory, "C.mtx"), rm->C);
  } else {
    const auto& so = std::get<SecondOrderReducedModel>(model);
    write_market(join(directory, "D.mtx"), so.D);
    write_market(join(directory, "K.mtx"), so.K);
    write_market(join(directory, "B.mtx"), so.B);
    write_market(join(directory, "C.mtx"), so.C);
  }

  json j;
  j["second_order"] = std::holds_alternative<SecondOrderReducedModel>(model);
  j["iterations"] = meta.iterations;
  j["block_width"] = meta.block_width;
  j["converged"] = meta.converged;
  j["exhausted"] = meta.exhausted;
  j["shifts_right"] = json::array();
  j["shifts_left"] = json::array();
  for (cplx z : meta.shifts_right) j["shifts_right"].push_back(complex_json(z));
  for (cplx z : meta.shifts_left) j["shifts_left"].push_back(complex_json(z));
  j["directions_right"] = json::array();
  j["directions_left"] = json::array();
  for (const auto& R : meta.directions_right) j["directions_right"].push_back(matrix_json(R));
  for (const auto& L : meta.directions_left) j["directions_left"].push_back(matrix_json(L));
  j["residual_right"] = meta.residual_right;
  j["residual_left"] = meta.residual_left;
  try {
    j["config"] = json::parse(meta.config_json.empty() ? "{}" : meta.config_json);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("config is not valid JSON: ") + e.what());
  }

  const std::string path = join(directory, "model.json");
  std::ofstream os = open_out(path);
  os << std::setprecision(17) << j.dump(2) << '\n';
  finish(os, path);
}

LoadedReducedModel load_reduced(const std::string& directory) {
  const std::string path = join(directory, "model.json");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }

  LoadedReducedModel out;
  ReductionMetadata& meta = out.metadata;
  try {
    meta.second_order = j.at("second_order").get<bool>();
    meta.iterations = j.at("iterations").get<Index>();
    meta.block_width = j.at("block_width").get<Index>();
    meta.converged = j.at("converged").get<bool>();
    meta.exhausted = j.value("exhausted", false);
    for (const auto& z : j.at("shifts_right")) meta.shifts_right.push_back(complex_from_json(z));
    for (const auto& z : j.at("shifts_left")) meta.shifts_left.push_back(complex_from_json(z));
    for (const auto& R : j.at("directions_right")) meta.directions_right.push_back(matrix_from_json(R));
    for (const auto& L : j.at("directions_left")) meta.directions_left.push_back(matrix_from_json(L));
    meta.residual_right = j.at("residual_right").get<std::vector<double>>();
    meta.residual_left = j.at("residual_left").get<std::vector<double>>();
    meta.config_json = j.contains("config") ? j.at("config").dump() : "{}";
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }

  const ComplexMatrix B = read_market_complex_dense(join(directory, "B.mtx"));
  const ComplexMatrix C = read_market_complex_dense(join(directory, "C.mtx"));
  if (meta.second_order) {
    SecondOrderReducedModel so;
    so.D = read_market_complex_dense(join(directory, "D.mtx"));
    so.K = read_market_complex_dense(join(directory, "K.mtx"));
    so.B = B;
    so.C = C;
    so.iterations = meta.iterations;
    so.block_width = meta.block_width;
    const Index k = so.K.rows();
    if (so.K.cols() != k || so.D.rows() != k || so.D.cols() != k || so.B.rows() != k || so.C.cols() != k ||
        so.C.rows() != so.B.cols()) {
      throw DimensionError(directory + ": reduced matrices have inconsistent sizes");
    }
    out.model = std::move(so);
  } else {
    ReducedModel rm;
    rm.A = read_market_complex_dense(join(directory, "A.mtx"));
    rm.B = B;
    rm.C = C;
    rm.iterations = meta.iterations;
    rm.block_width = meta.block_width;
    const Index k = rm.A.rows();
    if (rm.A.cols() != k || rm.B.rows() != k || rm.C.cols() != k || rm.C.rows() != rm.B.cols()) {
      throw DimensionError(directory + ": reduced matrices have inconsistent sizes");
    }
    out.model = std::move(rm);
  }
  return out;
}

}  // namespace abtl
