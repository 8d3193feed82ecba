#include "subgcn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "subgcn/error.hpp"
#include "text_util.hpp"

namespace subgcn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::validation, std::string("dimension mismatch in ") + what);
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols)
      throw Error(ErrorKind::validation, "sparse entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                             ") out of range for " + std::to_string(rows) + "x" +
                                             std::to_string(cols));
  }
  // stable: duplicates are summed in insertion order
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  SparseMatrix m(rows, cols);
  std::size_t i = 0;
  while (i < triplets.size()) {
    const Index r = triplets[i].row;
    const Index c = triplets[i].col;
    double sum = 0.0;
    for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) sum += triplets[i].value;
    if (sum != 0.0) {
      m.col_idx_.push_back(c);
      m.values_.push_back(sum);
      ++m.row_ptr_[r + 1];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.col_idx_.resize(n);
  m.values_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_idx_[i] = static_cast<Index>(i);
    m.row_ptr_[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  SparseMatrix m(dense.rows(), dense.cols());
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        m.col_idx_.push_back(static_cast<Index>(c));
        m.values_.push_back(dense(r, c));
      }
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<Index>(c));
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

double SparseMatrix::row_sum(std::size_t r) const {
  double s = 0.0;
  for (double v : row_values(r)) s += v;
  return s;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  for (std::size_t r = 0; r < cols_; ++r) t.row_ptr_[r + 1] += t.row_ptr_[r];
  std::vector<std::size_t> cursor(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::size_t dst = cursor[col_idx_[k]]++;
      t.col_idx_[dst] = static_cast<Index>(r);
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
  }
  return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.push_back({static_cast<Index>(r), col_idx_[k], values_[k]});
  }
  return out;
}

SparseMatrix SparseMatrix::with_cols(std::size_t new_cols) const {
  if (new_cols < cols_) throw Error(ErrorKind::validation, "cannot shrink sparse matrix columns");
  SparseMatrix m = *this;
  m.cols_ = new_cols;
  return m;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

namespace kernels {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "spmm");
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    double* dst = out.row(i).data();
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double v = vals[k];
      const double* src = b.row(cols[k]).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul");
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t n = b.cols();
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    double* dst = out.row(i).data();
    const double* arow = a.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double v = arow[k];
      if (v == 0.0) continue;
      const double* src = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_tn");
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t inner = a.rows();
  const std::size_t n = b.cols();
  const auto rows = static_cast<std::int64_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    double* dst = out.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double v = a(k, i);
      if (v == 0.0) continue;
      const double* src = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_nt");
  DenseMatrix out(a.rows(), b.rows());
  const std::size_t inner = a.cols();
  const std::size_t n = b.rows();
  const auto rows = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* arow = a.row(i).data();
    double* dst = out.row(i).data();
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += arow[k] * brow[k];
      dst[j] = s;
    }
  }
  return out;
}

void relu_inplace(DenseMatrix& m) {
  auto v = m.values();
  const auto n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void relu_backward_inplace(DenseMatrix& grad, const DenseMatrix& pre) {
  require(grad.rows() == pre.rows() && grad.cols() == pre.cols(), "relu_backward");
  auto g = grad.values();
  auto p = pre.values();
  const auto n = static_cast<std::int64_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(p[i] > 0.0)) g[i] = 0.0;
  }
}

void add_inplace(DenseMatrix& dst, const DenseMatrix& src) {
  require(dst.rows() == src.rows() && dst.cols() == src.cols(), "add");
  auto d = dst.values();
  auto s = src.values();
  const auto n = static_cast<std::int64_t>(d.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) d[i] += s[i];
}

void sgd_step(DenseMatrix& dst, const DenseMatrix& src, double step) {
  require(dst.rows() == src.rows() && dst.cols() == src.cols(), "sgd_step");
  auto d = dst.values();
  auto s = src.values();
  const auto n = static_cast<std::int64_t>(d.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) d[i] -= step * s[i];
}

}  // namespace kernels

namespace reference {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "spmm");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += vals[k] * b(cols[k], j);
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_tn");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t k = 0; k < a.rows(); ++k) {
      if (a(k, i) == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(k, i) * b(k, j);
    }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_nt");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      out(i, j) = s;
    }
  return out;
}

}  // namespace reference

void write_dense(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << detail::format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_sparse(std::ostream& out, const SparseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << r << ' ' << cols[k] << ' ' << detail::format_double(vals[k]) << '\n';
  }
}

namespace {

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw Error(ErrorKind::parse, std::string("unexpected end of input reading ") + what);
  return tok;
}

std::size_t next_size(std::istream& in, const char* what) {
  auto tok = next_token(in, what);
  auto v = detail::parse_int<std::size_t>(tok);
  if (!v) throw Error(ErrorKind::parse, std::string("bad integer '") + tok + "' in " + what);
  return *v;
}

double next_double(std::istream& in, const char* what) {
  auto tok = next_token(in, what);
  auto v = detail::parse_double(tok);
  if (!v) throw Error(ErrorKind::parse, std::string("bad number '") + tok + "' in " + what);
  return *v;
}

}  // namespace

DenseMatrix read_dense(std::istream& in) {
  const std::size_t rows = next_size(in, "dense header");
  const std::size_t cols = next_size(in, "dense header");
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = next_double(in, "dense body");
  return m;
}

SparseMatrix read_sparse(std::istream& in) {
  const std::size_t rows = next_size(in, "sparse header");
  const std::size_t cols = next_size(in, "sparse header");
  const std::size_t nnz = next_size(in, "sparse header");
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::size_t i = 0; i < nnz; ++i) {
    auto r = next_size(in, "sparse body");
    auto c = next_size(in, "sparse body");
    auto v = next_double(in, "sparse body");
    if (r >= rows || c >= cols) throw Error(ErrorKind::parse, "sparse entry out of range");
    t.push_back({static_cast<Index>(r), static_cast<Index>(c), v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

void save_dense(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = detail::open_output(path.string());
  write_dense(out, m);
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

void save_sparse(const std::filesystem::path& path, const SparseMatrix& m) {
  auto out = detail::open_output(path.string());
  write_sparse(out, m);
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

DenseMatrix load_dense(const std::filesystem::path& path) {
  auto in = detail::open_input(path.string());
  return read_dense(in);
}

SparseMatrix load_sparse(const std::filesystem::path& path) {
  auto in = detail::open_input(path.string());
  return read_sparse(in);
}

}  // namespace subgcn
