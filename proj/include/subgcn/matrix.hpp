#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace subgcn {

using Index = std::uint32_t;

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;
  double frobenius_norm() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// a row and no stored value is zero.
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_(1, 0) {}
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  // Duplicate coordinates are summed; entries that sum to zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const Index> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t r, std::size_t c) const;
  double row_sum(std::size_t r) const;

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  std::vector<Triplet> triplets() const;

  // Same entries, wider column space. new_cols must be >= cols().
  SparseMatrix with_cols(std::size_t new_cols) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// OpenMP kernels. Each output row is produced by one thread with a fixed
// summation order, so results are bitwise identical for any thread count.
namespace kernels {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a * b^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

void relu_inplace(DenseMatrix& m);
// grad *= (pre > 0)
void relu_backward_inplace(DenseMatrix& grad, const DenseMatrix& pre);
void add_inplace(DenseMatrix& dst, const DenseMatrix& src);
// dst -= step * src
void sgd_step(DenseMatrix& dst, const DenseMatrix& src, double step);

}  // namespace kernels

// Serial reference versions of the kernels above, kept for tests and the
// benchmark. Same summation order, so they agree bitwise with the parallel
// versions.
namespace reference {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace reference

double l1_distance(std::span<const double> a, std::span<const double> b);

// Text formats.
//   dense:  "rows cols" then one row per line, whitespace separated
//   sparse: "rows cols nnz" then "row col value" per line sorted by (row, col)
// Values are written in shortest round-trip form, so reloading is bit-exact.
void write_dense(std::ostream& out, const DenseMatrix& m);
void write_sparse(std::ostream& out, const SparseMatrix& m);
DenseMatrix read_dense(std::istream& in);
SparseMatrix read_sparse(std::istream& in);

void save_dense(const std::filesystem::path& path, const DenseMatrix& m);
void save_sparse(const std::filesystem::path& path, const SparseMatrix& m);
DenseMatrix load_dense(const std::filesystem::path& path);
SparseMatrix load_sparse(const std::filesystem::path& path);

}  // namespace subgcn
