#pragma once

#include <vector>

#include "gcnse/tensor.hpp"

namespace gcnse {

/// Compressed sparse row matrix. Column indices are sorted within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  // entries must be unique (row, col) pairs; they are sorted internally.
  static CsrMatrix from_entries(int rows, int cols,
                                std::vector<int> entry_rows,
                                std::vector<int> entry_cols,
                                std::vector<double> entry_values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x, x dense with rows() == A.cols().
  Tensor multiply(const Tensor& x) const;

  /// y = A^T x, x dense with rows() == A.rows().
  Tensor multiply_transposed(const Tensor& x) const;

  Tensor to_dense() const;

  double at(int r, int c) const;

  bool is_symmetric(double tol = 0.0) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

}  // namespace gcnse
