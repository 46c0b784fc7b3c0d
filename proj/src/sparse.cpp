#include "gcnse/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gcnse {

CsrMatrix CsrMatrix::from_entries(int rows, int cols, std::vector<int> entry_rows,
                                  std::vector<int> entry_cols, std::vector<double> entry_values) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("CsrMatrix: negative dimension");
  const std::size_t n = entry_values.size();
  if (entry_rows.size() != n || entry_cols.size() != n) {
    throw std::invalid_argument("CsrMatrix: entry array length mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (entry_rows[k] < 0 || entry_rows[k] >= rows || entry_cols[k] < 0 || entry_cols[k] >= cols) {
      throw std::invalid_argument("CsrMatrix: entry index out of range");
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (entry_rows[a] != entry_rows[b]) return entry_rows[a] < entry_rows[b];
    return entry_cols[a] < entry_cols[b];
  });

  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col_idx_.resize(n);
  m.values_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    if (k > 0) {
      const std::size_t prev = order[k - 1];
      if (entry_rows[prev] == entry_rows[src] && entry_cols[prev] == entry_cols[src]) {
        throw std::invalid_argument("CsrMatrix: duplicate entry");
      }
    }
    m.col_idx_[k] = entry_cols[src];
    m.values_[k] = entry_values[src];
    m.row_ptr_[static_cast<std::size_t>(entry_rows[src]) + 1]++;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

Tensor CsrMatrix::multiply(const Tensor& x) const {
  if (x.rows() != cols_) throw std::invalid_argument("CsrMatrix::multiply: shape mismatch");
  const int w = x.cols();
  Tensor y(rows_, w);
  for (int i = 0; i < rows_; ++i) {
    double* out = y.data() + static_cast<std::size_t>(i) * w;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const double v = values_[k];
      const double* in = x.data() + static_cast<std::size_t>(col_idx_[k]) * w;
      for (int j = 0; j < w; ++j) out[j] += v * in[j];
    }
  }
  return y;
}

Tensor CsrMatrix::multiply_transposed(const Tensor& x) const {
  if (x.rows() != rows_) throw std::invalid_argument("CsrMatrix::multiply_transposed: shape mismatch");
  const int w = x.cols();
  Tensor y(cols_, w);
  for (int i = 0; i < rows_; ++i) {
    const double* in = x.data() + static_cast<std::size_t>(i) * w;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const double v = values_[k];
      double* out = y.data() + static_cast<std::size_t>(col_idx_[k]) * w;
      for (int j = 0; j < w; ++j) out[j] += v * in[j];
    }
  }
  return y;
}

Tensor CsrMatrix::to_dense() const {
  Tensor d(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  }
  return d;
}

double CsrMatrix::at(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("CsrMatrix::at");
  for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
    if (col_idx_[k] == c) return values_[k];
  }
  return 0.0;
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (std::abs(at(col_idx_[k], i) - values_[k]) > tol) return false;
    }
  }
  return true;
}

}  // namespace gcnse
