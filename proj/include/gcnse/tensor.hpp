#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gcnse {

/// Dense row-major matrix of doubles. Rank <= 2: vectors are stored as
/// n x 1 (column) or 1 x n (row) tensors.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols);
  Tensor(int rows, int cols, std::vector<double> values);

  static Tensor identity(int n);
  static Tensor full(int rows, int cols, double value);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor column(std::span<const double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<const double> row(int r) const { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const;
  void fill(double value);

  std::vector<double> to_vector() const { return data_; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Throws std::invalid_argument when the tensor carries NaN/Inf.
void require_finite(const Tensor& t, const char* what);

}  // namespace gcnse
