#include "gcnse/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gcnse {

Tensor::Tensor(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Tensor: negative dimension");
}

Tensor::Tensor(int rows, int cols, std::vector<double> values) : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Tensor: negative dimension");
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("Tensor: value count does not match shape");
  }
}

Tensor Tensor::identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor Tensor::full(int rows, int cols, double value) {
  Tensor t(rows, cols);
  t.fill(value);
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Tensor t(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw std::invalid_argument("Tensor::from_rows: ragged rows");
    int j = 0;
    for (double v : row) t(i, j++) = v;
    ++i;
  }
  return t;
}

Tensor Tensor::column(std::span<const double> values) {
  Tensor t(static_cast<int>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) t.data()[i] = values[i];
  return t;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

void require_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

}  // namespace gcnse
