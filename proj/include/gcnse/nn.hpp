#pragma once

#include <cstdint>
#include <vector>

#include "gcnse/rng.hpp"
#include "gcnse/sparse.hpp"
#include "gcnse/tensor.hpp"

namespace gcnse::nn {

Tensor matmul(const Tensor& a, const Tensor& b);

/// Equals matmul(m.to_dense(), x).
Tensor spmm(const CsrMatrix& m, const Tensor& x);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Row-wise softmax, max-shifted for stability.
Tensor softmax_rows(const Tensor& x);

/// Inverted dropout: zero with probability `rate`, scale survivors by
/// 1/(1-rate). Identity in eval mode. Deterministic per seed.
Tensor dropout(const Tensor& x, double rate, std::uint64_t seed, bool training);

/// Mean over masked nodes of -ln(probs[i][labels[i]]), probabilities clamped
/// below at 1e-12. Masked rows must sum to 1 within 1e-6.
double cross_entropy_masked(const Tensor& probs, const std::vector<int>& labels,
                            const std::vector<int>& mask);

/// Uniform on [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))].
Tensor glorot_init(int rows, int cols, std::uint64_t seed);

constexpr double kProbClamp = 1e-12;

struct AdamConfig {
  double learning_rate = 0.0025;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Standard Adam with bias correction. One step() advances the shared
/// iteration counter for all parameter tensors.
class AdamState {
 public:
  AdamState(const std::vector<const Tensor*>& params, AdamConfig config);

  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

  int step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const Tensor& first_moment(std::size_t i) const { return m_[i]; }
  const Tensor& second_moment(std::size_t i) const { return v_[i]; }

 private:
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  int step_ = 0;
};

// Unchecked kernels for inner loops over already-validated data.
namespace detail {

// out += a * b, skipping zero entries of a (a is often a sparsely populated
// dense matrix such as a materialized adjacency).
void add_matmul(const Tensor& a, const Tensor& b, Tensor& out);
// out += a^T * g
void add_matmul_at(const Tensor& a, const Tensor& g, Tensor& out);
// out += g * b^T
void add_matmul_bt(const Tensor& g, const Tensor& b, Tensor& out);

Tensor matmul(const Tensor& a, const Tensor& b);
void relu_inplace(Tensor& x);
void sigmoid_inplace(Tensor& x);
void softmax_rows_inplace(Tensor& x);
Tensor dropout_mask(int rows, int cols, double rate, std::uint64_t seed);

}  // namespace detail

}  // namespace gcnse::nn
