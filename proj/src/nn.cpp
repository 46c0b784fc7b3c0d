#include "gcnse/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gcnse::nn {

namespace detail {

void add_matmul(const Tensor& a, const Tensor& b, Tensor& out) {
  const int n = a.rows(), k = a.cols(), w = b.cols();
  for (int i = 0; i < n; ++i) {
    const double* arow = a.data() + static_cast<std::size_t>(i) * k;
    double* orow = out.data() + static_cast<std::size_t>(i) * w;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b.data() + static_cast<std::size_t>(p) * w;
      for (int j = 0; j < w; ++j) orow[j] += av * brow[j];
    }
  }
}

void add_matmul_at(const Tensor& a, const Tensor& g, Tensor& out) {
  const int n = a.rows(), k = a.cols(), w = g.cols();
  for (int i = 0; i < n; ++i) {
    const double* arow = a.data() + static_cast<std::size_t>(i) * k;
    const double* grow = g.data() + static_cast<std::size_t>(i) * w;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* orow = out.data() + static_cast<std::size_t>(p) * w;
      for (int j = 0; j < w; ++j) orow[j] += av * grow[j];
    }
  }
}

void add_matmul_bt(const Tensor& g, const Tensor& b, Tensor& out) {
  const int n = g.rows(), w = g.cols(), k = b.rows();
  for (int i = 0; i < n; ++i) {
    const double* grow = g.data() + static_cast<std::size_t>(i) * w;
    double* orow = out.data() + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double* brow = b.data() + static_cast<std::size_t>(p) * w;
      double acc = 0.0;
      for (int j = 0; j < w; ++j) acc += grow[j] * brow[j];
      orow[p] += acc;
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), b.cols());
  add_matmul(a, b, out);
  return out;
}

void relu_inplace(Tensor& x) {
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = std::max(0.0, x.data()[i]);
}

void sigmoid_inplace(Tensor& x) {
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = 1.0 / (1.0 + std::exp(-x.data()[i]));
}

void softmax_rows_inplace(Tensor& x) {
  for (int i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
}

Tensor dropout_mask(int rows, int cols, double rate, std::uint64_t seed) {
  Tensor mask = Tensor::full(rows, cols, 1.0);
  if (rate <= 0.0) return mask;
  const double scale = 1.0 / (1.0 - rate);
  Rng rng(seed);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.bernoulli(rate) ? 0.0 : scale;
  }
  return mask;
}

}  // namespace detail

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions disagree");
  require_finite(a, "matmul lhs");
  require_finite(b, "matmul rhs");
  return detail::matmul(a, b);
}

Tensor spmm(const CsrMatrix& m, const Tensor& x) {
  require_finite(x, "spmm rhs");
  return m.multiply(x);
}

Tensor relu(const Tensor& x) {
  require_finite(x, "relu input");
  Tensor out = x;
  detail::relu_inplace(out);
  return out;
}

Tensor sigmoid(const Tensor& x) {
  require_finite(x, "sigmoid input");
  Tensor out = x;
  detail::sigmoid_inplace(out);
  return out;
}

Tensor softmax_rows(const Tensor& x) {
  require_finite(x, "softmax input");
  if (x.cols() < 1) throw std::invalid_argument("softmax_rows: empty rows");
  Tensor out = x;
  detail::softmax_rows_inplace(out);
  return out;
}

Tensor dropout(const Tensor& x, double rate, std::uint64_t seed, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0,1)");
  require_finite(x, "dropout input");
  if (!training || rate == 0.0) return x;
  Tensor mask = detail::dropout_mask(x.rows(), x.cols(), rate, seed);
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= mask.data()[i];
  return out;
}

double cross_entropy_masked(const Tensor& probs, const std::vector<int>& labels,
                            const std::vector<int>& mask) {
  if (mask.empty()) throw std::invalid_argument("cross_entropy_masked: empty mask");
  if (static_cast<int>(labels.size()) != probs.rows()) {
    throw std::invalid_argument("cross_entropy_masked: labels length mismatch");
  }
  require_finite(probs, "cross_entropy probs");
  double total = 0.0;
  for (int i : mask) {
    if (i < 0 || i >= probs.rows()) throw std::invalid_argument("cross_entropy_masked: mask index out of range");
    if (labels[i] < 0 || labels[i] >= probs.cols()) {
      throw std::invalid_argument("cross_entropy_masked: label out of range");
    }
    double row_sum = 0.0;
    for (double v : probs.row(i)) row_sum += v;
    if (std::abs(row_sum - 1.0) > 1e-6) {
      throw std::invalid_argument("cross_entropy_masked: masked row does not sum to 1");
    }
    total += -std::log(std::max(probs(i, labels[i]), kProbClamp));
  }
  return total / static_cast<double>(mask.size());
}

Tensor glorot_init(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("glorot_init: dims must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-bound, bound);
  return t;
}

AdamState::AdamState(const std::vector<const Tensor*>& params, AdamConfig config) : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor* p : params) {
    m_.emplace_back(p->rows(), p->cols());
    v_.emplace_back(p->rows(), p->cols());
  }
}

void AdamState::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("AdamState::step: parameter count mismatch");
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, step_);
  const double bc2 = 1.0 - std::pow(config_.beta2, step_);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = *grads[k];
    if (!p.same_shape(m_[k]) || !g.same_shape(m_[k])) {
      throw std::invalid_argument("AdamState::step: shape mismatch");
    }
    double* pm = m_[k].data();
    double* pv = v_[k].data();
    double* pp = p.data();
    const double* pg = g.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      pm[i] = config_.beta1 * pm[i] + (1.0 - config_.beta1) * pg[i];
      pv[i] = config_.beta2 * pv[i] + (1.0 - config_.beta2) * pg[i] * pg[i];
      const double mhat = pm[i] / bc1;
      const double vhat = pv[i] / bc2;
      pp[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
    require_finite(p, "AdamState::step parameters");
  }
}

}  // namespace gcnse::nn
