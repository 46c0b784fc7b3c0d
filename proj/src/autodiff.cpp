#include "gcnse/autodiff.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "gcnse/nn.hpp"

namespace gcnse::ad {

Tape::NodeId Tape::alloc(Tensor value, bool requires_grad) {
  Node node;
  node.stored = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_id(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw std::invalid_argument("Tape: bad node id");
  }
}

Tensor& Tape::grad_slot(NodeId id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty()) {
    const Tensor& v = value(id);
    n.grad = Tensor(v.rows(), v.cols());
  }
  return n.grad;
}

Tape::NodeId Tape::constant(Tensor value) { return alloc(std::move(value), false); }

Tape::NodeId Tape::constant_ref(const Tensor* value) {
  if (value == nullptr) throw std::invalid_argument("Tape::constant_ref: null tensor");
  Node node;
  node.ref = value;
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::parameter(const Tensor& value) { return alloc(value, true); }

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.cols() != bv.rows()) throw std::invalid_argument("Tape::matmul: inner dimensions disagree");
  const bool needs = requires_grad(a) || requires_grad(b);
  NodeId out = alloc(nn::detail::matmul(av, bv), needs);
  if (needs) {
    nodes_[out].backprop = [a, b, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      if (t.requires_grad(a)) nn::detail::add_matmul_bt(g, t.value(b), t.grad_slot(a));
      if (t.requires_grad(b)) nn::detail::add_matmul_at(t.value(a), g, t.grad_slot(b));
    };
  }
  return out;
}

Tape::NodeId Tape::spmm(const CsrMatrix* m, NodeId x) {
  if (m == nullptr) throw std::invalid_argument("Tape::spmm: null matrix");
  check_id(x);
  const bool needs = requires_grad(x);
  NodeId out = alloc(m->multiply(value(x)), needs);
  if (needs) {
    nodes_[out].backprop = [m, x, out](Tape& t) {
      Tensor gx = m->multiply_transposed(t.nodes_[out].grad);
      Tensor& slot = t.grad_slot(x);
      for (std::size_t i = 0; i < slot.size(); ++i) slot.data()[i] += gx.data()[i];
    };
  }
  return out;
}

Tape::NodeId Tape::relu(NodeId x) {
  check_id(x);
  Tensor v = value(x);
  nn::detail::relu_inplace(v);
  const bool needs = requires_grad(x);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    nodes_[out].backprop = [x, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      const Tensor& v = t.value(out);
      Tensor& slot = t.grad_slot(x);
      for (std::size_t i = 0; i < slot.size(); ++i) {
        if (v.data()[i] > 0.0) slot.data()[i] += g.data()[i];
      }
    };
  }
  return out;
}

Tape::NodeId Tape::sigmoid(NodeId x) {
  check_id(x);
  Tensor v = value(x);
  nn::detail::sigmoid_inplace(v);
  const bool needs = requires_grad(x);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    nodes_[out].backprop = [x, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      const Tensor& v = t.value(out);
      Tensor& slot = t.grad_slot(x);
      for (std::size_t i = 0; i < slot.size(); ++i) {
        const double s = v.data()[i];
        slot.data()[i] += g.data()[i] * s * (1.0 - s);
      }
    };
  }
  return out;
}

Tape::NodeId Tape::softmax_rows(NodeId x) {
  check_id(x);
  Tensor v = value(x);
  nn::detail::softmax_rows_inplace(v);
  const bool needs = requires_grad(x);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    nodes_[out].backprop = [x, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      const Tensor& s = t.value(out);
      Tensor& slot = t.grad_slot(x);
      for (int i = 0; i < s.rows(); ++i) {
        double dot = 0.0;
        for (int j = 0; j < s.cols(); ++j) dot += g(i, j) * s(i, j);
        for (int j = 0; j < s.cols(); ++j) slot(i, j) += s(i, j) * (g(i, j) - dot);
      }
    };
  }
  return out;
}

Tape::NodeId Tape::dropout(NodeId x, double rate, std::uint64_t seed, bool training) {
  check_id(x);
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("Tape::dropout: rate must be in [0,1)");
  if (!training || rate == 0.0) return x;
  const Tensor& xv = value(x);
  auto mask = std::make_shared<Tensor>(nn::detail::dropout_mask(xv.rows(), xv.cols(), rate, seed));
  Tensor v = xv;
  for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] *= mask->data()[i];
  const bool needs = requires_grad(x);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    nodes_[out].backprop = [x, out, mask](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      Tensor& slot = t.grad_slot(x);
      for (std::size_t i = 0; i < slot.size(); ++i) slot.data()[i] += g.data()[i] * mask->data()[i];
    };
  }
  return out;
}

Tape::NodeId Tape::add_row_vector(NodeId x, NodeId row) {
  check_id(x);
  check_id(row);
  const Tensor& xv = value(x);
  const Tensor& rv = value(row);
  if (rv.rows() != 1 || rv.cols() != xv.cols()) {
    throw std::invalid_argument("Tape::add_row_vector: row vector shape mismatch");
  }
  Tensor v = xv;
  for (int i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < v.cols(); ++j) v(i, j) += rv(0, j);
  }
  const bool needs = requires_grad(x) || requires_grad(row);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    nodes_[out].backprop = [x, row, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      if (t.requires_grad(x)) {
        Tensor& sx = t.grad_slot(x);
        for (std::size_t i = 0; i < sx.size(); ++i) sx.data()[i] += g.data()[i];
      }
      if (t.requires_grad(row)) {
        Tensor& sr = t.grad_slot(row);
        for (int i = 0; i < g.rows(); ++i) {
          for (int j = 0; j < g.cols(); ++j) sr(0, j) += g(i, j);
        }
      }
    };
  }
  return out;
}

Tape::NodeId Tape::mean_all_stack(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw std::invalid_argument("Tape::mean_all_stack: empty input list");
  bool needs = false;
  for (NodeId x : xs) {
    check_id(x);
    if (!value(x).same_shape(value(xs[0]))) {
      throw std::invalid_argument("Tape::mean_all_stack: shape mismatch");
    }
    needs = needs || requires_grad(x);
  }
  const double denom = static_cast<double>(value(xs[0]).size());
  Tensor v(static_cast<int>(xs.size()), 1);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const Tensor& xv = value(xs[t]);
    double sum = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) sum += xv.data()[i];
    v(static_cast<int>(t), 0) = sum / denom;
  }
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    auto inputs = std::make_shared<std::vector<NodeId>>(xs);
    nodes_[out].backprop = [inputs, denom, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      for (std::size_t k = 0; k < inputs->size(); ++k) {
        const NodeId x = (*inputs)[k];
        if (!t.requires_grad(x)) continue;
        const double gv = g(static_cast<int>(k), 0) / denom;
        Tensor& slot = t.grad_slot(x);
        for (std::size_t i = 0; i < slot.size(); ++i) slot.data()[i] += gv;
      }
    };
  }
  return out;
}

Tape::NodeId Tape::weighted_sum(const std::vector<NodeId>& xs, NodeId w) {
  if (xs.empty()) throw std::invalid_argument("Tape::weighted_sum: empty input list");
  check_id(w);
  const Tensor& wv = value(w);
  if (wv.cols() != 1 || wv.rows() != static_cast<int>(xs.size())) {
    throw std::invalid_argument("Tape::weighted_sum: weight length mismatch");
  }
  bool needs = requires_grad(w);
  for (NodeId x : xs) {
    check_id(x);
    if (!value(x).same_shape(value(xs[0]))) {
      throw std::invalid_argument("Tape::weighted_sum: shape mismatch");
    }
    needs = needs || requires_grad(x);
  }
  const bool w_fixed = !requires_grad(w);
  Tensor v(value(xs[0]).rows(), value(xs[0]).cols());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double wt = wv(static_cast<int>(t), 0);
    if (w_fixed && wt == 0.0) continue;
    const Tensor& xv = value(xs[t]);
    for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] += wt * xv.data()[i];
  }
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    auto inputs = std::make_shared<std::vector<NodeId>>(xs);
    nodes_[out].backprop = [inputs, w, w_fixed, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      const Tensor& wv = t.value(w);
      for (std::size_t k = 0; k < inputs->size(); ++k) {
        const NodeId x = (*inputs)[k];
        const double wt = wv(static_cast<int>(k), 0);
        if (t.requires_grad(x) && !(w_fixed && wt == 0.0)) {
          Tensor& slot = t.grad_slot(x);
          for (std::size_t i = 0; i < slot.size(); ++i) slot.data()[i] += wt * g.data()[i];
        }
        if (!w_fixed) {
          const Tensor& xv = t.value(x);
          double dot = 0.0;
          for (std::size_t i = 0; i < xv.size(); ++i) dot += xv.data()[i] * g.data()[i];
          t.grad_slot(w)(static_cast<int>(k), 0) += dot;
        }
      }
    };
  }
  return out;
}

Tape::NodeId Tape::concat_cols(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.rows() != bv.rows()) throw std::invalid_argument("Tape::concat_cols: row count mismatch");
  Tensor v(av.rows(), av.cols() + bv.cols());
  for (int i = 0; i < av.rows(); ++i) {
    for (int j = 0; j < av.cols(); ++j) v(i, j) = av(i, j);
    for (int j = 0; j < bv.cols(); ++j) v(i, av.cols() + j) = bv(i, j);
  }
  const bool needs = requires_grad(a) || requires_grad(b);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    const int ca = av.cols();
    nodes_[out].backprop = [a, b, ca, out](Tape& t) {
      const Tensor& g = t.nodes_[out].grad;
      if (t.requires_grad(a)) {
        Tensor& sa = t.grad_slot(a);
        for (int i = 0; i < sa.rows(); ++i) {
          for (int j = 0; j < sa.cols(); ++j) sa(i, j) += g(i, j);
        }
      }
      if (t.requires_grad(b)) {
        Tensor& sb = t.grad_slot(b);
        for (int i = 0; i < sb.rows(); ++i) {
          for (int j = 0; j < sb.cols(); ++j) sb(i, j) += g(i, ca + j);
        }
      }
    };
  }
  return out;
}

Tape::NodeId Tape::cross_entropy_masked(NodeId probs, std::vector<int> labels, std::vector<int> mask) {
  check_id(probs);
  const double loss = nn::cross_entropy_masked(value(probs), labels, mask);
  Tensor v(1, 1);
  v(0, 0) = loss;
  const bool needs = requires_grad(probs);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    auto lbl = std::make_shared<std::vector<int>>(std::move(labels));
    auto msk = std::make_shared<std::vector<int>>(std::move(mask));
    nodes_[out].backprop = [probs, lbl, msk, out](Tape& t) {
      const double gout = t.nodes_[out].grad(0, 0);
      const Tensor& p = t.value(probs);
      Tensor& slot = t.grad_slot(probs);
      const double inv = 1.0 / static_cast<double>(msk->size());
      for (int i : *msk) {
        const double pv = p(i, (*lbl)[i]);
        if (pv > nn::kProbClamp) slot(i, (*lbl)[i]) -= gout * inv / pv;
      }
    };
  }
  return out;
}

Tape::NodeId Tape::sum_all(NodeId x) {
  check_id(x);
  const Tensor& xv = value(x);
  Tensor v(1, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) sum += xv.data()[i];
  v(0, 0) = sum;
  const bool needs = requires_grad(x);
  NodeId out = alloc(std::move(v), needs);
  if (needs) {
    nodes_[out].backprop = [x, out](Tape& t) {
      const double g = t.nodes_[out].grad(0, 0);
      Tensor& slot = t.grad_slot(x);
      for (std::size_t i = 0; i < slot.size(); ++i) slot.data()[i] += g;
    };
  }
  return out;
}

void Tape::backward(NodeId loss) {
  check_id(loss);
  if (swept_) throw std::logic_error("Tape::backward: tape already swept");
  const Tensor& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw std::invalid_argument("Tape::backward: loss must be scalar");
  swept_ = true;
  grad_slot(loss)(0, 0) = 1.0;
  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.backprop && n.requires_grad && !n.grad.empty()) n.backprop(*this);
  }
}

}  // namespace gcnse::ad
