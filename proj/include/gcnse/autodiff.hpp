#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gcnse/sparse.hpp"
#include "gcnse/tensor.hpp"

namespace gcnse::ad {

/// Reverse-mode tape for the fixed set of primitives the model composes.
/// Nodes are recorded in topological order; backward() visits them once in
/// reverse, so every gradient is accumulated exactly once per pass. A tape
/// belongs to a single training iteration and is not shared across tasks.
class Tape {
 public:
  using NodeId = std::int32_t;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  NodeId constant(Tensor value);
  /// Constant held by pointer; the caller keeps it alive past backward().
  NodeId constant_ref(const Tensor* value);
  NodeId parameter(const Tensor& value);

  NodeId matmul(NodeId a, NodeId b);
  /// The sparse matrix is a constant; the caller keeps it alive.
  NodeId spmm(const CsrMatrix* m, NodeId x);
  NodeId relu(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId softmax_rows(NodeId x);
  /// Identity when !training or rate == 0 (returns x itself).
  NodeId dropout(NodeId x, double rate, std::uint64_t seed, bool training);
  NodeId add_row_vector(NodeId x, NodeId row);
  /// Stacks per-input global means into a column vector (squeeze pooling).
  NodeId mean_all_stack(const std::vector<NodeId>& xs);
  /// sum_t w[t] * xs[t] with w a column vector. Entries of a constant w that
  /// are exactly zero contribute nothing and are skipped.
  NodeId weighted_sum(const std::vector<NodeId>& xs, NodeId w);
  NodeId concat_cols(NodeId a, NodeId b);
  NodeId cross_entropy_masked(NodeId probs, std::vector<int> labels, std::vector<int> mask);
  NodeId sum_all(NodeId x);

  const Tensor& value(NodeId id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    return n.ref != nullptr ? *n.ref : n.stored;
  }
  /// Empty tensor when the node never received gradient.
  const Tensor& grad(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
  bool requires_grad(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

  /// Seeds d(loss)/d(loss) = 1 and sweeps the tape once in reverse. The loss
  /// node must be scalar (1x1).
  void backward(NodeId loss);

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor stored;
    const Tensor* ref = nullptr;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&)> backprop;
  };

  std::vector<Node> nodes_;
  bool swept_ = false;

  NodeId alloc(Tensor value, bool requires_grad);
  Tensor& grad_slot(NodeId id);
  void check_id(NodeId id) const;
};

}  // namespace gcnse::ad
