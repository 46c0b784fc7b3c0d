#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcnse/autodiff.hpp"
#include "gcnse/graph.hpp"
#include "gcnse/tensor.hpp"

namespace gcnse {

/// How snapshot embeddings are combined across time.
struct WeightingScheme {
  enum class Kind { LearnedSe, LearnedSeDual, Uniform, ExpDecay, Frozen };

  Kind kind = Kind::LearnedSe;
  double lambda = 0.5;                 // ExpDecay only
  std::vector<double> frozen_weights;  // Frozen only; nonnegative, length T

  static WeightingScheme learned_se() { return {Kind::LearnedSe, 0.5, {}}; }
  static WeightingScheme learned_se_dual() { return {Kind::LearnedSeDual, 0.5, {}}; }
  static WeightingScheme uniform() { return {Kind::Uniform, 0.5, {}}; }
  static WeightingScheme exp_decay(double lambda);
  static WeightingScheme frozen(std::vector<double> weights);

  bool is_learned() const { return kind == Kind::LearnedSe || kind == Kind::LearnedSeDual; }
  bool is_dual() const { return kind == Kind::LearnedSeDual; }
  /// Combination weights for fixed schemes; throws for learned kinds.
  std::vector<double> fixed_weights(int timesteps) const;

  std::string name() const;
  static WeightingScheme from_name(const std::string& name, double lambda = 0.5,
                                   std::vector<double> frozen = {});
};

/// w_t = 1/T.
std::vector<double> uniform_weights(int timesteps);
/// w_t = lambda^(T-1-t); the most recent snapshot gets weight 1. lambda in (0,1].
std::vector<double> exp_decay_weights(int timesteps, double lambda);

struct TrainConfig {
  double learning_rate = 0.0025;
  int iterations = 500;
  double dropout = 0.5;
  double se_ratio = 0.5;  // SE hidden size L = max(1, ceil(se_ratio * T))
  bool fc_bias = true;
  // When true, the combination path recomputes the convolutions with its own
  // dropout masks instead of reusing the squeeze path's embeddings.
  bool separate_combine_dropout = false;
  double train_ratio = 0.7;
  double val_ratio = 0.2;
  double test_ratio = 0.1;
};

/// All trainable tensors. Hidden width equals the class count; the SE hidden
/// size is max(1, ceil(se_ratio * T)). The attr_* tensors exist only for the
/// dual variant, the se_* tensors only for learned schemes, fc_b only when
/// fc_bias is set.
struct GcnSeParams {
  Tensor conv1, conv2;
  Tensor se_w1, se_w2;
  Tensor attr_conv1, attr_conv2;
  Tensor attr_se_w1, attr_se_w2;
  Tensor fc_w, fc_b;

  int hidden = 0;
  int se_hidden = 0;
  int timesteps = 0;
  int input_dim = 0;
  int attr_input_dim = 0;
  bool dual = false;

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  GcnSeParams zeros_like() const;
};

struct ForwardResult {
  Tensor probs;                        // N x C, rows sum to 1
  std::vector<double> attention;       // length T
  std::vector<double> attention_attr;  // dual variant only
};

struct IterationStats {
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  GcnSeParams params;
  std::vector<double> attention;
  std::vector<double> attention_attr;
  std::vector<IterationStats> history;
  int best_iteration = -1;
  double best_val_accuracy = 0.0;
};

/// Binds a graph to per-timestep normalized adjacencies and cached constant
/// inputs. Immutable after construction; forward passes are const.
class GcnSeModel {
 public:
  GcnSeModel(const DynamicGraph& graph, WeightingScheme scheme, TrainConfig config);

  GcnSeParams init_params(std::uint64_t seed) const;

  /// Forward pass with the tensors treated as constants (no gradients).
  ForwardResult forward(const GcnSeParams& params, std::uint64_t dropout_seed, bool training) const;

  /// Training loss and gradients for one iteration; grads mirrors params.
  double loss_and_gradients(const GcnSeParams& params, std::uint64_t dropout_seed,
                            const std::vector<int>& labels, const std::vector<int>& mask,
                            GcnSeParams& grads) const;

  /// Loss only (used by the finite-difference oracle).
  double loss(const GcnSeParams& params, std::uint64_t dropout_seed, bool training,
              const std::vector<int>& labels, const std::vector<int>& mask) const;

  const DynamicGraph& graph() const { return *graph_; }
  const WeightingScheme& scheme() const { return scheme_; }
  const TrainConfig& config() const { return config_; }
  const NormalizedAdjacency& adjacency(int t) const { return adjacency_[t]; }

 private:
  struct Built {
    ad::Tape::NodeId probs = -1;
    ad::Tape::NodeId loss = -1;
    ad::Tape::NodeId attention = -1;
    ad::Tape::NodeId attention_attr = -1;
    std::vector<ad::Tape::NodeId> param_nodes;  // parallel to params.tensors()
  };

  Built build(ad::Tape& tape, const GcnSeParams& params, bool trainable, std::uint64_t dropout_seed,
              bool training, const std::vector<int>* labels, const std::vector<int>* mask) const;

  const DynamicGraph* graph_;
  WeightingScheme scheme_;
  TrainConfig config_;
  std::vector<NormalizedAdjacency> adjacency_;
  std::vector<Tensor> propagated_input_;       // adj_t * Z0 for the primary stream
  std::vector<Tensor> propagated_attr_input_;  // adj_t * X_t for the dual attr stream
  std::vector<double> fixed_weights_;          // fixed schemes only
  std::vector<char> skip_;                     // fixed-scheme timesteps with zero weight
};

/// Full-batch Adam on the masked cross-entropy against final-timestep labels.
/// Returns the parameters (and attention) from the iteration with the best
/// validation accuracy.
TrainResult train(const DynamicGraph& graph, const TrainConfig& config, const WeightingScheme& scheme,
                  const NodeSplit& split, std::uint64_t seed);

/// Row-wise argmax of forward probabilities in eval mode; ties resolve to the
/// lowest class index.
std::vector<int> predict(const GcnSeParams& params, const DynamicGraph& graph,
                         const WeightingScheme& scheme, const TrainConfig& config = {});

std::vector<int> argmax_rows(const Tensor& probs);

/// One graph convolution: activation(spmm(adj, z) * w).
Tensor gcn_layer(const NormalizedAdjacency& adj, const Tensor& z, const Tensor& w,
                 bool relu_activation = true);

/// Global average pooling per snapshot: c_t is the mean over all N*h entries
/// of embedding t.
std::vector<double> squeeze(std::span<const Tensor> embeddings);

/// sigmoid(se_w2 * relu(se_w1 * c)); every output lies in (0, 1).
std::vector<double> excitation(std::span<const double> channel_means, const Tensor& se_w1,
                               const Tensor& se_w2);

/// sum_t weights[t] * embeddings[t]; exact zeros contribute nothing.
Tensor combine(std::span<const Tensor> embeddings, std::span<const double> weights);

ForwardResult forward(const DynamicGraph& graph, const GcnSeParams& params,
                      const WeightingScheme& scheme, std::uint64_t seed, bool training,
                      const TrainConfig& config = {});

struct LoadedModel {
  GcnSeParams params;
  WeightingScheme scheme;
  TrainConfig config;
  std::uint64_t seed = 0;
};

/// Versioned text dump; doubles are written as hexfloats so a round trip is
/// bit-exact.
void save_model(const GcnSeParams& params, const WeightingScheme& scheme, const TrainConfig& config,
                std::uint64_t seed, const std::string& path);
LoadedModel load_model(const std::string& path);

}  // namespace gcnse
