#include "gcnse/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gcnse/metrics.hpp"
#include "gcnse/nn.hpp"
#include "gcnse/rng.hpp"

namespace gcnse {

namespace {

constexpr std::uint64_t kInitStream = 100;
constexpr std::uint64_t kIterStream = 20000;
constexpr std::uint64_t kDropPrimary = 700000;
constexpr std::uint64_t kDropAttr = 800000;
constexpr std::uint64_t kDropPrimaryCombine = 900000;
constexpr std::uint64_t kDropAttrCombine = 1000000;

int se_hidden_size(double ratio, int timesteps) {
  return std::max(1, static_cast<int>(std::ceil(ratio * timesteps)));
}

}  // namespace

WeightingScheme WeightingScheme::exp_decay(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("exp_decay: lambda must be in (0,1]");
  WeightingScheme s;
  s.kind = Kind::ExpDecay;
  s.lambda = lambda;
  return s;
}

WeightingScheme WeightingScheme::frozen(std::vector<double> weights) {
  WeightingScheme s;
  s.kind = Kind::Frozen;
  s.frozen_weights = std::move(weights);
  for (double w : s.frozen_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("frozen weights must be nonnegative");
  }
  return s;
}

std::vector<double> WeightingScheme::fixed_weights(int timesteps) const {
  switch (kind) {
    case Kind::Uniform:
      return uniform_weights(timesteps);
    case Kind::ExpDecay:
      return exp_decay_weights(timesteps, lambda);
    case Kind::Frozen:
      if (static_cast<int>(frozen_weights.size()) != timesteps) {
        throw std::invalid_argument("frozen weights length must equal the timestep count");
      }
      return frozen_weights;
    default:
      throw std::logic_error("fixed_weights: scheme is learned");
  }
}

std::string WeightingScheme::name() const {
  switch (kind) {
    case Kind::LearnedSe: return "learned";
    case Kind::LearnedSeDual: return "learned-dual";
    case Kind::Uniform: return "uniform";
    case Kind::ExpDecay: return "exp-decay";
    case Kind::Frozen: return "frozen";
  }
  return "unknown";
}

WeightingScheme WeightingScheme::from_name(const std::string& name, double lambda,
                                           std::vector<double> frozen) {
  if (name == "learned" || name == "learned-se") return learned_se();
  if (name == "learned-dual" || name == "learned-se-dual" || name == "dual") return learned_se_dual();
  if (name == "uniform") return uniform();
  if (name == "exp-decay" || name == "decay") return exp_decay(lambda);
  if (name == "frozen") return WeightingScheme::frozen(std::move(frozen));
  throw std::invalid_argument("unknown weighting scheme '" + name + "'");
}

std::vector<double> uniform_weights(int timesteps) {
  if (timesteps < 1) throw std::invalid_argument("uniform_weights: timesteps must be >= 1");
  return std::vector<double>(static_cast<std::size_t>(timesteps), 1.0 / static_cast<double>(timesteps));
}

std::vector<double> exp_decay_weights(int timesteps, double lambda) {
  if (timesteps < 1) throw std::invalid_argument("exp_decay_weights: timesteps must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("exp_decay_weights: lambda must be in (0,1]");
  std::vector<double> w(static_cast<std::size_t>(timesteps));
  for (int t = 0; t < timesteps; ++t) {
    w[t] = std::pow(lambda, static_cast<double>(timesteps - 1 - t));
  }
  return w;
}

std::vector<Tensor*> GcnSeParams::tensors() {
  std::vector<Tensor*> out;
  for (Tensor* t : {&conv1, &conv2, &se_w1, &se_w2, &attr_conv1, &attr_conv2, &attr_se_w1,
                    &attr_se_w2, &fc_w, &fc_b}) {
    if (!t->empty()) out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> GcnSeParams::tensors() const {
  std::vector<const Tensor*> out;
  for (const Tensor* t : {&conv1, &conv2, &se_w1, &se_w2, &attr_conv1, &attr_conv2, &attr_se_w1,
                          &attr_se_w2, &fc_w, &fc_b}) {
    if (!t->empty()) out.push_back(t);
  }
  return out;
}

GcnSeParams GcnSeParams::zeros_like() const {
  GcnSeParams z = *this;
  for (Tensor* t : z.tensors()) t->fill(0.0);
  return z;
}

GcnSeModel::GcnSeModel(const DynamicGraph& graph, WeightingScheme scheme, TrainConfig config)
    : graph_(&graph), scheme_(std::move(scheme)), config_(config) {
  graph.validate();
  if (scheme_.is_dual() && !graph.has_attributes()) {
    throw std::invalid_argument("dual weighting scheme requires a graph with attributes");
  }
  const int t_count = graph.num_timesteps();
  adjacency_.reserve(t_count);
  for (int t = 0; t < t_count; ++t) adjacency_.push_back(normalize(graph.snapshots[t], graph.num_nodes));

  if (!scheme_.is_learned()) {
    fixed_weights_ = scheme_.fixed_weights(t_count);
    skip_.resize(t_count, 0);
    for (int t = 0; t < t_count; ++t) skip_[t] = fixed_weights_[t] == 0.0 ? 1 : 0;
  }

  // Constant per-timestep inputs already propagated through the adjacency:
  // adj_t * Z0_t. With one-hot inputs this is just the dense adjacency.
  propagated_input_.reserve(t_count);
  const bool primary_uses_attributes = !scheme_.is_dual() && graph.has_attributes();
  for (int t = 0; t < t_count; ++t) {
    if (!skip_.empty() && skip_[t]) {
      propagated_input_.emplace_back();
      continue;
    }
    propagated_input_.push_back(primary_uses_attributes ? adjacency_[t].multiply(graph.attributes[t])
                                                        : adjacency_[t].to_dense());
  }
  if (scheme_.is_dual()) {
    propagated_attr_input_.reserve(t_count);
    for (int t = 0; t < t_count; ++t) {
      propagated_attr_input_.push_back(adjacency_[t].multiply(graph.attributes[t]));
    }
  }
}

GcnSeParams GcnSeModel::init_params(std::uint64_t seed) const {
  const DynamicGraph& g = *graph_;
  GcnSeParams p;
  p.hidden = g.num_classes;
  p.timesteps = g.num_timesteps();
  p.se_hidden = se_hidden_size(config_.se_ratio, p.timesteps);
  p.dual = scheme_.is_dual();
  p.input_dim = p.dual ? g.num_nodes : (g.has_attributes() ? g.feature_dim() : g.num_nodes);
  p.attr_input_dim = p.dual ? g.feature_dim() : 0;

  const int h = p.hidden;
  p.conv1 = nn::glorot_init(p.input_dim, h, mix_seed(seed, kInitStream + 1));
  p.conv2 = nn::glorot_init(h, h, mix_seed(seed, kInitStream + 2));
  if (scheme_.is_learned()) {
    p.se_w1 = nn::glorot_init(p.se_hidden, p.timesteps, mix_seed(seed, kInitStream + 3));
    p.se_w2 = nn::glorot_init(p.timesteps, p.se_hidden, mix_seed(seed, kInitStream + 4));
  }
  if (p.dual) {
    p.attr_conv1 = nn::glorot_init(p.attr_input_dim, h, mix_seed(seed, kInitStream + 5));
    p.attr_conv2 = nn::glorot_init(h, h, mix_seed(seed, kInitStream + 6));
    p.attr_se_w1 = nn::glorot_init(p.se_hidden, p.timesteps, mix_seed(seed, kInitStream + 7));
    p.attr_se_w2 = nn::glorot_init(p.timesteps, p.se_hidden, mix_seed(seed, kInitStream + 8));
  }
  const int fc_in = p.dual ? 2 * h : h;
  p.fc_w = nn::glorot_init(fc_in, g.num_classes, mix_seed(seed, kInitStream + 9));
  if (config_.fc_bias) p.fc_b = Tensor(1, g.num_classes);
  return p;
}

GcnSeModel::Built GcnSeModel::build(ad::Tape& tape, const GcnSeParams& params, bool trainable,
                                    std::uint64_t dropout_seed, bool training,
                                    const std::vector<int>* labels,
                                    const std::vector<int>* mask) const {
  using NodeId = ad::Tape::NodeId;
  Built b;

  auto reg = [&](const Tensor& t) {
    NodeId id = trainable ? tape.parameter(t) : tape.constant_ref(&t);
    b.param_nodes.push_back(id);
    return id;
  };
  // Registration order must match GcnSeParams::tensors().
  const NodeId conv1 = reg(params.conv1);
  const NodeId conv2 = reg(params.conv2);
  const NodeId se_w1 = params.se_w1.empty() ? -1 : reg(params.se_w1);
  const NodeId se_w2 = params.se_w2.empty() ? -1 : reg(params.se_w2);
  const NodeId attr_conv1 = params.attr_conv1.empty() ? -1 : reg(params.attr_conv1);
  const NodeId attr_conv2 = params.attr_conv2.empty() ? -1 : reg(params.attr_conv2);
  const NodeId attr_se_w1 = params.attr_se_w1.empty() ? -1 : reg(params.attr_se_w1);
  const NodeId attr_se_w2 = params.attr_se_w2.empty() ? -1 : reg(params.attr_se_w2);
  const NodeId fc_w = reg(params.fc_w);
  const NodeId fc_b = params.fc_b.empty() ? -1 : reg(params.fc_b);

  const int t_count = graph_->num_timesteps();

  auto conv_stack = [&](const std::vector<Tensor>& inputs, NodeId w1, NodeId w2,
                        std::uint64_t stream) {
    std::vector<NodeId> embeddings(t_count, -1);
    for (int t = 0; t < t_count; ++t) {
      if (!skip_.empty() && skip_[t]) continue;
      const NodeId x = tape.constant_ref(&inputs[t]);
      const NodeId h1 = tape.relu(tape.matmul(x, w1));
      const NodeId h1d = tape.dropout(h1, config_.dropout,
                                      mix_seed(dropout_seed, stream + static_cast<std::uint64_t>(t)),
                                      training);
      const NodeId h2 = tape.relu(tape.matmul(tape.spmm(&adjacency_[t], h1d), w2));
      embeddings[t] = h2;
    }
    return embeddings;
  };

  auto se_attention = [&](const std::vector<NodeId>& embeddings, NodeId w1, NodeId w2) {
    std::vector<NodeId> all(embeddings.begin(), embeddings.end());
    const NodeId channel_means = tape.mean_all_stack(all);
    const NodeId hidden = tape.relu(tape.matmul(w1, channel_means));
    return tape.sigmoid(tape.matmul(w2, hidden));
  };

  auto combine_fixed = [&](const std::vector<NodeId>& embeddings) {
    std::vector<NodeId> active;
    std::vector<double> weights;
    for (int t = 0; t < t_count; ++t) {
      if (skip_[t]) continue;
      active.push_back(embeddings[t]);
      weights.push_back(fixed_weights_[t]);
    }
    if (active.empty()) {
      return tape.constant(Tensor(graph_->num_nodes, params.hidden));
    }
    return tape.weighted_sum(active, tape.constant(Tensor::column(weights)));
  };

  const bool recompute_for_combine =
      scheme_.is_learned() && training && config_.separate_combine_dropout;

  NodeId combined = -1;
  if (scheme_.is_learned()) {
    const std::vector<NodeId> emb = conv_stack(propagated_input_, conv1, conv2, kDropPrimary);
    b.attention = se_attention(emb, se_w1, se_w2);
    const std::vector<NodeId> comb_emb =
        recompute_for_combine ? conv_stack(propagated_input_, conv1, conv2, kDropPrimaryCombine)
                              : emb;
    combined = tape.weighted_sum(comb_emb, b.attention);
    if (scheme_.is_dual()) {
      const std::vector<NodeId> attr_emb =
          conv_stack(propagated_attr_input_, attr_conv1, attr_conv2, kDropAttr);
      b.attention_attr = se_attention(attr_emb, attr_se_w1, attr_se_w2);
      const std::vector<NodeId> attr_comb_emb =
          recompute_for_combine
              ? conv_stack(propagated_attr_input_, attr_conv1, attr_conv2, kDropAttrCombine)
              : attr_emb;
      combined = tape.concat_cols(combined, tape.weighted_sum(attr_comb_emb, b.attention_attr));
    }
  } else {
    combined = combine_fixed(conv_stack(propagated_input_, conv1, conv2, kDropPrimary));
  }

  NodeId logits = tape.matmul(combined, fc_w);
  if (fc_b >= 0) logits = tape.add_row_vector(logits, fc_b);
  b.probs = tape.softmax_rows(logits);
  if (labels != nullptr) b.loss = tape.cross_entropy_masked(b.probs, *labels, *mask);
  return b;
}

ForwardResult GcnSeModel::forward(const GcnSeParams& params, std::uint64_t dropout_seed,
                                  bool training) const {
  ad::Tape tape;
  Built b = build(tape, params, /*trainable=*/false, dropout_seed, training, nullptr, nullptr);
  ForwardResult result;
  result.probs = tape.value(b.probs);
  require_finite(result.probs, "forward probabilities");
  if (scheme_.is_learned()) {
    result.attention = tape.value(b.attention).to_vector();
    if (b.attention_attr >= 0) result.attention_attr = tape.value(b.attention_attr).to_vector();
  } else {
    result.attention = fixed_weights_;
  }
  return result;
}

double GcnSeModel::loss_and_gradients(const GcnSeParams& params, std::uint64_t dropout_seed,
                                      const std::vector<int>& labels, const std::vector<int>& mask,
                                      GcnSeParams& grads) const {
  ad::Tape tape;
  Built b = build(tape, params, /*trainable=*/true, dropout_seed, /*training=*/true, &labels, &mask);
  tape.backward(b.loss);
  std::vector<Tensor*> targets = grads.tensors();
  if (targets.size() != b.param_nodes.size()) {
    throw std::logic_error("loss_and_gradients: grads shape set does not match params");
  }
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const Tensor& g = tape.grad(b.param_nodes[k]);
    if (g.empty()) {
      targets[k]->fill(0.0);
    } else {
      *targets[k] = g;
    }
  }
  return tape.value(b.loss)(0, 0);
}

double GcnSeModel::loss(const GcnSeParams& params, std::uint64_t dropout_seed, bool training,
                        const std::vector<int>& labels, const std::vector<int>& mask) const {
  ad::Tape tape;
  Built b = build(tape, params, /*trainable=*/false, dropout_seed, training, &labels, &mask);
  return tape.value(b.loss)(0, 0);
}

Tensor gcn_layer(const NormalizedAdjacency& adj, const Tensor& z, const Tensor& w,
                 bool relu_activation) {
  ad::Tape tape;
  auto out = tape.matmul(tape.spmm(&adj, tape.constant_ref(&z)), tape.constant_ref(&w));
  if (relu_activation) out = tape.relu(out);
  return tape.value(out);
}

std::vector<double> squeeze(std::span<const Tensor> embeddings) {
  ad::Tape tape;
  std::vector<ad::Tape::NodeId> ids;
  ids.reserve(embeddings.size());
  for (const Tensor& e : embeddings) ids.push_back(tape.constant_ref(&e));
  return tape.value(tape.mean_all_stack(ids)).to_vector();
}

std::vector<double> excitation(std::span<const double> channel_means, const Tensor& se_w1,
                               const Tensor& se_w2) {
  ad::Tape tape;
  const auto c = tape.constant(Tensor::column(channel_means));
  const auto hidden = tape.relu(tape.matmul(tape.constant_ref(&se_w1), c));
  return tape.value(tape.sigmoid(tape.matmul(tape.constant_ref(&se_w2), hidden))).to_vector();
}

Tensor combine(std::span<const Tensor> embeddings, std::span<const double> weights) {
  if (embeddings.size() != weights.size()) {
    throw std::invalid_argument("combine: weights length must match the embedding count");
  }
  ad::Tape tape;
  std::vector<ad::Tape::NodeId> ids;
  ids.reserve(embeddings.size());
  for (const Tensor& e : embeddings) ids.push_back(tape.constant_ref(&e));
  return tape.value(tape.weighted_sum(ids, tape.constant(Tensor::column(weights))));
}

std::vector<int> argmax_rows(const Tensor& probs) {
  std::vector<int> out(probs.rows(), 0);
  for (int i = 0; i < probs.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < probs.cols(); ++j) {
      if (probs(i, j) > probs(i, best)) best = j;
    }
    out[i] = best;
  }
  return out;
}

TrainResult train(const DynamicGraph& graph, const TrainConfig& config, const WeightingScheme& scheme,
                  const NodeSplit& split, std::uint64_t seed) {
  if (split.train.empty()) throw std::invalid_argument("train: empty train set");
  GcnSeModel model(graph, scheme, config);
  GcnSeParams params = model.init_params(mix_seed(seed, 1));
  GcnSeParams grads = params.zeros_like();

  nn::AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  std::vector<const Tensor*> shapes;
  for (Tensor* t : params.tensors()) shapes.push_back(t);
  nn::AdamState adam(shapes, adam_config);

  const std::vector<int>& final_labels = graph.labels.back();
  // Model selection needs a nonempty holdout; tiny graphs may have none.
  const std::vector<int>& selection_mask = split.val.empty() ? split.train : split.val;

  TrainResult result;
  result.history.reserve(config.iterations);
  double best_acc = -1.0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const double loss = model.loss_and_gradients(params, mix_seed(seed, kIterStream + iter),
                                                 final_labels, split.train, grads);
    std::vector<const Tensor*> grad_list;
    for (Tensor* g : grads.tensors()) grad_list.push_back(g);
    adam.step(params.tensors(), grad_list);

    const ForwardResult eval = model.forward(params, 0, /*training=*/false);
    const double val_acc = metrics::accuracy(argmax_rows(eval.probs), final_labels, selection_mask);
    result.history.push_back({loss, val_acc});
    if (val_acc > best_acc) {
      best_acc = val_acc;
      result.params = params;
      result.attention = eval.attention;
      result.attention_attr = eval.attention_attr;
      result.best_iteration = iter;
    }
  }
  result.best_val_accuracy = best_acc;
  return result;
}

std::vector<int> predict(const GcnSeParams& params, const DynamicGraph& graph,
                         const WeightingScheme& scheme, const TrainConfig& config) {
  GcnSeModel model(graph, scheme, config);
  return argmax_rows(model.forward(params, 0, /*training=*/false).probs);
}

ForwardResult forward(const DynamicGraph& graph, const GcnSeParams& params,
                      const WeightingScheme& scheme, std::uint64_t seed, bool training,
                      const TrainConfig& config) {
  GcnSeModel model(graph, scheme, config);
  return model.forward(params, seed, training);
}

namespace {

void write_hex(std::ostream& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  out << buf;
}

double read_hex(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) throw ParseError(std::string("model file: missing value for ") + what);
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == nullptr || *end != '\0') {
    throw ParseError(std::string("model file: bad numeric value for ") + what);
  }
  return v;
}

void write_tensor(std::ostream& out, const char* name, const Tensor& t) {
  if (t.empty()) return;
  out << "tensor " << name << " " << t.rows() << " " << t.cols() << "\n";
  for (int i = 0; i < t.rows(); ++i) {
    for (int j = 0; j < t.cols(); ++j) {
      if (j > 0) out << " ";
      write_hex(out, t(i, j));
    }
    out << "\n";
  }
}

}  // namespace

void save_model(const GcnSeParams& params, const WeightingScheme& scheme, const TrainConfig& config,
                std::uint64_t seed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << "GCNSE-MODEL v1\n";
  out << "scheme " << scheme.name() << "\n";
  out << "lambda ";
  write_hex(out, scheme.lambda);
  out << "\n";
  out << "frozen " << scheme.frozen_weights.size();
  for (double w : scheme.frozen_weights) {
    out << " ";
    write_hex(out, w);
  }
  out << "\n";
  out << "dims " << params.hidden << " " << params.se_hidden << " " << params.timesteps << " "
      << params.input_dim << " " << params.attr_input_dim << " " << (params.dual ? 1 : 0) << "\n";
  out << "config " << config.iterations << " " << (config.fc_bias ? 1 : 0) << " "
      << (config.separate_combine_dropout ? 1 : 0);
  for (double v : {config.learning_rate, config.dropout, config.se_ratio, config.train_ratio,
                   config.val_ratio, config.test_ratio}) {
    out << " ";
    write_hex(out, v);
  }
  out << "\n";
  out << "seed " << seed << "\n";
  write_tensor(out, "conv1", params.conv1);
  write_tensor(out, "conv2", params.conv2);
  write_tensor(out, "se_w1", params.se_w1);
  write_tensor(out, "se_w2", params.se_w2);
  write_tensor(out, "attr_conv1", params.attr_conv1);
  write_tensor(out, "attr_conv2", params.attr_conv2);
  write_tensor(out, "attr_se_w1", params.attr_se_w1);
  write_tensor(out, "attr_se_w2", params.attr_se_w2);
  write_tensor(out, "fc_w", params.fc_w);
  write_tensor(out, "fc_b", params.fc_b);
  out << "end\n";
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string magic, version;
  in >> magic >> version;
  if (magic != "GCNSE-MODEL" || version != "v1") throw ParseError(path + ": not a model file");

  LoadedModel m;
  std::string key;
  std::string scheme_name;
  double lambda = 0.5;
  std::vector<double> frozen;
  while (in >> key) {
    if (key == "scheme") {
      in >> scheme_name;
    } else if (key == "lambda") {
      lambda = read_hex(in, "lambda");
    } else if (key == "frozen") {
      std::size_t count = 0;
      in >> count;
      frozen.resize(count);
      for (std::size_t i = 0; i < count; ++i) frozen[i] = read_hex(in, "frozen weight");
    } else if (key == "dims") {
      int dual = 0;
      in >> m.params.hidden >> m.params.se_hidden >> m.params.timesteps >> m.params.input_dim >>
          m.params.attr_input_dim >> dual;
      m.params.dual = dual != 0;
    } else if (key == "config") {
      int bias = 1, separate = 0;
      in >> m.config.iterations >> bias >> separate;
      m.config.fc_bias = bias != 0;
      m.config.separate_combine_dropout = separate != 0;
      m.config.learning_rate = read_hex(in, "learning_rate");
      m.config.dropout = read_hex(in, "dropout");
      m.config.se_ratio = read_hex(in, "se_ratio");
      m.config.train_ratio = read_hex(in, "train_ratio");
      m.config.val_ratio = read_hex(in, "val_ratio");
      m.config.test_ratio = read_hex(in, "test_ratio");
    } else if (key == "seed") {
      in >> m.seed;
    } else if (key == "tensor") {
      std::string name;
      int rows = 0, cols = 0;
      in >> name >> rows >> cols;
      if (rows < 1 || cols < 1) throw ParseError(path + ": bad tensor dims for " + name);
      Tensor t(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) t(i, j) = read_hex(in, name.c_str());
      }
      if (name == "conv1") m.params.conv1 = std::move(t);
      else if (name == "conv2") m.params.conv2 = std::move(t);
      else if (name == "se_w1") m.params.se_w1 = std::move(t);
      else if (name == "se_w2") m.params.se_w2 = std::move(t);
      else if (name == "attr_conv1") m.params.attr_conv1 = std::move(t);
      else if (name == "attr_conv2") m.params.attr_conv2 = std::move(t);
      else if (name == "attr_se_w1") m.params.attr_se_w1 = std::move(t);
      else if (name == "attr_se_w2") m.params.attr_se_w2 = std::move(t);
      else if (name == "fc_w") m.params.fc_w = std::move(t);
      else if (name == "fc_b") m.params.fc_b = std::move(t);
      else throw ParseError(path + ": unknown tensor '" + name + "'");
    } else if (key == "end") {
      m.scheme = WeightingScheme::from_name(scheme_name, lambda, std::move(frozen));
      m.scheme.lambda = lambda;
      return m;
    } else {
      throw ParseError(path + ": unknown key '" + key + "'");
    }
  }
  throw ParseError(path + ": truncated model file");
}

}  // namespace gcnse
