#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fd_check.hpp"
#include "gcnse/model.hpp"
#include "gcnse/nn.hpp"
#include "gcnse/rng.hpp"
#include "gcnse/synthgen.hpp"

using namespace gcnse;

namespace {

Tensor random_tensor(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-scale, scale);
  return t;
}

DynamicGraph small_graph(std::uint64_t seed, int n, int classes, int timesteps, int attrs) {
  GenParams p;
  p.num_nodes = n;
  p.num_classes = classes;
  p.num_timesteps = timesteps;
  p.p_intra = 0.5;
  p.p_inter = 0.1;
  p.seed = seed;
  DynamicGraph g = generate(p);
  if (attrs > 0) {
    Rng rng(mix_seed(seed, 999));
    for (int t = 0; t < timesteps; ++t) {
      Tensor x(n, attrs);
      for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
      g.attributes.push_back(x);
    }
  }
  return g;
}

std::string model_to_string(const GcnSeParams& params, const WeightingScheme& scheme,
                            const TrainConfig& config, std::uint64_t seed) {
  const std::string path = "tmp_model_dump.txt";
  save_model(params, scheme, config, seed, path);
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::filesystem::remove(path);
  return buffer.str();
}

}  // namespace

TEST_CASE("gcn_layer: identity propagation, hand example, zero weights") {
  const NormalizedAdjacency eye = normalize({}, 3);
  const Tensor z = random_tensor(3, 2, 1);
  const Tensor via = gcn_layer(eye, z, Tensor::identity(2), false);
  CHECK(via == z);

  // 2-node complete graph: normalized matrix is [[.5,.5],[.5,.5]]
  const NormalizedAdjacency k2 = normalize({{0, 1}}, 2);
  const Tensor out = gcn_layer(k2, Tensor::identity(2), Tensor::identity(2), true);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(out(i, j) == doctest::Approx(0.5).epsilon(1e-12));
  }

  const Tensor zero = gcn_layer(k2, Tensor::identity(2), Tensor(2, 2), true);
  for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero.data()[i] == 0.0);
}

TEST_CASE("squeeze: constant and hand-computed means") {
  const std::vector<Tensor> zs = {Tensor(2, 2), Tensor::full(2, 2, 3.5),
                                  Tensor::from_rows({{1, 2}, {3, 4}})};
  const std::vector<double> c = squeeze(zs);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 3.5);
  CHECK(c[2] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("excitation: zero weights give 0.5, hand example, relu clamp") {
  const std::vector<double> c = {1.0, 1.0};
  const std::vector<double> half = excitation(c, Tensor(1, 2), Tensor(2, 1));
  CHECK(half[0] == 0.5);
  CHECK(half[1] == 0.5);

  const Tensor w1 = Tensor::from_rows({{1, 1}});
  const Tensor w2 = Tensor::from_rows({{1}, {0}});
  const std::vector<double> out = excitation(c, w1, w2);
  CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-6));
  CHECK(out[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(out[1] == 0.5);

  // negative pre-activation is clamped to zero, so the gate stays at 0.5
  const Tensor w1_neg = Tensor::from_rows({{-1, -1}});
  const std::vector<double> clamped = excitation(c, w1_neg, w2);
  CHECK(clamped[0] == 0.5);
  CHECK(clamped[1] == 0.5);
}

TEST_CASE("combine: one-hot, zero, and convex weights") {
  const std::vector<Tensor> zs = {random_tensor(3, 2, 1), random_tensor(3, 2, 2),
                                  random_tensor(3, 2, 3)};
  const Tensor picked = combine(zs, std::vector<double>{0.0, 1.0, 0.0});
  CHECK(picked == zs[1]);

  const Tensor zero = combine(zs, std::vector<double>{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero.data()[i] == 0.0);

  const std::vector<Tensor> same = {zs[0], zs[0]};
  const Tensor mixed = combine(same, std::vector<double>{0.5, 0.5});
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    CHECK(mixed.data()[i] == doctest::Approx(zs[0].data()[i]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(combine(zs, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("weights: exponential decay and uniform") {
  const std::vector<double> ones = exp_decay_weights(5, 1.0);
  for (double w : ones) CHECK(w == 1.0);

  const std::vector<double> decayed = exp_decay_weights(3, 0.5);
  CHECK(decayed[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(decayed[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(decayed[2] == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> uniform = uniform_weights(4);
  for (double w : uniform) CHECK(w == 0.25);

  CHECK_THROWS_AS(exp_decay_weights(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(exp_decay_weights(3, 1.5), std::invalid_argument);
}

TEST_CASE("forward: rows sum to one and attention stays in (0,1)") {
  const DynamicGraph g = small_graph(5, 12, 3, 4, 0);
  const TrainConfig config;
  GcnSeModel model(g, WeightingScheme::learned_se(), config);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GcnSeParams params = model.init_params(seed);
    if (seed % 2 == 0) {
      // stress the gate with weights far outside the trained range (x3 per
      // factor keeps the sigmoid away from fp saturation, which needs |x|>36)
      for (Tensor* t : params.tensors()) {
        for (std::size_t i = 0; i < t->size(); ++i) t->data()[i] *= 3.0;
      }
    }
    const ForwardResult out = model.forward(params, 0, false);
    for (int i = 0; i < out.probs.rows(); ++i) {
      double sum = 0.0;
      for (int j = 0; j < out.probs.cols(); ++j) sum += out.probs(i, j);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    REQUIRE(out.attention.size() == 4);
    for (double w : out.attention) {
      CHECK(w > 0.0);
      CHECK(w < 1.0);
    }
  }
}

TEST_CASE("forward: uniform scheme equals the frozen uniform vector bit for bit") {
  const DynamicGraph g = small_graph(6, 10, 2, 3, 0);
  const TrainConfig config;
  GcnSeModel uniform_model(g, WeightingScheme::uniform(), config);
  const GcnSeParams params = uniform_model.init_params(8);
  GcnSeModel frozen_model(g, WeightingScheme::frozen(uniform_weights(3)), config);
  const ForwardResult a = uniform_model.forward(params, 0, false);
  const ForwardResult b = frozen_model.forward(params, 0, false);
  CHECK(a.probs == b.probs);
  CHECK(a.attention == b.attention);
}

TEST_CASE("forward: permuting node ids permutes output rows") {
  const int n = 10;
  DynamicGraph g = small_graph(9, n, 2, 3, 0);
  // one-hot inputs supplied explicitly so they can be permuted alongside
  for (int t = 0; t < 3; ++t) g.attributes.push_back(Tensor::identity(n));

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng rng(4);
  rng.shuffle(perm);

  DynamicGraph permuted;
  permuted.num_nodes = n;
  permuted.num_classes = g.num_classes;
  for (int t = 0; t < 3; ++t) {
    EdgeList edges;
    for (const Edge& e : g.snapshots[t]) {
      edges.push_back({std::min(perm[e.u], perm[e.v]), std::max(perm[e.u], perm[e.v])});
    }
    permuted.snapshots.push_back(canonical_edges(edges, n));
    std::vector<int> labels(n, 0);
    for (int i = 0; i < n; ++i) labels[perm[i]] = g.labels[t][i];
    permuted.labels.push_back(labels);
    Tensor x(n, n);
    for (int i = 0; i < n; ++i) x(perm[i], i) = 1.0;
    permuted.attributes.push_back(x);
  }

  const TrainConfig config;
  GcnSeModel model(g, WeightingScheme::learned_se(), config);
  GcnSeModel permuted_model(permuted, WeightingScheme::learned_se(), config);
  const GcnSeParams params = model.init_params(21);
  const ForwardResult a = model.forward(params, 0, false);
  const ForwardResult b = permuted_model.forward(params, 0, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < a.probs.cols(); ++j) {
      CHECK(b.probs(perm[i], j) == doctest::Approx(a.probs(i, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("forward: dual scheme requires attributes") {
  const DynamicGraph g = small_graph(11, 8, 2, 3, 0);
  CHECK_THROWS_AS(GcnSeModel(g, WeightingScheme::learned_se_dual(), {}), std::invalid_argument);
}

TEST_CASE("forward: frozen one-hot weights depend only on the selected snapshot") {
  DynamicGraph g = small_graph(13, 9, 2, 3, 0);
  std::vector<double> weights = {0.0, 1.0, 0.0};
  const TrainConfig config;
  GcnSeModel model(g, WeightingScheme::frozen(weights), config);
  const GcnSeParams params = model.init_params(2);
  const ForwardResult before = model.forward(params, 0, false);

  DynamicGraph mutated = g;
  mutated.snapshots[0].clear();
  mutated.snapshots[2] = {{0, 1}};
  GcnSeModel mutated_model(mutated, WeightingScheme::frozen(weights), config);
  const ForwardResult after = mutated_model.forward(params, 0, false);
  CHECK(before.probs == after.probs);
}

TEST_CASE("scaling embeddings preserves argmax through a zero-bias head") {
  const std::vector<Tensor> zs = {random_tensor(5, 3, 31), random_tensor(5, 3, 32)};
  const std::vector<double> weights = {0.7, 0.4};
  const Tensor fc = random_tensor(3, 4, 33);
  for (double k : {0.5, 3.0}) {
    std::vector<Tensor> scaled;
    for (const Tensor& z : zs) {
      Tensor s = z;
      for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] *= k;
      scaled.push_back(s);
    }
    const std::vector<double> c = squeeze(zs);
    const std::vector<double> c_scaled = squeeze(scaled);
    for (std::size_t t = 0; t < c.size(); ++t) {
      CHECK(c_scaled[t] == doctest::Approx(k * c[t]).epsilon(1e-12));
    }
    const Tensor logits = nn::matmul(combine(zs, weights), fc);
    const Tensor logits_scaled = nn::matmul(combine(scaled, weights), fc);
    CHECK(argmax_rows(nn::softmax_rows(logits)) == argmax_rows(nn::softmax_rows(logits_scaled)));
  }
}

TEST_CASE("predict: argmax with ties resolved to the lowest class") {
  CHECK(argmax_rows(Tensor::from_rows({{0.1, 0.7, 0.2}})) == std::vector<int>{1});
  CHECK(argmax_rows(Tensor::from_rows({{0.5, 0.5}})) == std::vector<int>{0});
}

TEST_CASE("full-model gradient check, single and dual variants") {
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    for (const bool dual : {false, true}) {
      const DynamicGraph g = small_graph(700 + seed, 20, 3, 4, dual ? 6 : 0);
      const WeightingScheme scheme =
          dual ? WeightingScheme::learned_se_dual() : WeightingScheme::learned_se();
      const TrainConfig config;
      GcnSeModel model(g, scheme, config);
      GcnSeParams params = model.init_params(seed);
      GcnSeParams grads = params.zeros_like();
      const std::vector<int>& labels = g.labels.back();
      const std::vector<int> mask = {0, 1, 2, 5, 6, 9, 11, 14, 17, 19};
      const std::uint64_t dropout_seed = mix_seed(seed, 5);
      model.loss_and_gradients(params, dropout_seed, labels, mask, grads);

      const auto loss_fn = [&]() {
        return model.loss(params, dropout_seed, true, labels, mask);
      };
      std::vector<const Tensor*> grad_list;
      for (Tensor* t : grads.tensors()) grad_list.push_back(t);
      const auto report = testing::check_gradients(loss_fn, params.tensors(), grad_list);
      INFO("dual=", dual, " seed=", seed, " checked=", report.checked,
           " refined=", report.refined, " max_rel=", report.max_rel_error);
      for (const std::string& f : report.failures) INFO(f);
      CHECK(report.pass());
    }
  }
}

TEST_CASE("train: memorizes a tiny fully-labeled graph") {
  DynamicGraph g;
  g.num_nodes = 4;
  g.num_classes = 2;
  g.snapshots = {{{0, 1}, {2, 3}}};
  g.labels = {{0, 0, 1, 1}};
  NodeSplit split;
  split.train = {0, 1, 2, 3};
  TrainConfig config;
  config.iterations = 200;
  config.dropout = 0.0;
  const TrainResult result = train(g, config, WeightingScheme::learned_se(), split, 3);
  const std::vector<int> pred = predict(result.params, g, WeightingScheme::learned_se(), config);
  CHECK(pred == g.labels[0]);
}

TEST_CASE("train: deterministic per seed and loss decreases") {
  const DynamicGraph g = small_graph(41, 30, 3, 3, 0);
  const NodeSplit split = split_nodes(30, 0.7, 0.2, 0.1, 17);
  TrainConfig config;
  config.iterations = 60;
  const TrainResult a = train(g, config, WeightingScheme::learned_se(), split, 7);
  const TrainResult b = train(g, config, WeightingScheme::learned_se(), split, 7);
  CHECK(model_to_string(a.params, WeightingScheme::learned_se(), config, 7) ==
        model_to_string(b.params, WeightingScheme::learned_se(), config, 7));
  CHECK(a.history.back().train_loss < a.history.front().train_loss);
  CHECK(a.best_iteration >= 0);
  CHECK(a.history.size() == 60);

  NodeSplit empty_train;
  empty_train.val = split.val;
  CHECK_THROWS_AS(train(g, config, WeightingScheme::learned_se(), empty_train, 7),
                  std::invalid_argument);
}

TEST_CASE("train: learnable static-label instance reaches high accuracy quickly") {
  GenParams p;
  p.num_nodes = 60;
  p.num_classes = 3;
  p.num_timesteps = 3;
  p.p_intra = 0.30;
  p.p_inter = 0.01;
  p.transition_prob = {0.0, 0.0, 0.0};
  p.seed = 8;
  const DynamicGraph g = generate(p);
  const NodeSplit split = split_nodes(60, 0.7, 0.2, 0.1, 5);
  TrainConfig config;
  config.iterations = 150;
  const TrainResult result = train(g, config, WeightingScheme::learned_se(), split, 5);
  const std::vector<int> pred = predict(result.params, g, WeightingScheme::learned_se(), config);
  double correct = 0.0;
  for (int i : split.test) {
    if (pred[i] == g.labels.back()[i]) correct += 1.0;
  }
  CHECK(correct / static_cast<double>(split.test.size()) >= 0.7);
}

TEST_CASE("model serialization round trip is bit-exact") {
  const DynamicGraph g = small_graph(77, 10, 3, 4, 5);
  TrainConfig config;
  config.iterations = 17;
  config.dropout = 0.37;
  for (const WeightingScheme& scheme :
       {WeightingScheme::learned_se(), WeightingScheme::learned_se_dual(),
        WeightingScheme::exp_decay(0.5), WeightingScheme::frozen({0.0, 0.25, 1.0, 0.5})}) {
    GcnSeModel model(g, scheme, config);
    const GcnSeParams params = model.init_params(3);
    const std::string path = "tmp_model_roundtrip.txt";
    save_model(params, scheme, config, 99, path);
    const LoadedModel loaded = load_model(path);
    CHECK(loaded.seed == 99);
    CHECK(loaded.scheme.name() == scheme.name());
    CHECK(loaded.config.dropout == config.dropout);
    CHECK(loaded.config.iterations == config.iterations);
    CHECK(loaded.params.conv1 == params.conv1);
    CHECK(loaded.params.fc_w == params.fc_w);
    CHECK(loaded.params.se_w1 == params.se_w1);
    CHECK(loaded.params.attr_conv1 == params.attr_conv1);

    // byte-identical re-serialization
    save_model(loaded.params, loaded.scheme, loaded.config, loaded.seed, path + ".2");
    std::ifstream f1(path), f2(path + ".2");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".2");

    // a trained forward pass agrees after reload
    const ForwardResult before = model.forward(params, 0, false);
    GcnSeModel reloaded_model(g, loaded.scheme, loaded.config);
    const ForwardResult after = reloaded_model.forward(loaded.params, 0, false);
    CHECK(before.probs == after.probs);
  }
}
