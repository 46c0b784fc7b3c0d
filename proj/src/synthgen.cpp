#include "gcnse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gcnse/rng.hpp"

namespace gcnse {

namespace {

constexpr std::uint64_t kLabelStream = 11;
constexpr std::uint64_t kEdgeStream = 1000;

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0,1]");
}

void check_timesteps(const std::set<int>& timesteps, int t_count) {
  for (int t : timesteps) {
    if (t < 0 || t >= t_count) throw std::invalid_argument("timestep out of range");
  }
}

EdgeList generate_edges(const std::vector<int>& labels, double p_intra, double p_inter, Rng& rng) {
  const int n = static_cast<int>(labels.size());
  EdgeList edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? p_intra : p_inter;
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return edges;
}

int different_class(int current, int num_classes, Rng& rng) {
  const int offset = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(num_classes - 1)));
  return (current + offset) % num_classes;
}

}  // namespace

void GenParams::validate() const {
  if (num_nodes < 1 || num_classes < 1 || num_timesteps < 1) {
    throw std::invalid_argument("GenParams: num_nodes, num_classes, num_timesteps must be >= 1");
  }
  check_prob(p_intra, "p_intra");
  check_prob(p_inter, "p_inter");
  if (!transition_prob.empty() && static_cast<int>(transition_prob.size()) != num_timesteps) {
    throw std::invalid_argument("GenParams: transition_prob length must equal num_timesteps");
  }
  for (double p : transition_prob) check_prob(p, "transition_prob");
}

std::vector<double> GenParams::effective_transition() const {
  if (!transition_prob.empty()) return transition_prob;
  return std::vector<double>(static_cast<std::size_t>(num_timesteps), 0.05);
}

DynamicGraph generate(const GenParams& params) {
  params.validate();
  const std::vector<double> transition = params.effective_transition();

  DynamicGraph g;
  g.num_nodes = params.num_nodes;
  g.num_classes = params.num_classes;
  g.snapshots.resize(params.num_timesteps);
  g.labels.resize(params.num_timesteps);

  Rng label_rng(mix_seed(params.seed, kLabelStream));
  g.labels[0].resize(params.num_nodes);
  for (int i = 0; i < params.num_nodes; ++i) {
    g.labels[0][i] = static_cast<int>(label_rng.bounded(static_cast<std::uint64_t>(params.num_classes)));
  }
  for (int t = 1; t < params.num_timesteps; ++t) {
    g.labels[t] = g.labels[t - 1];
    if (params.num_classes < 2) continue;
    for (int i = 0; i < params.num_nodes; ++i) {
      if (label_rng.bernoulli(transition[t])) {
        g.labels[t][i] = different_class(g.labels[t][i], params.num_classes, label_rng);
      }
    }
  }
  for (int t = 0; t < params.num_timesteps; ++t) {
    Rng edge_rng(mix_seed(params.seed, kEdgeStream + static_cast<std::uint64_t>(t)));
    g.snapshots[t] = generate_edges(g.labels[t], params.p_intra, params.p_inter, edge_rng);
  }
  g.validate();
  return g;
}

DynamicGraph delete_edges(const DynamicGraph& graph, const std::set<int>& timesteps, double fraction,
                          std::uint64_t seed) {
  graph.validate();
  check_prob(fraction, "fraction");
  check_timesteps(timesteps, graph.num_timesteps());

  DynamicGraph out = graph;
  for (int t : timesteps) {
    EdgeList edges = out.snapshots[t];
    const std::size_t remove = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(edges.size()) + 1e-12));
    Rng rng(mix_seed(seed, 2000 + static_cast<std::uint64_t>(t)));
    rng.shuffle(edges);
    edges.erase(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(remove));
    std::sort(edges.begin(), edges.end());
    out.snapshots[t] = std::move(edges);
  }
  return out;
}

DynamicGraph densify(const DynamicGraph& graph, const GenParams& base, const std::set<int>& timesteps,
                     const std::set<int>& classes, double p_intra_hi, double p_inter_hi,
                     std::uint64_t seed, DensifyPairRule rule) {
  graph.validate();
  base.validate();
  check_prob(p_intra_hi, "p_intra_hi");
  check_prob(p_inter_hi, "p_inter_hi");
  check_timesteps(timesteps, graph.num_timesteps());
  for (int c : classes) {
    if (c < 0 || c >= graph.num_classes) throw std::invalid_argument("densify: class out of range");
  }

  DynamicGraph out = graph;
  for (int t : timesteps) {
    const std::vector<int>& labels = graph.labels[t];
    Rng rng(mix_seed(seed, 3000 + static_cast<std::uint64_t>(t)));
    EdgeList edges;
    for (int u = 0; u < graph.num_nodes; ++u) {
      const bool u_boosted = classes.count(labels[u]) > 0;
      for (int v = u + 1; v < graph.num_nodes; ++v) {
        const bool v_boosted = classes.count(labels[v]) > 0;
        double p;
        if (labels[u] == labels[v]) {
          p = u_boosted ? p_intra_hi : base.p_intra;
        } else {
          const bool boosted = rule == DensifyPairRule::AnyBoostedEndpoint
                                   ? (u_boosted || v_boosted)
                                   : (u_boosted != v_boosted);
          p = boosted ? p_inter_hi : base.p_inter;
        }
        if (rng.bernoulli(p)) edges.push_back({u, v});
      }
    }
    out.snapshots[t] = std::move(edges);
  }
  return out;
}

DynamicGraph randomize_labels(const DynamicGraph& graph, const GenParams& base,
                              const std::set<int>& timesteps, std::uint64_t seed) {
  graph.validate();
  base.validate();
  check_timesteps(timesteps, graph.num_timesteps());
  if (timesteps.count(graph.num_timesteps() - 1) > 0) {
    throw std::invalid_argument("randomize_labels: the final timestep is the prediction target");
  }

  DynamicGraph out = graph;
  for (int t : timesteps) {
    Rng rng(mix_seed(seed, 4000 + static_cast<std::uint64_t>(t)));
    for (int i = 0; i < graph.num_nodes; ++i) {
      out.labels[t][i] = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(graph.num_classes)));
    }
    out.snapshots[t] = generate_edges(out.labels[t], base.p_intra, base.p_inter, rng);
  }
  return out;
}

DynamicGraph make_periodic(const DynamicGraph& base_block, int repeats, double flip_prob,
                           std::uint64_t seed) {
  base_block.validate();
  if (repeats < 1) throw std::invalid_argument("make_periodic: repeats must be >= 1");
  check_prob(flip_prob, "flip_prob");

  const int period = base_block.num_timesteps();
  const int n = base_block.num_nodes;
  DynamicGraph out;
  out.num_nodes = n;
  out.num_classes = base_block.num_classes;
  const int total = period * repeats;
  out.snapshots.resize(total);
  out.labels.resize(total);
  if (base_block.has_attributes()) out.attributes.resize(total);

  std::vector<char> present(static_cast<std::size_t>(n) * n, 0);
  for (int t = 0; t < total; ++t) {
    const int src = t % period;
    out.labels[t] = base_block.labels[src];
    if (base_block.has_attributes()) out.attributes[t] = base_block.attributes[src];

    std::fill(present.begin(), present.end(), 0);
    for (const Edge& e : base_block.snapshots[src]) {
      present[static_cast<std::size_t>(e.u) * n + e.v] = 1;
    }
    Rng rng(mix_seed(seed, 5000 + static_cast<std::uint64_t>(t)));
    EdgeList edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        char& slot = present[static_cast<std::size_t>(u) * n + v];
        if (rng.bernoulli(flip_prob)) slot = !slot;
        if (slot) edges.push_back({u, v});
      }
    }
    out.snapshots[t] = std::move(edges);
  }
  out.validate();
  return out;
}

}  // namespace gcnse
