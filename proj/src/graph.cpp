#include "gcnse/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gcnse/rng.hpp"

namespace gcnse {

void DynamicGraph::validate() const {
  if (num_nodes < 1) throw std::invalid_argument("DynamicGraph: num_nodes must be >= 1");
  if (num_classes < 1) throw std::invalid_argument("DynamicGraph: num_classes must be >= 1");
  const int t_count = num_timesteps();
  if (t_count < 1) throw std::invalid_argument("DynamicGraph: at least one snapshot required");
  if (static_cast<int>(labels.size()) != t_count) {
    throw std::invalid_argument("DynamicGraph: labels/snapshots timestep mismatch");
  }
  if (!attributes.empty() && static_cast<int>(attributes.size()) != t_count) {
    throw std::invalid_argument("DynamicGraph: attributes/snapshots timestep mismatch");
  }
  for (int t = 0; t < t_count; ++t) {
    const EdgeList& edges = snapshots[t];
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      if (e.u < 0 || e.v >= num_nodes || e.u >= e.v) {
        throw std::invalid_argument("DynamicGraph: non-canonical or out-of-range edge");
      }
      if (k > 0 && !(edges[k - 1] < e)) {
        throw std::invalid_argument("DynamicGraph: edges not sorted/unique");
      }
    }
    if (static_cast<int>(labels[t].size()) != num_nodes) {
      throw std::invalid_argument("DynamicGraph: label vector length mismatch");
    }
    for (int c : labels[t]) {
      if (c < 0 || c >= num_classes) throw std::invalid_argument("DynamicGraph: label out of range");
    }
    if (!attributes.empty()) {
      if (attributes[t].rows() != num_nodes || attributes[t].cols() != feature_dim()) {
        throw std::invalid_argument("DynamicGraph: attribute matrix shape mismatch");
      }
      require_finite(attributes[t], "DynamicGraph attributes");
    }
  }
}

EdgeList canonical_edges(EdgeList edges, int num_nodes) {
  for (Edge& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= num_nodes) throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loops are not stored");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

NormalizedAdjacency normalize_weighted(const std::vector<Edge>& edges, const std::vector<double>& weights,
                                       int num_nodes) {
  if (edges.size() != weights.size()) throw std::invalid_argument("normalize_weighted: length mismatch");
  std::vector<double> degree(num_nodes, 1.0);  // self-loop contributes 1
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.u < 0 || e.v >= num_nodes || e.u >= e.v) throw std::invalid_argument("edge endpoint out of range");
    if (weights[k] <= 0.0) throw std::invalid_argument("normalize_weighted: nonpositive weight");
    degree[e.u] += weights[k];
    degree[e.v] += weights[k];
  }
  std::vector<int> rows, cols;
  std::vector<double> vals;
  rows.reserve(num_nodes + 2 * edges.size());
  cols.reserve(rows.capacity());
  vals.reserve(rows.capacity());
  for (int i = 0; i < num_nodes; ++i) {
    rows.push_back(i);
    cols.push_back(i);
    vals.push_back(1.0 / degree[i]);
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const double v = weights[k] / std::sqrt(degree[e.u] * degree[e.v]);
    rows.push_back(e.u);
    cols.push_back(e.v);
    vals.push_back(v);
    rows.push_back(e.v);
    cols.push_back(e.u);
    vals.push_back(v);
  }
  return CsrMatrix::from_entries(num_nodes, num_nodes, std::move(rows), std::move(cols), std::move(vals));
}

NormalizedAdjacency normalize(const EdgeList& edges, int num_nodes) {
  EdgeList canon = canonical_edges(edges, num_nodes);
  return normalize_weighted(canon, std::vector<double>(canon.size(), 1.0), num_nodes);
}

NormalizedAdjacency accumulate(const DynamicGraph& graph) {
  if (graph.num_timesteps() < 1) throw std::invalid_argument("accumulate: empty graph");
  std::map<Edge, double> weight;
  for (const EdgeList& snapshot : graph.snapshots) {
    for (const Edge& e : snapshot) weight[e] += 1.0;
  }
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(weight.size());
  weights.reserve(weight.size());
  for (const auto& [e, w] : weight) {
    edges.push_back(e);
    weights.push_back(w);
  }
  return normalize_weighted(edges, weights, graph.num_nodes);
}

Tensor one_hot_features(int num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("one_hot_features: num_nodes must be >= 1");
  return Tensor::identity(num_nodes);
}

NodeSplit split_nodes(int num_nodes, double train_ratio, double val_ratio, double test_ratio,
                      std::uint64_t seed) {
  if (train_ratio <= 0.0 || val_ratio <= 0.0 || test_ratio <= 0.0) {
    throw std::invalid_argument("split_nodes: ratios must be positive");
  }
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9) {
    throw std::invalid_argument("split_nodes: ratios must sum to 1");
  }
  std::vector<int> perm(num_nodes);
  for (int i = 0; i < num_nodes; ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  const int n_train = static_cast<int>(std::floor(train_ratio * num_nodes + 1e-9));
  const int n_val = static_cast<int>(std::floor(val_ratio * num_nodes + 1e-9));
  NodeSplit split;
  split.seed = seed;
  split.train.assign(perm.begin(), perm.begin() + n_train);
  split.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  split.test.assign(perm.begin() + n_train + n_val, perm.end());
  return split;
}

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  std::ostringstream oss;
  oss << origin << ":" << line << ": " << message;
  throw ParseError(oss.str());
}

bool parse_kv(const std::string& token, const std::string& key, long long& out) {
  if (token.rfind(key + "=", 0) != 0) return false;
  const std::string v = token.substr(key.size() + 1);
  if (v.empty()) return false;
  std::size_t pos = 0;
  out = std::stoll(v, &pos);
  return pos == v.size();
}

}  // namespace

DynamicGraph parse_graph(std::istream& in, const std::string& origin) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail(origin, 1, "missing header");
  ++line_no;
  std::istringstream header(line);
  std::string magic, version, tok;
  header >> magic >> version;
  long long n = -1, c = -1, t = -1, f = -1;
  while (header >> tok) {
    long long v = 0;
    if (parse_kv(tok, "nodes", v)) n = v;
    else if (parse_kv(tok, "classes", v)) c = v;
    else if (parse_kv(tok, "timesteps", v)) t = v;
    else if (parse_kv(tok, "attrs", v)) f = v;
    else fail(origin, line_no, "unknown header field '" + tok + "'");
  }
  if (magic != "DYNGRAPH" || version != "v1" || n < 1 || c < 1 || t < 1 || f < 0) {
    fail(origin, line_no, "malformed header");
  }

  DynamicGraph g;
  g.num_nodes = static_cast<int>(n);
  g.num_classes = static_cast<int>(c);
  g.snapshots.resize(static_cast<std::size_t>(t));
  g.labels.assign(static_cast<std::size_t>(t), {});
  if (f > 0) g.attributes.assign(static_cast<std::size_t>(t), Tensor(g.num_nodes, static_cast<int>(f)));

  int current = -1;
  std::vector<int> labels_seen;
  std::vector<int> attrs_seen;
  auto close_block = [&](int block, int at_line) {
    if (block < 0) return;
    if (labels_seen[block] != g.num_nodes) fail(origin, at_line, "timestep block missing label lines");
    if (f > 0 && attrs_seen[block] != g.num_nodes) fail(origin, at_line, "timestep block missing attribute lines");
  };
  labels_seen.assign(static_cast<std::size_t>(t), 0);
  attrs_seen.assign(static_cast<std::size_t>(t), 0);
  std::vector<std::vector<char>> label_set(static_cast<std::size_t>(t),
                                           std::vector<char>(g.num_nodes, 0));
  for (auto& lv : g.labels) lv.assign(g.num_nodes, 0);

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;  // blank line
    if (kind[0] == '#') continue;
    if (kind[0] == 'T' && kind.size() > 1) {
      long long idx = -1;
      try {
        idx = std::stoll(kind.substr(1));
      } catch (const std::exception&) {
        fail(origin, line_no, "malformed timestep marker");
      }
      if (idx != current + 1) fail(origin, line_no, "timestep blocks must appear in order");
      if (idx >= t) fail(origin, line_no, "timestep count mismatch: more blocks than header declares");
      close_block(current, line_no);
      current = static_cast<int>(idx);
      continue;
    }
    if (current < 0) fail(origin, line_no, "data line before first timestep block");
    if (kind == "L") {
      int i = -1, cls = -1;
      if (!(ls >> i >> cls)) fail(origin, line_no, "malformed label line");
      if (i < 0 || i >= g.num_nodes) fail(origin, line_no, "label node index out of range");
      if (cls < 0 || cls >= g.num_classes) fail(origin, line_no, "label class out of range");
      if (label_set[current][i]) fail(origin, line_no, "duplicate label line for node");
      label_set[current][i] = 1;
      g.labels[current][i] = cls;
      labels_seen[current]++;
    } else if (kind == "E") {
      int u = -1, v = -1;
      if (!(ls >> u >> v)) fail(origin, line_no, "malformed edge line");
      if (u < 0 || u >= g.num_nodes || v < 0 || v >= g.num_nodes) {
        fail(origin, line_no, "edge endpoint out of range");
      }
      if (u == v) fail(origin, line_no, "self-loop edges are not allowed");
      g.snapshots[current].push_back({std::min(u, v), std::max(u, v)});
    } else if (kind == "X") {
      if (f == 0) fail(origin, line_no, "attribute line in attribute-free file");
      int i = -1;
      if (!(ls >> i)) fail(origin, line_no, "malformed attribute line");
      if (i < 0 || i >= g.num_nodes) fail(origin, line_no, "attribute node index out of range");
      for (int j = 0; j < f; ++j) {
        double v = 0.0;
        if (!(ls >> v)) fail(origin, line_no, "attribute line has too few values");
        g.attributes[current](i, j) = v;
      }
      double extra = 0.0;
      if (ls >> extra) fail(origin, line_no, "attribute line has too many values");
      attrs_seen[current]++;
    } else {
      fail(origin, line_no, "unknown line kind '" + kind + "'");
    }
  }
  if (current != t - 1) fail(origin, line_no, "timestep count mismatch: fewer blocks than header declares");
  close_block(current, line_no);

  for (auto& snapshot : g.snapshots) {
    std::sort(snapshot.begin(), snapshot.end());
    if (std::adjacent_find(snapshot.begin(), snapshot.end()) != snapshot.end()) {
      fail(origin, line_no, "duplicate edge in snapshot");
    }
  }
  g.validate();
  return g;
}

DynamicGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_graph(in, path);
}

void write_graph(const DynamicGraph& graph, std::ostream& out) {
  graph.validate();
  out << "DYNGRAPH v1 nodes=" << graph.num_nodes << " classes=" << graph.num_classes
      << " timesteps=" << graph.num_timesteps() << " attrs=" << graph.feature_dim() << "\n";
  char buf[64];
  for (int t = 0; t < graph.num_timesteps(); ++t) {
    out << "T" << t << "\n";
    for (int i = 0; i < graph.num_nodes; ++i) out << "L " << i << " " << graph.labels[t][i] << "\n";
    for (const Edge& e : graph.snapshots[t]) out << "E " << e.u << " " << e.v << "\n";
    if (graph.has_attributes()) {
      for (int i = 0; i < graph.num_nodes; ++i) {
        out << "X " << i;
        for (int j = 0; j < graph.feature_dim(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g", graph.attributes[t](i, j));
          out << " " << buf;
        }
        out << "\n";
      }
    }
  }
}

void save_graph(const DynamicGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  write_graph(graph, out);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace gcnse
